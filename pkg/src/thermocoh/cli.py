"""Command-line front end.

Every subcommand writes a self-describing report (``--out``, JSON or CSV) and
prints a one-line verdict.  Exit codes: 0 consistent / feasible / computed,
1 violation detected, 2 input or parse error, 3 numerical failure.
"""
import argparse
import json
import math
import sys

import numpy as np

from . import __version__, _jit
from .divergences import (
    alpha_tag,
    free_coherence_profile,
    free_energy_profile,
    free_energy_split,
    make_grid,
    renyi_profile,
)
from .errors import InputError, NumericError
from .purity import (
    embedding_isometry_check,
    embedding_map,
    prob_vector,
    rationalize_gibbs,
    trumping_necessary_check,
)
from .states import (
    Hamiltonian,
    coherent_thermal_state,
    gibbs_state,
    hamiltonian_from_json,
    joint_hamiltonian,
    matrix_from_json,
    state_from_json,
)
from .tensorpower import PureQubit, bound_report, locking_ratio, rows_to_csv
from .thermalops import (
    CONSISTENT,
    activation_demo,
    counterexample_search,
    default_tolerance,
    equilibrium_work_bound,
    ladder_bath,
    monotone_report,
    sample_thermal_operation,
    second_law_sweep,
    work_locking_check,
)

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _clean(x):
    """Make a report JSON-safe: infinities and NaN become strings."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _require(args, name):
    val = getattr(args, name)
    if val is None:
        raise InputError(f"--{name.replace('_', '-')} is required for '{args.command}'")
    return val


def _state(path):
    return state_from_json(_load_json(path))


def _hamiltonian(path, default=None):
    if path is None:
        if default is None:
            raise InputError("--hamiltonian is required")
        return Hamiltonian.diagonal(default)
    return hamiltonian_from_json(_load_json(path))


def _prob(path):
    doc = _load_json(path)
    if isinstance(doc, dict) and "p" in doc:
        return prob_vector(doc["p"])
    if isinstance(doc, dict) and "matrix" in doc:
        return prob_vector(np.diag(matrix_from_json(doc)).real)
    raise InputError(f"{path}: expected {{'p': [...]}}")


def _beta(args, required=True):
    if args.beta is None:
        if required:
            raise InputError(f"--beta is required for '{args.command}'")
        return None
    if not args.beta > 0:
        raise InputError("--beta must be positive")
    return args.beta


def _int_list(text):
    try:
        vals = [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError as exc:
        raise InputError(f"bad integer list {text!r}") from exc
    if not vals or min(vals) < 1:
        raise InputError("--n values must be positive integers")
    return vals


def _float_list(text):
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError as exc:
        raise InputError(f"bad number list {text!r}") from exc


def _gamma(args):
    if args.gamma is not None:
        return _prob(args.gamma)
    h = _hamiltonian(args.hamiltonian)
    return np.diag(gibbs_state(h, _beta(args)).gibbs.matrix).real.copy()


def _by_alpha(grid, values):
    return {alpha_tag(a): v for a, v in zip(grid, values)}


# ---------------------------------------------------------------------------
# subcommands: each returns (report dict, verdict line, exit code)
# ---------------------------------------------------------------------------

def cmd_divergence(args, grid, tol):
    rho, sigma = _state(_require(args, "state")), _state(_require(args, "sigma"))
    vals = renyi_profile(rho, sigma, grid)
    return {"S_alpha_nats": _by_alpha(grid, vals)}, f"computed {len(grid)} divergences", EXIT_OK


def cmd_free_energy(args, grid, tol):
    rho = _state(_require(args, "state"))
    thermal = gibbs_state(_hamiltonian(args.hamiltonian), _beta(args))
    vals = free_energy_profile(rho, thermal, grid)
    rep = {"F_alpha": _by_alpha(grid, vals), "equilibrium_free_energy": thermal.equilibrium_free_energy}
    return rep, f"computed {len(grid)} free energies", EXIT_OK


def cmd_coherence(args, grid, tol):
    rho = _state(_require(args, "state"))
    vals = free_coherence_profile(rho, _hamiltonian(args.hamiltonian), grid)
    return {"A_alpha_nats": _by_alpha(grid, vals)}, f"max free coherence {max(vals):.6g} nats", EXIT_OK


def cmd_split(args, grid, tol):
    rho = _state(_require(args, "state"))
    thermal = gibbs_state(_hamiltonian(args.hamiltonian), _beta(args))
    s = free_energy_split(rho, thermal)
    rep = {"F": s.free_energy, "F_classical": s.classical, "kT_A": s.quantum,
           "residual": s.residual, "certified": s.certified}
    if not s.certified:
        return rep, f"split identity residual {s.residual:.3g} not certified", EXIT_NUMERIC
    return rep, f"F = {s.free_energy:.6g} = {s.classical:.6g} + {s.quantum:.6g}", EXIT_OK


def cmd_check_transform(args, grid, tol):
    rho, sigma = _state(_require(args, "state")), _state(_require(args, "sigma"))
    beta = _beta(args)
    thermal = gibbs_state(_hamiltonian(args.hamiltonian), beta)
    thermal_out = gibbs_state(_hamiltonian(args.hamiltonian2), beta) if args.hamiltonian2 else None
    rep = monotone_report(rho, sigma, thermal, grid, tol, thermal_out)
    code = EXIT_OK if rep.verdict == CONSISTENT else EXIT_VIOLATION
    return rep.to_json(), f"{rep.verdict} {rep.violating_alphas()}", code


def cmd_simulate(args, grid, tol):
    trials = args.trials or 200
    results = second_law_sweep(trials, args.states_per_trial, args.seed, grid, tol, args.workers)
    keys = ["gibbs_defect", "covariance_defect", "commutation_defect", "max_delta_F", "max_delta_A",
            "max_dpi_excess"]
    summary = {k: max(getattr(r, k) for r in results) for k in keys}
    verdicts = {}
    for r in results:
        for v, c in r.verdicts.items():
            verdicts[v] = verdicts.get(v, 0) + c
    ok = all(summary[k] <= tol for k in keys)
    rep = {"trials": trials, "states_per_trial": args.states_per_trial, "summary": summary,
           "verdict_counts": verdicts, "per_trial": [r.__dict__ for r in results]}
    line = f"{'CONSISTENT' if ok else 'VIOLATION'} over {trials} channels: " + \
        ", ".join(f"{k}={summary[k]:.2e}" for k in keys)
    return rep, line, EXIT_OK if ok else EXIT_VIOLATION


def cmd_work_lock(args, grid, tol):
    beta = _beta(args)
    h = _hamiltonian(args.hamiltonian, default=[0.0, 1.0])
    rho = _state(args.state).matrix if args.state else coherent_thermal_state(h, beta).matrix
    gap = h.min_gap() or 1.0
    h_w = Hamiltonian.diagonal([0.0, gap])
    h_joint = joint_hamiltonian(h, h_w)
    trials = args.trials or 100
    rng = np.random.default_rng(args.seed)
    dists = []
    for _ in range(trials):
        ch = sample_thermal_operation(h_joint, ladder_bath(h_joint, beta, 4), int(rng.integers(2**63)))
        dists.append(work_locking_check(ch, rho, h, h_w))
    worst = max(dists)
    rep = {"trials": trials, "max_tv_distance": worst, "tv_distances": dists}
    code = EXIT_OK if worst < tol else EXIT_VIOLATION
    return rep, f"work-locking max TV distance {worst:.3g} over {trials} channels", code


def cmd_activate(args, grid, tol):
    beta = _beta(args)
    h1 = _hamiltonian(args.hamiltonian, default=[0.0, 1.0])
    h2 = _hamiltonian(args.hamiltonian2) if args.hamiltonian2 else h1
    a = activation_demo(h1, h2, beta)
    rep = {"factor_dephasing_defects": a.factor_dephasing_defects,
           "factor_classical_surplus": a.factor_classical_surplus,
           "joint_dephased_distance": a.joint_dephased_distance,
           "activated_free_energy": a.activated_free_energy, "activated": a.activated}
    line = f"{'ACTIVATED' if a.activated else 'NOT ACTIVATED'}: ||D(r1 r2) - g g||_1 = " \
        f"{a.joint_dephased_distance:.4g}, dF = {a.activated_free_energy:.4g}"
    return rep, line, EXIT_OK if a.activated else EXIT_VIOLATION


def cmd_counterexample(args, grid, tol):
    beta = args.beta if args.beta is not None else 1.0
    if not beta > 0:
        raise InputError("--beta must be positive")
    h = _hamiltonian(args.hamiltonian, default=[0.0, 1.0])
    eps = _float_list(args.epsilon_grid) if args.epsilon_grid else None
    res = counterexample_search(gibbs_state(h, beta), eps, grid, tol)
    rep = {"epsilon": res.epsilon, "scan": res.scan,
           "report": res.report.to_json() if res.report else None}
    if not res.found:
        return rep, "no epsilon on the grid separates the two families", EXIT_OK
    viol = res.report.violating_alphas()
    line = f"{res.report.verdict} at epsilon={res.epsilon:g}: free coherence increases at alpha in {viol['A']}"
    return rep, line, EXIT_VIOLATION


def cmd_tensor_power(args, grid, tol):
    n_list = _int_list(args.n or "1,2,5,10,100,1000,10000")
    rows = bound_report(PureQubit(args.p), n_list, grid)
    rep = {"p_excited": args.p, "rows": [
        {"n": r.n, "alpha": alpha_tag(r.alpha), "value_nats": r.value_nats,
         "bound_nats": r.bound_nats, "ratio": r.ratio} for r in rows]}
    worst = min(r.slack for r in rows)
    return rep, f"bound 0 <= A <= log(n+1) holds on {len(rows)} cells (min slack {worst:.3g})", EXIT_OK, rows


def cmd_locking_ratio(args, grid, tol):
    n_list = _int_list(_require(args, "n"))
    ratios = {str(n): locking_ratio(n) for n in n_list}
    line = " ".join(f"{r:.3f}" if len(n_list) == 1 else f"n={n}:{r:.3f}" for n, r in ratios.items())
    return {"ratios": ratios}, line, EXIT_OK


def cmd_embed(args, grid, tol):
    p = _prob(_require(args, "state"))
    gamma = _gamma(args)
    dims = rationalize_gibbs(gamma, args.max_denominator)
    defect = embedding_isometry_check(p, dims.gamma, dims, grid)
    rep = {"d": list(dims.d), "N": dims.N, "approximation_error": dims.error,
           "embedded": embedding_map(p, dims).tolist(), "isometry_defect": defect}
    code = EXIT_OK if defect < 1e-9 else EXIT_NUMERIC
    return rep, f"N={dims.N} (error {dims.error:.2g}), isometry defect {defect:.2g}", code


def cmd_trump_check(args, grid, tol):
    p, pp = _prob(_require(args, "state")), _prob(_require(args, "sigma"))
    v = trumping_necessary_check(p, pp, _gamma(args), grid)
    rep = {"verdict": v.verdict, "label": v.label, "margins": v.margins, "failing_alphas": v.failing}
    return rep, f"{v.verdict} ({v.label})", EXIT_OK if v.passed else EXIT_VIOLATION


def cmd_equilibrium_bound(args, grid, tol):
    beta = _beta(args)
    h1 = _hamiltonian(_require(args, "hamiltonian"))
    h2 = _hamiltonian(_require(args, "hamiltonian2"))
    w = args.work if args.work is not None else 0.0
    b = equilibrium_work_bound(gibbs_state(h1, beta), gibbs_state(h2, beta), w, grid, tol)
    rep = {"work": w, "bound": b.bound, "thresholds": b.thresholds, "threshold_spread": b.threshold_spread,
           "feasible": b.feasible, "report": b.report.to_json()}
    line = f"{'FEASIBLE' if b.feasible else 'INFEASIBLE'}: w = {w:g} vs F(H1) - F(H2) = {b.bound:.6g}"
    return rep, line, EXIT_OK if b.feasible else EXIT_VIOLATION


COMMANDS = {
    "divergence": cmd_divergence,
    "free-energy": cmd_free_energy,
    "coherence": cmd_coherence,
    "split": cmd_split,
    "check-transform": cmd_check_transform,
    "simulate": cmd_simulate,
    "work-lock": cmd_work_lock,
    "activate": cmd_activate,
    "counterexample": cmd_counterexample,
    "tensor-power": cmd_tensor_power,
    "locking-ratio": cmd_locking_ratio,
    "embed": cmd_embed,
    "trump-check": cmd_trump_check,
    "equilibrium-bound": cmd_equilibrium_bound,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--state", help="state JSON (or {'p': [...]} for classical commands)")
    common.add_argument("--sigma", help="second state JSON")
    common.add_argument("--hamiltonian", help="Hamiltonian JSON")
    common.add_argument("--hamiltonian2", help="final / second Hamiltonian JSON")
    common.add_argument("--gamma", help="thermal distribution JSON {'p': [...]}")
    common.add_argument("--beta", type=float, help="inverse temperature")
    common.add_argument("--alphas", help="comma-separated alpha grid, e.g. 0,0.5,1,2,inf")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int)
    common.add_argument("--states-per-trial", type=int, default=20)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--n", help="integer or comma-separated list")
    common.add_argument("--p", type=float, default=0.5, help="excited population of a pure qubit")
    common.add_argument("--work", type=float, help="work-bit gap w")
    common.add_argument("--max-denominator", type=int, default=1000)
    common.add_argument("--epsilon-grid", help="comma-separated epsilons in (0, 1]")
    common.add_argument("--out", help="report path (default: <command>.<format>)")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    parser = argparse.ArgumentParser(prog="thermocoh", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"thermocoh {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def _provenance(args, grid, tol):
    return {
        "command": args.command,
        "alphas": [alpha_tag(a) for a in grid],
        "tolerance": tol,
        "seed": args.seed,
        "inputs": {k: getattr(args, k) for k in ("state", "sigma", "hamiltonian", "hamiltonian2", "gamma",
                                                 "beta", "trials", "n", "p", "work", "epsilon_grid")},
        "versions": {"thermocoh": __version__, "numpy": np.__version__, "backend": _jit.backend_name()},
    }


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        grid = make_grid(args.alphas)
        tol = default_tolerance()
        out = COMMANDS[args.command](args, grid, tol)
        report, line, code = out[:3]
        path = args.out or f"{args.command}.{args.format}"
        if args.format == "csv":
            if len(out) < 4:
                raise InputError(f"'{args.command}' has no CSV output; use --format json")
            text = rows_to_csv(out[3])
        else:
            doc = {"provenance": _provenance(args, grid, tol), "result": report}
            text = json.dumps(_clean(doc), indent=2, sort_keys=True) + "\n"
        with open(path, "w") as fh:
            fh.write(text)
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    print(f"{args.command}: {line}")
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
