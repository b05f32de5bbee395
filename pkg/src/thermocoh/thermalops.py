"""Thermal operations and the checks built on them.

A thermal operation couples the system to a Gibbs-state bath through a unitary
that commutes with the total Hamiltonian, then discards the bath::

    E(rho) = Tr_bath[ U (rho (x) gamma_bath) U^dagger ],  [U, H (x) 1 + 1 (x) H_bath] = 0

Channels are sampled by drawing an independent Haar unitary inside every
eigenspace of the joint Hamiltonian, so energy conservation holds by
construction.  A truncated ladder bath is a legitimate bath: the construction
places no restriction on ``H_bath``.
"""
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .divergences import (
    alpha_tag,
    free_coherence_profile,
    free_energy,
    free_energy_profile,
    make_grid,
    renyi_divergence,
)
from .errors import InputError
from .linops import (
    as_matrix,
    commutator_norm,
    dagger,
    partial_trace,
    tensor_product,
    trace_distance,
    trace_norm,
)
from .states import (
    DensityMatrix,
    Hamiltonian,
    ThermalPair,
    as_hamiltonian,
    clock_hamiltonian,
    coherent_thermal_state,
    dephase_matrix,
    gibbs_state,
    joint_hamiltonian,
    matrix_from_json,
    matrix_to_json,
    work_bit,
)

DEFAULT_TOL = 1e-8
DEFAULT_T_SAMPLES = (0.1, 1.0, math.pi, 10.0)

CONSISTENT = "CONSISTENT"
F_VIOLATION = "F_VIOLATION"
A_VIOLATION = "A_VIOLATION"
BOTH = "BOTH"


def default_tolerance():
    """Verdict tolerance, overridable through ``THERMOCOH_TOL``."""
    raw = os.environ.get("THERMOCOH_TOL")
    if raw is None or not raw.strip():
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError as exc:
        raise InputError(f"THERMOCOH_TOL={raw!r} is not a number") from exc
    if not tol >= 0:
        raise InputError(f"THERMOCOH_TOL must be >= 0, got {raw!r}")
    return tol


# ---------------------------------------------------------------------------
# Baths and channels
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BathSpec:
    hamiltonian: Hamiltonian
    beta: float
    gibbs: ThermalPair = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.beta > 0:
            raise InputError("bath beta must be positive")
        object.__setattr__(self, "gibbs", gibbs_state(self.hamiltonian, self.beta))

    @property
    def dimension(self):
        return self.hamiltonian.dim


def ladder_bath(h_sys, beta, dimension=4, gap=None):
    """Equally spaced bath ``diag(0, g, 2g, ...)``.

    The default gap ``g`` is the smallest nonzero level spacing of ``h_sys`` so
    that joint system-bath energies are degenerate.
    """
    if dimension < 1:
        raise InputError("bath dimension must be positive")
    if gap is None:
        gap = as_hamiltonian(h_sys).min_gap() or 1.0
    return BathSpec(Hamiltonian.diagonal(gap * np.arange(dimension)), float(beta))


def haar_unitary(n, rng):
    """Haar-random ``n x n`` unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


@dataclass
class QuantumChannel:
    """Stinespring form of a thermal operation; the bath is the traced factor."""

    system_hamiltonian: Hamiltonian
    bath: BathSpec
    global_unitary: np.ndarray
    seed: int = None
    trivial: bool = False
    _kraus: list = field(default=None, repr=False)

    traced_subsystem = 1

    @property
    def system_dim(self):
        return self.system_hamiltonian.dim

    @property
    def dims(self):
        return [self.system_dim, self.bath.dimension]

    def apply_matrix(self, rho):
        """Channel output as a raw array (no certification)."""
        rho = as_matrix(rho)
        if rho.shape[0] != self.system_dim:
            raise InputError(f"state dimension {rho.shape[0]} != channel input {self.system_dim}")
        u = self.global_unitary
        joint = u @ np.kron(rho, self.bath.gibbs.gibbs.matrix) @ dagger(u)
        return partial_trace(joint, self.dims, [0])

    def __call__(self, rho):
        return self.apply_matrix(rho)

    def kraus(self):
        """Kraus operators ``sqrt(g_j) <b_i| U |b_j>`` in the bath eigenbasis."""
        if self._kraus is None:
            d, db = self.dims
            es = self.bath.hamiltonian.eig()
            w = np.kron(np.eye(d), es.eigenvectors)
            u = (dagger(w) @ self.global_unitary @ w).reshape(d, db, d, db)
            g = np.diag(dagger(es.eigenvectors) @ self.bath.gibbs.gibbs.matrix @ es.eigenvectors).real
            self._kraus = [
                math.sqrt(max(g[j], 0.0)) * u[:, i, :, j] for i in range(db) for j in range(db)
            ]
        return self._kraus

    def energy_defect(self):
        h_tot = joint_hamiltonian(self.system_hamiltonian, self.bath.hamiltonian)
        return commutator_norm(self.global_unitary, h_tot)

    def unitarity_defect(self):
        u = self.global_unitary
        return float(np.abs(dagger(u) @ u - np.eye(u.shape[0])).max())

    def to_json(self):
        return {
            "kind": "thermal_operation",
            "seed": self.seed,
            "beta": self.bath.beta,
            "system_hamiltonian": matrix_to_json(self.system_hamiltonian, "hamiltonian"),
            "bath_hamiltonian": matrix_to_json(self.bath.hamiltonian, "hamiltonian"),
            "bath_dimension": self.bath.dimension,
            "traced_subsystem": self.traced_subsystem,
            "global_unitary": matrix_to_json(self.global_unitary)["matrix"],
            "trivial": self.trivial,
        }

    @classmethod
    def from_json(cls, doc):
        try:
            h_sys = Hamiltonian(matrix_from_json(doc["system_hamiltonian"]))
            bath = BathSpec(Hamiltonian(matrix_from_json(doc["bath_hamiltonian"])), float(doc["beta"]))
            n = h_sys.dim * bath.dimension
            u = matrix_from_json({"dim": n, "matrix": doc["global_unitary"]})
        except KeyError as exc:
            raise InputError(f"channel document is missing {exc}") from exc
        return cls(h_sys, bath, u, doc.get("seed"), bool(doc.get("trivial", False)))


def sample_thermal_operation(h_sys, bath, seed):
    """Random thermal operation: block-Haar unitary on the joint eigenspaces.

    The result is a deterministic function of ``seed``.  If every joint
    eigenspace is one-dimensional the channel is just an energy-diagonal phase
    rotation; ``trivial`` is then set and a warning issued.
    """
    h_sys = as_hamiltonian(h_sys)
    rng = np.random.default_rng(seed)
    es = joint_hamiltonian(h_sys, bath.hamiltonian).eig()
    v = es.eigenvectors
    n = v.shape[0]
    block = np.zeros((n, n), dtype=np.complex128)
    for a, b in es.degeneracy_groups:
        block[a:b, a:b] = haar_unitary(b - a, rng)
    u = v @ block @ dagger(v)
    trivial = all(b - a == 1 for a, b in es.degeneracy_groups)
    if trivial:
        warnings.warn("no degenerate joint energy levels: the sampled channel is unitary", stacklevel=2)
    return QuantumChannel(h_sys, bath, u, seed, trivial)


def apply_channel(channel, rho):
    """Apply ``channel`` to ``rho`` and certify the output as a density matrix."""
    return DensityMatrix(channel(rho))


def unitary_channel(u):
    """The map ``rho -> U rho U^dagger``."""
    u = np.asarray(u, dtype=np.complex128)
    return lambda rho: u @ as_matrix(rho) @ dagger(u)


def eigenstate_permutation_channel(h, perm):
    """Measure energy, then prepare the permuted eigenstate.

    Covariant under time translations (its output is always energy-diagonal)
    but not Gibbs-preserving unless ``perm`` is trivial, so symmetric maps
    strictly contain thermal operations.
    """
    h = as_hamiltonian(h)
    v = h.eig().eigenvectors
    perm = list(perm)

    def channel(rho):
        pops = np.diag(dagger(v) @ as_matrix(rho) @ v).real
        out = np.zeros(len(perm))
        for i, j in enumerate(perm):
            out[j] += pops[i]
        return (v * out) @ dagger(v)

    return channel


# ---------------------------------------------------------------------------
# Covariance
# ---------------------------------------------------------------------------

def random_density_matrix(dim, rng, rank=None):
    """Random state from a Ginibre matrix of the given rank (full rank by default)."""
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ dagger(g)
    return rho / np.trace(rho).real


def probe_states(h, n_random=6, seed=7):
    """Fixed probe set: random mixed and pure states plus the uniform energy superposition."""
    h = as_hamiltonian(h)
    rng = np.random.default_rng(seed)
    probes = [random_density_matrix(h.dim, rng) for _ in range(n_random)]
    probes += [random_density_matrix(h.dim, rng, rank=1) for _ in range(n_random)]
    v = h.eig().eigenvectors
    psi = v.sum(axis=1) / math.sqrt(h.dim)
    probes.append(np.outer(psi, psi.conj()))
    return probes


def covariance_defect(channel, h, t_samples=DEFAULT_T_SAMPLES, probes=None):
    """Largest ``|| E(U_t rho U_t^dag) - U_t E(rho) U_t^dag ||_1`` over ``t`` and probes.

    ``channel`` is any callable mapping density matrices to density matrices.
    """
    h = as_hamiltonian(h)
    probes = probe_states(h) if probes is None else [as_matrix(p) for p in probes]
    worst = 0.0
    for t in t_samples:
        ut = h.evolution(t)
        for rho in probes:
            lhs = channel(ut @ rho @ dagger(ut))
            rhs = ut @ channel(rho) @ dagger(ut)
            worst = max(worst, trace_norm(lhs - rhs))
    return worst


# ---------------------------------------------------------------------------
# Second-law reports
# ---------------------------------------------------------------------------

def _delta(after, before):
    if math.isinf(after) and math.isinf(before):
        return math.nan
    return after - before


def verdict_from(delta_F, delta_A, tol):
    """Classify per-alpha deltas; NaN (inf - inf) counts as a violation."""
    f_bad = any(not (d <= tol) for d in delta_F)
    a_bad = any(not (d <= tol) for d in delta_A)
    if f_bad and a_bad:
        return BOTH
    if f_bad:
        return F_VIOLATION
    if a_bad:
        return A_VIOLATION
    return CONSISTENT


@dataclass
class MonotoneReport:
    """Changes of ``F_alpha`` and ``A_alpha`` along a proposed transformation."""

    alphas: tuple
    delta_F: list
    delta_A: list
    tolerance: float
    verdict: str
    pathologies: list = field(default_factory=list)

    def recompute_verdict(self):
        return verdict_from(self.delta_F, self.delta_A, self.tolerance)

    def violating_alphas(self):
        """Tags of alphas at which F or A increases beyond the tolerance."""
        return {
            "F": [alpha_tag(a) for a, d in zip(self.alphas, self.delta_F) if not d <= self.tolerance],
            "A": [alpha_tag(a) for a, d in zip(self.alphas, self.delta_A) if not d <= self.tolerance],
        }

    def to_json(self):
        def num(x):
            if math.isnan(x):
                return "nan"
            if math.isinf(x):
                return "inf" if x > 0 else "-inf"
            return x

        return {
            "alphas": [alpha_tag(a) for a in self.alphas],
            "delta_F": {alpha_tag(a): num(d) for a, d in zip(self.alphas, self.delta_F)},
            "delta_A": {alpha_tag(a): num(d) for a, d in zip(self.alphas, self.delta_A)},
            "tolerance": self.tolerance,
            "verdict": self.verdict,
            "violating_alphas": self.violating_alphas(),
            "pathologies": list(self.pathologies),
        }


def monotone_report(rho, sigma, thermal, grid=None, tol=None, thermal_out=None):
    """Report ``Delta F_alpha`` and ``Delta A_alpha`` for ``rho -> sigma``.

    ``thermal_out`` gives the final Hamiltonian when it differs from the initial
    one; both must share the same temperature.
    """
    grid = make_grid(grid)
    tol = default_tolerance() if tol is None else float(tol)
    thermal_out = thermal if thermal_out is None else thermal_out
    if thermal_out.beta != thermal.beta:
        raise InputError("initial and final thermal pairs must share beta")
    f0 = free_energy_profile(rho, thermal, grid)
    f1 = free_energy_profile(sigma, thermal_out, grid)
    a0 = free_coherence_profile(rho, thermal.hamiltonian, grid)
    a1 = free_coherence_profile(sigma, thermal_out.hamiltonian, grid)
    dF = [_delta(y, x) for x, y in zip(f0, f1)]
    dA = [_delta(y, x) for x, y in zip(a0, a1)]
    pathologies = [f"F[{alpha_tag(a)}]: inf - inf" for a, d in zip(grid, dF) if math.isnan(d)]
    return MonotoneReport(grid, dF, dA, tol, verdict_from(dF, dA, tol), pathologies)


# ---------------------------------------------------------------------------
# Incompleteness of the free-energy conditions
# ---------------------------------------------------------------------------

DEFAULT_EPSILON_GRID = tuple(np.round(np.linspace(0.05, 1.0, 20), 10))


@dataclass
class CounterexampleResult:
    epsilon: float
    report: MonotoneReport
    scan: list  # one dict per epsilon

    @property
    def found(self):
        return self.epsilon is not None


def counterexample_states(thermal, epsilon):
    """Excited state ``|1><1|`` and ``(1 - eps) gamma + eps |+><+|`` of a qubit."""
    h = thermal.hamiltonian
    if h.dim != 2:
        raise InputError("the counterexample lives on a qubit")
    v = h.eig().eigenvectors
    rho = np.outer(v[:, 1], v[:, 1].conj())
    plus = (v[:, 0] + v[:, 1]) / math.sqrt(2)
    sigma = (1 - epsilon) * thermal.gibbs.matrix + epsilon * np.outer(plus, plus.conj())
    return rho, sigma


def counterexample_search(thermal, epsilon_grid=None, grid=None, tol=None):
    """Largest ``eps`` on the grid where all free energies allow ``rho -> sigma``
    but every free coherence forbids it.

    The free-energy side is certified by ``S_inf(sigma||gamma) <= S_0(rho||gamma)``;
    the coherence side needs ``A_alpha(sigma) > tol`` at every grid alpha.
    ``A_0`` vanishes on full-rank states, so with ``alpha = 0`` on the grid
    only the rank-deficient endpoint ``eps = 1`` can qualify.
    """
    grid = make_grid(grid)
    tol = default_tolerance() if tol is None else float(tol)
    eps_grid = sorted(float(e) for e in (DEFAULT_EPSILON_GRID if epsilon_grid is None else epsilon_grid))
    scan = []
    best = None
    for eps in eps_grid:
        if not 0 < eps <= 1:
            raise InputError(f"epsilon must lie in (0, 1], got {eps}")
        rho, sigma = counterexample_states(thermal, eps)
        s_inf = renyi_divergence(sigma, thermal.gibbs, math.inf)
        s_0 = renyi_divergence(rho, thermal.gibbs, 0.0)
        coh = free_coherence_profile(sigma, thermal.hamiltonian, grid)
        ok = s_inf <= s_0 and min(coh) > tol
        scan.append({
            "epsilon": eps,
            "S_inf_sigma": s_inf,
            "S_0_rho": s_0,
            "A_sigma": {alpha_tag(a): c for a, c in zip(grid, coh)},
            "qualifies": bool(ok),
        })
        if ok:
            best = eps
    if best is None:
        return CounterexampleResult(None, None, scan)
    rho, sigma = counterexample_states(thermal, best)
    return CounterexampleResult(best, monotone_report(rho, sigma, thermal, grid, tol), scan)


@dataclass
class WorkBitReport:
    report: MonotoneReport
    work: float
    min_work: float  # smallest grid value with every Delta F <= tol, None if none
    coherence_blocked: bool  # some Delta A > tol, unaffected by the work bit
    delta_A_work_spread: float


def _work_bit_report(rho, sigma, thermal, w, grid, tol):
    hw, ground, excited = work_bit(w)
    joint = gibbs_state(joint_hamiltonian(thermal.hamiltonian, hw), thermal.beta)
    before = tensor_product(as_matrix(rho), excited)
    after = tensor_product(as_matrix(sigma), ground)
    return monotone_report(before, after, joint, grid, tol)


def work_bit_transform_check(rho, sigma, thermal, w, grid=None, tol=None, w_grid=None):
    """Check ``rho (x) |w><w| -> sigma (x) |0><0|`` on ``H (x) 1 + 1 (x) H_w``.

    Also scans ``w_grid`` (default ``0 .. 40 kT`` in steps of ``0.05 kT``) for the
    smallest work value that satisfies every free-energy condition.  The value
    is a grid minimum, not a proven optimum.
    """
    grid = make_grid(grid)
    tol = default_tolerance() if tol is None else float(tol)
    report = _work_bit_report(rho, sigma, thermal, w, grid, tol)
    if w_grid is None:
        w_grid = thermal.kT * np.arange(0.0, 40.0 + 1e-9, 0.05)
    min_work, min_report = None, None
    for wv in sorted(float(x) for x in w_grid):
        r = _work_bit_report(rho, sigma, thermal, wv, grid, tol)
        if all(d <= tol for d in r.delta_F):
            min_work, min_report = wv, r
            break
    ref = min_report or report
    spread = max(abs(x - y) for x, y in zip(report.delta_A, ref.delta_A))
    blocked = any(not d <= tol for d in report.delta_A)
    return WorkBitReport(report, float(w), min_work, blocked, spread)


# ---------------------------------------------------------------------------
# Work distributions and work-locking
# ---------------------------------------------------------------------------

@dataclass
class WorkDistribution:
    outcomes: list  # (energy, probability) per distinct work level
    correlation_defect: float

    @property
    def probabilities(self):
        return np.array([p for _, p in self.outcomes])


def work_distribution(channel, rho, h, h_w):
    """Work-register energy distribution after ``channel(rho (x) |0><0|)``.

    ``|0>`` is the ground state of ``h_w``; outcomes are grouped by distinct
    energies of ``h_w``.
    """
    h, h_w = as_hamiltonian(h), as_hamiltonian(h_w)
    rho = as_matrix(rho)
    if rho.shape[0] != h.dim:
        raise InputError("state and system Hamiltonian dimensions differ")
    es = h_w.eig()
    g = es.eigenvectors[:, 0]
    out = as_matrix(channel(np.kron(rho, np.outer(g, g.conj()))))
    if out.shape[0] != h.dim * h_w.dim:
        raise InputError("channel output does not live on system (x) work register")
    dims = [h.dim, h_w.dim]
    sys_m = partial_trace(out, dims, [0])
    work_m = partial_trace(out, dims, [1])
    outcomes = []
    for (a, b), proj in zip(es.degeneracy_groups, es.projectors()):
        outcomes.append((float(es.eigenvalues[a:b].mean()), float(np.trace(proj @ work_m).real)))
    corr = trace_distance(out, np.kron(sys_m, work_m))
    return WorkDistribution(outcomes, corr)


def work_locking_check(channel, rho, h, h_w):
    """Total-variation distance between work distributions from ``rho`` and ``D_H(rho)``."""
    p = work_distribution(channel, rho, h, h_w).probabilities
    q = work_distribution(channel, dephase_matrix(rho, h), h, h_w).probabilities
    return 0.5 * float(np.abs(p - q).sum())


# ---------------------------------------------------------------------------
# Activation, reference frames, catalysts
# ---------------------------------------------------------------------------

@dataclass
class ActivationReport:
    beta: float
    factor_dephasing_defects: tuple  # ||D_Hi(rho_i) - gamma_i||_1
    factor_classical_surplus: tuple  # F(D_Hi(rho_i)) - F(gamma_i)
    joint_dephased_distance: float  # ||D_Hbar(rho1 (x) rho2) - gamma1 (x) gamma2||_1
    activated_free_energy: float  # F(sigma12) - F(gamma1 (x) gamma2) on Hbar
    sigma12: np.ndarray = field(repr=False)

    @property
    def activated(self):
        return self.joint_dephased_distance > 0.01 and self.activated_free_energy > 0


def activation_demo(h1, h2, beta, rho2=None):
    """Two coherent thermal states: individually work-sterile, jointly not.

    ``rho2`` replaces the second coherent thermal state (e.g. by its Gibbs state).
    """
    h1, h2 = as_hamiltonian(h1), as_hamiltonian(h2)
    t1, t2 = gibbs_state(h1, beta), gibbs_state(h2, beta)
    r1 = coherent_thermal_state(h1, beta).matrix
    r2 = coherent_thermal_state(h2, beta).matrix if rho2 is None else as_matrix(rho2)
    defects, surplus = [], []
    for r, t in ((r1, t1), (r2, t2)):
        d = dephase_matrix(r, t.hamiltonian)
        defects.append(trace_norm(d - t.gibbs.matrix))
        surplus.append(free_energy(d, t, 1.0) - t.equilibrium_free_energy)
    hbar = joint_hamiltonian(h1, h2)
    tbar = gibbs_state(hbar, beta)
    sigma12 = dephase_matrix(np.kron(r1, r2), hbar)
    gg = np.kron(t1.gibbs.matrix, t2.gibbs.matrix)
    dist = trace_norm(sigma12 - gg)
    gain = free_energy(sigma12, tbar, 1.0) - free_energy(gg, tbar, 1.0)
    return ActivationReport(float(beta), tuple(defects), tuple(surplus), dist, gain, sigma12)


def _dims_of(m):
    return as_matrix(m).shape[0]


def reduced_channel(channel, ancilla, keep_first=True):
    """``rho -> Tr_ancilla[channel(rho (x) ancilla)]``."""
    anc = as_matrix(ancilla)

    def effective(rho):
        rho = as_matrix(rho)
        out = as_matrix(channel(np.kron(rho, anc)))
        return partial_trace(out, [rho.shape[0], anc.shape[0]], [0 if keep_first else 1])

    return effective


def simulate_nonsymmetric(channel, rho1, rho2_reference, h1, t_samples=DEFAULT_T_SAMPLES):
    """Effective map ``Tr_2[E(rho1 (x) rho2)]`` using ``rho2`` as a reference frame.

    Returns the output state and the covariance defect of the effective map
    with respect to ``h1``.
    """
    d1, d2 = _dims_of(rho1), _dims_of(rho2_reference)
    if d2 < d1:
        raise InputError("the reference must be at least as large as the system")
    h1 = as_hamiltonian(h1)
    if h1.dim != d1:
        raise InputError("h1 does not match the system dimension")
    eff = reduced_channel(channel, rho2_reference)
    return DensityMatrix(eff(rho1)), covariance_defect(eff, h1, t_samples)


def catalytic_covariance_check(channel, rho, catalyst, h_sys, h_cat, t_samples=DEFAULT_T_SAMPLES):
    """Covariance of ``rho -> Tr_cat E(rho (x) catalyst)`` and how well the catalyst returns.

    Returns ``(defect, catalyst_return_defect)``; the catalyst must commute
    with its Hamiltonian.
    """
    h_sys, h_cat = as_hamiltonian(h_sys), as_hamiltonian(h_cat)
    cat = as_matrix(catalyst)
    if commutator_norm(cat, h_cat) > 1e-9:
        raise InputError("catalyst carries coherence: [catalyst, H_cat] != 0")
    eff = reduced_channel(channel, cat)
    defect = covariance_defect(eff, h_sys, t_samples)
    rho = as_matrix(rho)
    out = as_matrix(channel(np.kron(rho, cat)))
    cat_out = partial_trace(out, [rho.shape[0], cat.shape[0]], [1])
    return defect, trace_distance(cat_out, cat)


# ---------------------------------------------------------------------------
# Equilibrium consistency
# ---------------------------------------------------------------------------

@dataclass
class EquilibriumBound:
    work: float
    bound: float  # F(H1) - F(H2) from log-partitions
    thresholds: dict  # alpha tag -> largest feasible w from the per-alpha condition
    threshold_spread: float
    feasible: bool
    report: MonotoneReport


def _equilibrium_delta_F(t1, t2, w, alphas):
    beta = t1.beta
    hw, ground, excited = work_bit(w)
    clock = clock_hamiltonian(t1.hamiltonian, t2.hamiltonian)
    joint = gibbs_state(joint_hamiltonian(clock, hw), beta)
    p0 = np.diag([1.0, 0.0])
    p1 = np.diag([0.0, 1.0])
    before = tensor_product(t1.gibbs, p0, ground)
    after = tensor_product(t2.gibbs, p1, excited)
    f0 = free_energy_profile(before, joint, alphas)
    f1 = free_energy_profile(after, joint, alphas)
    return [y - x for x, y in zip(f0, f1)], before, after, joint


def equilibrium_work_bound(thermal1, thermal2, w, grid=None, tol=None):
    """Work extractable from ``gamma_H1 -> gamma_H2`` via the clock + work-bit construction.

    Every ``Delta F_alpha`` is evaluated on the full system (x) switch (x) work-bit
    Hamiltonian.  Per alpha, the threshold ``w`` where ``Delta F_alpha = 0`` is
    found by root bracketing; all thresholds should equal ``F(H1) - F(H2)``.
    """
    if thermal1.beta != thermal2.beta:
        raise InputError("both thermal pairs must share beta")
    if thermal1.hamiltonian.dim != thermal2.hamiltonian.dim:
        raise InputError("H1 and H2 must act on the same system")
    grid = make_grid(grid)
    tol = default_tolerance() if tol is None else float(tol)
    bound = thermal1.equilibrium_free_energy - thermal2.equilibrium_free_energy
    thresholds = {}
    for a in grid:
        def f(wv, a=a):
            return _equilibrium_delta_F(thermal1, thermal2, wv, [a])[0][0]

        guess = -f(0.0)
        lo, hi = guess - 1.0, guess + 1.0
        while f(lo) > 0:
            lo -= 2 * (hi - lo)
        while f(hi) < 0:
            hi += 2 * (hi - lo)
        thresholds[alpha_tag(a)] = brentq(f, lo, hi, xtol=1e-14, rtol=1e-14)
    vals = list(thresholds.values())
    dF, before, after, joint = _equilibrium_delta_F(thermal1, thermal2, w, grid)
    report = MonotoneReport(grid, dF, [0.0] * len(grid), tol, verdict_from(dF, [0.0] * len(grid), tol))
    feasible = all(d <= tol for d in dF)
    return EquilibriumBound(float(w), bound, thresholds, max(vals) - min(vals), feasible, report)


# ---------------------------------------------------------------------------
# Monte-Carlo second-law sweep
# ---------------------------------------------------------------------------

SYSTEM_SPECTRA = {2: (0.0, 1.0), 3: (0.0, 1.0, 3.0)}


def random_system_hamiltonian(dim, rng, scale=1.0):
    """Commensurate spectrum in a Haar-random eigenbasis."""
    e = scale * np.asarray(SYSTEM_SPECTRA[dim])
    v = haar_unitary(dim, rng)
    return Hamiltonian((v * e) @ dagger(v))


@dataclass
class TrialResult:
    trial: int
    system_dim: int
    bath_dim: int
    beta: float
    gibbs_defect: float
    covariance_defect: float
    commutation_defect: float
    trace_defect: float
    max_delta_F: float
    max_delta_A: float
    max_dpi_excess: float
    verdicts: dict


def run_trial(seed, trial, n_states=20, grid=None, t_samples=DEFAULT_T_SAMPLES, tol=DEFAULT_TOL):
    """One channel of the sweep; its generator is derived from ``(seed, trial)``."""
    grid = make_grid(grid)
    rng = np.random.default_rng([seed, trial])
    dim = 2 if trial % 2 == 0 else 3
    bath_dim = 4 + (trial // 2) % 5
    beta = (0.5, 1.0, 2.0)[trial % 3]
    h = random_system_hamiltonian(dim, rng, scale=float(rng.uniform(0.5, 2.0)))
    thermal = gibbs_state(h, beta)
    channel = sample_thermal_operation(h, ladder_bath(h, beta, bath_dim), int(rng.integers(2**63)))
    gibbs_defect = trace_norm(channel(thermal.gibbs) - thermal.gibbs.matrix)
    cov = covariance_defect(channel, h, t_samples)
    verdicts = {}
    worst_F = worst_A = worst_comm = worst_tr = worst_dpi = -math.inf
    for k in range(n_states):
        rank = int(rng.integers(1, dim + 1))
        rho = random_density_matrix(dim, rng, rank)
        sigma = channel(rho)
        worst_tr = max(worst_tr, abs(np.trace(sigma).real - 1))
        worst_comm = max(worst_comm, trace_norm(channel(dephase_matrix(rho, h)) - dephase_matrix(sigma, h)))
        rep = monotone_report(rho, sigma, thermal, grid, tol)
        verdicts[rep.verdict] = verdicts.get(rep.verdict, 0) + 1
        worst_F = max(worst_F, max(rep.delta_F))
        worst_A = max(worst_A, max(rep.delta_A))
        if k == 0:
            # data processing against a second random state
            tau = random_density_matrix(dim, rng)
            before = [renyi_divergence(rho, tau, a) for a in grid]
            after = [renyi_divergence(sigma, channel(tau), a) for a in grid]
            worst_dpi = max(worst_dpi, max(y - x for x, y in zip(before, after)))
    return TrialResult(trial, dim, bath_dim, beta, gibbs_defect, cov, worst_comm, worst_tr,
                       worst_F, worst_A, worst_dpi, verdicts)


def _run_trial_args(args):
    return run_trial(*args)


def second_law_sweep(n_channels=200, n_states=20, seed=0, grid=None, tol=None, workers=1):
    """Monte-Carlo check of Gibbs preservation, covariance and both second laws.

    Trials alternate qubit and qutrit systems with ladder baths of dimension
    4..8.  Results come back ordered by trial index whatever ``workers`` is.
    """
    grid = make_grid(grid)
    tol = default_tolerance() if tol is None else float(tol)
    jobs = [(seed, i, n_states, grid, DEFAULT_T_SAMPLES, tol) for i in range(n_channels)]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_trial_args, jobs))
    return [run_trial(*job) for job in jobs]
