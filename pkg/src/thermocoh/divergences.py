"""Quantum Renyi divergences, generalised free energies and free coherences.

Below ``alpha = 1`` the Petz divergence ``Tr[rho^a sigma^(1-a)]`` is used, above it
the sandwiched one.  ``alpha`` values 0, 1 and inf have dedicated closed forms.
Values are in nats; ``math.inf`` signals a support violation.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericError
from .linops import SUPPORT_CUTOFF, HermitianOperator, as_matrix, dagger, eigvalsh, hermitian_eig
from .states import as_hamiltonian, dephase_matrix

DEFAULT_ALPHAS = (0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 5.0, 10.0, math.inf)
SUPPORT_TOL = 1e-9
SPLIT_TOL = 1e-9


# ---------------------------------------------------------------------------
# alpha grids
# ---------------------------------------------------------------------------

def parse_alpha(a):
    """Parse ``"0"``, ``"0.5"``, ``"1"``, ``"inf"`` (or numbers) into a float."""
    if isinstance(a, str):
        s = a.strip().lower()
        if s in ("inf", "infinity", "+inf", "oo"):
            return math.inf
        a = float(s)
    a = float(a)
    if math.isnan(a) or a < 0:
        raise InputError(f"alpha must be >= 0, got {a}")
    return a


def alpha_tag(a):
    """Canonical string key for an alpha value: ``"inf"``, ``"1"``, ``"0.5"``."""
    a = float(a)
    if math.isinf(a):
        return "inf"
    if a == int(a):
        return str(int(a))
    return repr(a)


def make_grid(values=None):
    """Sorted, de-duplicated tuple of alphas; ``None`` gives the default grid."""
    if values is None:
        return DEFAULT_ALPHAS
    if isinstance(values, str):
        values = [v for v in values.split(",") if v.strip()]
    grid = sorted({parse_alpha(v) for v in values})
    if not grid:
        raise InputError("empty alpha grid")
    return tuple(grid)


# ---------------------------------------------------------------------------
# Divergences
# ---------------------------------------------------------------------------

def _spectrum(a):
    """Eigenvalues clipped to the support and eigenvectors, reusing cached eigs."""
    exact = getattr(a, "meta", {}).get("spectrum")
    if exact is not None:
        return np.asarray(exact[0], dtype=float).copy(), exact[1]
    if isinstance(a, HermitianOperator):
        es = a.eig()
    else:
        es = hermitian_eig(HermitianOperator(a))
    w = es.eigenvalues.copy()
    lam_max = w[-1] if w.size else 0.0
    w[w <= SUPPORT_CUTOFF * max(lam_max, 0.0)] = 0.0
    return w, es.eigenvectors


def _power_on_support(w, v, t):
    f = np.zeros_like(w)
    pos = w > 0
    f[pos] = w[pos] ** t
    return (v * f) @ dagger(v)


def _outside_support(r, ws, vs):
    """Trace norm of ``P r P - r`` with ``P`` the support projector of sigma."""
    vp = vs[:, ws > 0]
    proj = vp @ dagger(vp)
    diff = proj @ r @ proj - r
    return float(np.abs(eigvalsh((diff + dagger(diff)) / 2)).sum())


def renyi_profile(rho, sigma, alphas):
    """``S_alpha(rho || sigma)`` for every alpha in ``alphas``, sharing eigensolves.

    Parameters
    ----------
    rho, sigma : array_like or HermitianOperator
        Density matrices of equal dimension.
    alphas : iterable of float or str
        Orders ``>= 0``; ``inf`` gives the max-relative entropy.

    Returns
    -------
    list of float
        Values in nats, ``math.inf`` where the support condition of the branch
        fails (supp rho not inside supp sigma for alpha >= 1, orthogonal
        supports below 1).
    """
    alphas = [parse_alpha(a) for a in alphas]
    r = as_matrix(rho)
    if r.shape != as_matrix(sigma).shape:
        raise InputError(f"dimension mismatch: {r.shape} vs {as_matrix(sigma).shape}")
    wr, vr = _spectrum(rho)
    ws_all, vs_all = _spectrum(sigma)
    rp, sp = wr > 0, ws_all > 0
    # |<r_i|s_j>|^2 overlaps give Tr[f(rho) g(sigma)] without forming matrices
    overlap = (np.abs(dagger(vr) @ vs_all) ** 2)[np.ix_(rp, sp)]
    wr, ws = wr[rp], ws_all[sp]
    supported = None
    out = []
    for alpha in alphas:
        if alpha == 0.0:
            q = float((overlap @ ws).sum())
            out.append(math.inf if q <= 0 else -math.log(q))
            continue
        if alpha < 1.0:
            q = float((wr ** alpha) @ overlap @ (ws ** (1 - alpha)))
            out.append(math.inf if q <= 0 else math.log(q) / (alpha - 1.0))
            continue
        if supported is None:
            supported = _outside_support(r, ws_all, vs_all) <= SUPPORT_TOL
        if not supported:
            out.append(math.inf)
        elif alpha == 1.0:
            out.append(float(wr @ np.log(wr)) - float(wr @ overlap @ np.log(ws)))
        elif math.isinf(alpha):
            t = _power_on_support(ws_all, vs_all, -0.5)
            out.append(math.log(eigvalsh(t @ r @ t)[-1]))
        else:
            t = _power_on_support(ws_all, vs_all, (1 - alpha) / (2 * alpha))
            mu = eigvalsh(t @ r @ t)
            mu = mu[mu > SUPPORT_CUTOFF * max(mu[-1], 0.0)]
            # log-sum-exp keeps alpha * log(mu) finite for large alpha
            logs = alpha * np.log(mu)
            m = logs.max()
            out.append(float((m + math.log(np.exp(logs - m).sum())) / (alpha - 1.0)))
    return out


def renyi_divergence(rho, sigma, alpha):
    """Quantum Renyi divergence ``S_alpha(rho || sigma)`` in nats.

    Petz form for ``alpha < 1``, sandwiched form for ``alpha > 1``; see
    :func:`renyi_profile`.
    """
    return renyi_profile(rho, sigma, [alpha])[0]


def relative_entropy(rho, sigma):
    """Umegaki relative entropy ``Tr[rho (log rho - log sigma)]`` in nats."""
    return renyi_divergence(rho, sigma, 1.0)


def classical_renyi(p, q, alpha):
    """Renyi divergence between probability vectors (``0 log 0 = 0``)."""
    alpha = parse_alpha(alpha)
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise InputError(f"length mismatch: {p.shape} vs {q.shape}")
    sp, sq = p > 0, q > 0
    if alpha == 0.0:
        mass = q[sp].sum()
        return math.inf if mass <= 0 else -math.log(mass)
    if alpha < 1.0:
        both = sp & sq
        val = float((p[both] ** alpha * q[both] ** (1 - alpha)).sum())
        return math.inf if val <= 0 else math.log(val) / (alpha - 1.0)
    if np.any(sp & ~sq):
        return math.inf
    if alpha == 1.0:
        return float((p[sp] * (np.log(p[sp]) - np.log(q[sp]))).sum())
    if math.isinf(alpha):
        return float(np.log((p[sp] / q[sp]).max()))
    logs = alpha * np.log(p[sp]) + (1 - alpha) * np.log(q[sp])
    m = logs.max()
    return float((m + math.log(np.exp(logs - m).sum())) / (alpha - 1.0))


# ---------------------------------------------------------------------------
# Free energies and free coherences
# ---------------------------------------------------------------------------

def free_energy(rho, thermal, alpha):
    """``F_alpha = kT S_alpha(rho || gamma) - kT log Z``."""
    return free_energy_profile(rho, thermal, [alpha])[0]


def free_energy_profile(rho, thermal, alphas):
    """``F_alpha`` for each alpha; one eigendecomposition of ``rho``."""
    if thermal.beta <= 0:
        raise InputError("free energy needs beta > 0 (kT undefined at beta = 0)")
    kT = 1.0 / thermal.beta
    return [
        math.inf if math.isinf(v) else kT * v - kT * thermal.log_partition
        for v in renyi_profile(rho, thermal.gibbs, alphas)
    ]


def free_coherence_profile(rho, h, alphas):
    """``A_alpha`` for each alpha; see :func:`free_coherence`."""
    h = as_hamiltonian(h)
    r = as_matrix(rho)
    out = []
    for val in renyi_profile(r, dephase_matrix(r, h), alphas):
        if math.isinf(val):
            raise NumericError("free coherence diverged: rho escaped the support of D_H(rho)")
        if val < -1e-10:
            raise NumericError(f"negative free coherence {val:.3g}")
        out.append(max(val, 0.0))
    return out


def free_coherence(rho, h, alpha):
    """``A_alpha(rho) = S_alpha(rho || D_H(rho))``, the free coherence in nats."""
    return free_coherence_profile(rho, h, [alpha])[0]


@dataclass(frozen=True)
class FreeEnergySplit:
    free_energy: float
    classical: float
    quantum: float  # kT * A(rho)
    residual: float

    @property
    def certified(self):
        return self.residual < SPLIT_TOL


def free_energy_split(rho, thermal):
    """Split ``F(rho)`` into ``F(D_H(rho))`` plus ``kT A(rho)``.

    The three terms are evaluated independently; ``residual`` is
    ``|F - F_c - kT A|`` and ``certified`` compares it against 1e-9.
    """
    r = as_matrix(rho)
    f = free_energy(r, thermal, 1.0)
    fc = free_energy(dephase_matrix(r, thermal.hamiltonian), thermal, 1.0)
    qa = thermal.kT * free_coherence(r, thermal.hamiltonian, 1.0)
    if math.isinf(f) or math.isinf(fc):
        return FreeEnergySplit(f, fc, qa, math.nan)
    return FreeEnergySplit(f, fc, qa, abs(f - fc - qa))
