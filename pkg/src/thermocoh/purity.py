"""Classical (energy-incoherent) layer: the canonical-to-microcanonical
embedding, majorization, and necessary conditions for catalytic
thermo-majorization.

A rational Gibbs distribution ``gamma_i = d_i / N`` is sent by the embedding
``Gamma_d(p) = (+)_i p_i * uniform(d_i)`` to the uniform distribution on ``N``
points, and every Renyi divergence to ``gamma`` becomes a divergence to uniform.
"""
import math
from dataclasses import dataclass

import numpy as np

from .divergences import alpha_tag, classical_renyi, make_grid
from .errors import InputError

SUM_TOL = 1e-9
MAJORIZATION_TOL = 1e-10
TRUMP_TOL = 1e-9


def prob_vector(p):
    """Validate a probability vector (entries >= -1e-12, sum within 1e-9 of 1)."""
    p = np.asarray(getattr(p, "p", p), dtype=float).ravel()
    if p.size == 0:
        raise InputError("empty probability vector")
    if p.min() < -1e-12:
        raise InputError(f"negative probability {p.min():.3g}")
    if abs(p.sum() - 1.0) > SUM_TOL:
        raise InputError(f"probabilities sum to {p.sum():.12g}")
    return np.clip(p, 0.0, None)


@dataclass(frozen=True)
class EmbeddingDims:
    d: tuple
    error: float = 0.0  # max |d_i / N - gamma_i| of the approximation

    def __post_init__(self):
        if not self.d or any(int(x) < 1 for x in self.d):
            raise InputError("embedding multiplicities must be positive integers")

    @property
    def N(self):
        return int(sum(self.d))

    @property
    def gamma(self):
        return np.asarray(self.d, dtype=float) / self.N


def _best_for_denominator(gamma, n):
    """Closest composition of ``n`` to ``n * gamma`` in max-norm (largest remainders)."""
    target = gamma * n
    d = np.floor(target).astype(int)
    short = n - d.sum()
    if short > 0:
        order = np.argsort(-(target - d), kind="stable")
        d[order[:short]] += 1
    return d, float(np.abs(d / n - gamma).max())


def rationalize_gibbs(gamma, max_denominator):
    """Best ``d / N`` approximation of ``gamma`` with ``N <= max_denominator``.

    Every ``d_i`` must be at least 1.  Minimises the max-entry error; ties go to
    the smaller ``N``.
    """
    gamma = prob_vector(gamma)
    if max_denominator < gamma.size:
        raise InputError("max_denominator must be at least the dimension")
    best, best_err = None, math.inf
    for n in range(gamma.size, int(max_denominator) + 1):
        d, err = _best_for_denominator(gamma, n)
        if d.min() < 1:
            continue
        if err < best_err - 1e-15:
            best, best_err = d, err
            if err == 0.0:
                break
    if best is None:
        raise InputError("no denominator gives every level at least one microstate")
    return EmbeddingDims(tuple(int(x) for x in best), best_err)


def embedding_map(p, dims):
    """``Gamma_d(p)``: block ``i`` holds ``d_i`` copies of ``p_i / d_i``."""
    p = np.asarray(getattr(p, "p", p), dtype=float).ravel()
    d = dims.d if isinstance(dims, EmbeddingDims) else tuple(dims)
    if p.size != len(d):
        raise InputError(f"vector of length {p.size} does not match {len(d)} blocks")
    return np.repeat(p / np.asarray(d, dtype=float), d)


def embedding_isometry_check(p, gamma, dims, grid=None):
    """Max over the grid of ``|S_a(p || gamma) - S_a(Gamma_d(p) || uniform)|``.

    ``gamma`` must be exactly ``d / N``; infinite values must agree.
    """
    dims = dims if isinstance(dims, EmbeddingDims) else EmbeddingDims(tuple(dims))
    gamma = prob_vector(gamma)
    if np.abs(gamma - dims.gamma).max() > 1e-12:
        raise InputError("gamma is not the rational distribution d / N; rationalize first")
    p = prob_vector(p)
    q = embedding_map(p, dims)
    eta = np.full(dims.N, 1.0 / dims.N)
    worst = 0.0
    for a in make_grid(grid):
        lhs, rhs = classical_renyi(p, gamma, a), classical_renyi(q, eta, a)
        if math.isinf(lhs) or math.isinf(rhs):
            if lhs != rhs:
                return math.inf
            continue
        worst = max(worst, abs(lhs - rhs))
    return worst


def majorizes(p, q, tol=MAJORIZATION_TOL):
    """True iff ``p`` majorizes ``q`` (shorter vector padded with zeros)."""
    p = np.asarray(p, dtype=float).ravel()
    q = np.asarray(q, dtype=float).ravel()
    n = max(p.size, q.size)
    p = np.pad(p, (0, n - p.size))
    q = np.pad(q, (0, n - q.size))
    cp = np.cumsum(np.sort(p)[::-1])
    cq = np.cumsum(np.sort(q)[::-1])
    return bool(np.all(cp >= cq - tol))


@dataclass
class TrumpVerdict:
    passed: bool
    margins: dict  # alpha tag -> S_a(p||gamma) - S_a(p'||gamma)
    failing: list
    label: str = "necessary on sampled grid, not sufficient"

    @property
    def verdict(self):
        return "PASS" if self.passed else "FAIL"


def trumping_necessary_check(p, p_prime, gamma, grid=None, tol=TRUMP_TOL):
    """Necessary condition for catalytic ``p -> p'`` with thermal fixed point ``gamma``.

    Passes iff ``S_a(p||gamma) >= S_a(p'||gamma) - tol`` at every grid alpha.
    Sampling finitely many alphas makes this necessary only.
    """
    p, pp, g = prob_vector(p), prob_vector(p_prime), prob_vector(gamma)
    if not p.size == pp.size == g.size:
        raise InputError("p, p' and gamma must have equal length")
    margins, failing = {}, []
    for a in make_grid(grid):
        s, sp = classical_renyi(p, g, a), classical_renyi(pp, g, a)
        if math.isinf(sp) and math.isinf(s):
            m = 0.0
        else:
            m = s - sp
        margins[alpha_tag(a)] = m
        if m < -tol:
            failing.append(alpha_tag(a))
    return TrumpVerdict(not failing, margins, failing)
