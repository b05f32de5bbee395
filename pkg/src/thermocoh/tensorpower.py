"""Free coherence of many non-interacting qubits.

For a pure qubit with excited population ``p`` the dephased ``n``-fold power is
block diagonal over excitation number ``h``, with block weights

    x_h = C(n, h) (1 - p)^(n - h) p^h.

Because ``rho^(x)n`` is rank one, every Renyi order reduces to a sum over
``x_h`` (nats)::

    alpha = 0       -log sum x_h^2
    0 < alpha < 1   log(sum x_h^(2 - alpha)) / (alpha - 1)          (Petz)
    alpha = 1       Shannon entropy of x
    alpha > 1       alpha / (alpha - 1) * log sum x_h^(1 / alpha)   (sandwiched)
    alpha = inf     log #{h : x_h > 0}

All sums run in log space so ``n`` in the tens of thousands is fine.
"""
import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .divergences import alpha_tag, free_coherence, make_grid, parse_alpha
from .errors import InputError, NumericError
from .linops import tensor_product
from .states import Hamiltonian, as_hamiltonian, joint_hamiltonian

BRUTE_FORCE_CAP = 4096
BOUND_TOL = 1e-9


@dataclass(frozen=True)
class PureQubit:
    p_excited: float
    phase: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.p_excited <= 1.0:
            raise InputError(f"excited population must lie in [0, 1], got {self.p_excited}")

    def vector(self):
        return np.array([math.sqrt(1 - self.p_excited),
                         math.sqrt(self.p_excited) * complex(math.cos(self.phase), math.sin(self.phase))])

    def density_matrix(self):
        v = self.vector()
        return np.outer(v, v.conj())


def log_block_weights(q, n):
    """``log x_h`` for h = 0..n (``-inf`` where the weight vanishes)."""
    p = q.p_excited
    with np.errstate(divide="ignore"):
        log_p0 = math.log(1 - p) if p < 1 else -math.inf
        log_p1 = math.log(p) if p > 0 else -math.inf
    return _kernels.log_binomial_weights(n, log_p0, log_p1)


def free_coherence_pure_power(q, n, alpha):
    """``A_alpha`` of ``n`` copies of the pure qubit ``q`` under ``sum_i Z_i``-type energy."""
    if n < 1:
        raise InputError("n must be >= 1")
    alpha = parse_alpha(alpha)
    if q.p_excited in (0.0, 1.0):
        return 0.0
    logx = log_block_weights(q, int(n))
    if alpha == 0.0:
        val = -_kernels.logsumexp_scaled(logx, 2.0)
    elif alpha < 1.0:
        val = _kernels.logsumexp_scaled(logx, 2.0 - alpha) / (alpha - 1.0)
    elif alpha == 1.0:
        val = _kernels.shannon_from_log(logx)
    elif math.isinf(alpha):
        val = math.log(int(np.isfinite(logx).sum()))
    else:
        val = alpha / (alpha - 1.0) * _kernels.logsumexp_scaled(logx, 1.0 / alpha)
    return max(val, 0.0)


def free_coherence_brute(rho, h, n, alpha):
    """``A_alpha(rho^(x)n)`` by explicit construction; the independent oracle."""
    rho = np.asarray(getattr(rho, "matrix", rho), dtype=np.complex128)
    h = as_hamiltonian(h)
    if rho.shape[0] ** n > BRUTE_FORCE_CAP:
        raise InputError(f"dim^n = {rho.shape[0] ** n} exceeds the brute-force cap {BRUTE_FORCE_CAP}")
    big = tensor_product(*([rho] * n))
    htot = joint_hamiltonian(*([h] * n)) if n > 1 else h
    return free_coherence(big, htot, alpha)


QUBIT_HAMILTONIAN = Hamiltonian.diagonal([0.0, 1.0])


@dataclass(frozen=True)
class BoundRow:
    n: int
    alpha: float
    value_nats: float
    bound_nats: float

    @property
    def slack(self):
        return self.bound_nats - self.value_nats

    @property
    def ratio(self):
        return self.value_nats / self.bound_nats

    @property
    def per_particle(self):
        return self.value_nats / self.n


def bound_report(q, n_list, grid=None):
    """Table of ``A_alpha(rho^(x)n)`` against ``log(n + 1)``.

    Raises :class:`NumericError` if any value leaves ``[0, log(n+1)]``.
    """
    rows = []
    for n in n_list:
        bound = math.log(n + 1)
        for a in make_grid(grid):
            v = free_coherence_pure_power(q, n, a)
            if not -BOUND_TOL <= v <= bound + BOUND_TOL:
                raise NumericError(f"bound violated at n={n}, alpha={alpha_tag(a)}: {v} > {bound}")
            rows.append(BoundRow(int(n), a, v, bound))
    return rows


def rows_to_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "alpha", "value_nats", "bound_nats", "ratio"])
    for r in rows:
        w.writerow([r.n, alpha_tag(r.alpha), repr(r.value_nats), repr(r.bound_nats), repr(r.ratio)])
    return buf.getvalue()


def locking_ratio(n):
    """Upper bound ``log(n+1) / (n log 2)`` on the share of free energy held as coherence."""
    if n < 1:
        raise InputError("n must be >= 1")
    return math.log(n + 1) / (n * math.log(2))
