"""Hot numerical kernels.

Each kernel exists twice: a loop version written for numba (``*_loops``, compiled
as ``*_nb``) and a vectorised numpy version (``*_np``).  The dispatching wrappers
at the bottom pick one according to :mod:`thermocoh._jit`.  Both versions are
importable regardless of the flag so they can be cross-checked and benchmarked.
"""
import math

import numpy as np
from scipy.special import gammaln

from ._jit import jit, USE_NUMBA

# Above this dimension LAPACK beats cyclic Jacobi even when compiled.
JACOBI_MAX_DIM = 6  # LAPACK wins above this (benchmarks/bench_kernels.py)
JACOBI_MAX_SWEEPS = 60


# --------------------------------------------------------------------------
# Hermitian eigensolver: cyclic complex Jacobi
# --------------------------------------------------------------------------

def jacobi_eigh_loops(a, max_sweeps):
    """Cyclic Jacobi diagonalisation of a complex Hermitian matrix.

    Returns ``(w, v, off, sweeps)`` with unsorted eigenvalues ``w``, eigenvector
    columns ``v``, the final off-diagonal Frobenius norm and the number of sweeps
    used.  ``a`` is not modified.
    """
    n = a.shape[0]
    A = a.copy()
    V = np.eye(n, dtype=np.complex128)
    fro = 0.0
    for i in range(n):
        for j in range(n):
            fro += A[i, j].real ** 2 + A[i, j].imag ** 2
    fro = math.sqrt(fro)
    target = 1e-15 * fro + 1e-300
    off = 0.0
    sweeps = 0
    for sweep in range(max_sweeps):
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                off += 2.0 * (A[p, q].real ** 2 + A[p, q].imag ** 2)
        off = math.sqrt(off)
        if off <= target:
            break
        sweeps = sweep + 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = A[p, q]
                mag = abs(b)
                if mag <= 1e-300:
                    continue
                app = A[p, p].real
                aqq = A[q, q].real
                # phase that makes the (p, q) entry real and positive
                ph = b / mag
                theta = (aqq - app) / (2.0 * mag)
                if theta >= 0.0:
                    t = 1.0 / (theta + math.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # J = diag(1, conj(ph)) @ [[c, s], [-s, c]] on the (p, q) plane
                jpp = c + 0j
                jpq = s + 0j
                jqp = -s * ph.conjugate()
                jqq = c * ph.conjugate()
                for k in range(n):
                    akp = A[k, p]
                    akq = A[k, q]
                    A[k, p] = akp * jpp + akq * jqp
                    A[k, q] = akp * jpq + akq * jqq
                    vkp = V[k, p]
                    vkq = V[k, q]
                    V[k, p] = vkp * jpp + vkq * jqp
                    V[k, q] = vkp * jpq + vkq * jqq
                for k in range(n):
                    apk = A[p, k]
                    aqk = A[q, k]
                    A[p, k] = jpp.conjugate() * apk + jqp.conjugate() * aqk
                    A[q, k] = jpq.conjugate() * apk + jqq.conjugate() * aqk
                A[p, q] = 0.0
                A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
    w = np.empty(n)
    for i in range(n):
        w[i] = A[i, i].real
    return w, V, off, sweeps


jacobi_eigh_nb = jit(jacobi_eigh_loops)


def eigh_np(a):
    w, v = np.linalg.eigh(a)
    return w, v


def eigh(a):
    """Ascending eigenvalues and orthonormal eigenvectors of Hermitian ``a``.

    Returns ``(w, v, residual_offdiag, sweeps)``; LAPACK reports zero for both
    diagnostics.
    """
    a = np.ascontiguousarray(a, dtype=np.complex128)
    n = a.shape[0]
    if USE_NUMBA and n <= JACOBI_MAX_DIM:
        w, v, off, sweeps = jacobi_eigh_nb(a, JACOBI_MAX_SWEEPS)
        order = np.argsort(w, kind="stable")
        return w[order], v[:, order], off, sweeps
    w, v = eigh_np(a)
    return w, v, 0.0, 0


# --------------------------------------------------------------------------
# Bipartite partial trace
# --------------------------------------------------------------------------

def ptrace_second_loops(m, da, db):
    """Trace out the second factor of a ``(da*db) x (da*db)`` matrix."""
    out = np.zeros((da, da), dtype=np.complex128)
    for i in range(da):
        for j in range(da):
            acc = 0j
            for k in range(db):
                acc += m[i * db + k, j * db + k]
            out[i, j] = acc
    return out


def ptrace_first_loops(m, da, db):
    """Trace out the first factor of a ``(da*db) x (da*db)`` matrix."""
    out = np.zeros((db, db), dtype=np.complex128)
    for k in range(da):
        for i in range(db):
            for j in range(db):
                out[i, j] += m[k * db + i, k * db + j]
    return out


ptrace_second_nb = jit(ptrace_second_loops)
ptrace_first_nb = jit(ptrace_first_loops)


def ptrace_second_np(m, da, db):
    return np.einsum("ikjk->ij", m.reshape(da, db, da, db))


def ptrace_first_np(m, da, db):
    return np.einsum("kikj->ij", m.reshape(da, db, da, db))


def ptrace_bipartite(m, da, db, keep_first):
    m = np.ascontiguousarray(m, dtype=np.complex128)
    if USE_NUMBA:
        return ptrace_second_nb(m, da, db) if keep_first else ptrace_first_nb(m, da, db)
    return ptrace_second_np(m, da, db) if keep_first else ptrace_first_np(m, da, db)


# --------------------------------------------------------------------------
# Binomial block sums for pure-qubit tensor powers (log space)
# --------------------------------------------------------------------------

def log_binomial_weights_loops(n, log_p0, log_p1):
    """``log x_h = log C(n, h) + (n-h) log p0 + h log p1`` for h = 0..n.

    Zero populations are passed as ``-inf`` and produce ``-inf`` weights
    (``0 * -inf`` is treated as 0).
    """
    out = np.empty(n + 1)
    lgn = math.lgamma(n + 1.0)
    for h in range(n + 1):
        val = lgn - math.lgamma(h + 1.0) - math.lgamma(n - h + 1.0)
        if n - h > 0:
            val += (n - h) * log_p0
        if h > 0:
            val += h * log_p1
        out[h] = val
    return out


def logsumexp_scaled_loops(logx, scale):
    """``log sum_h exp(scale * logx[h])`` ignoring ``-inf`` entries."""
    m = -np.inf
    for v in logx:
        if v != -np.inf:
            s = scale * v
            if s > m:
                m = s
    if m == -np.inf:
        return -np.inf
    acc = 0.0
    for v in logx:
        if v != -np.inf:
            acc += math.exp(scale * v - m)
    return m + math.log(acc)


def shannon_from_log_loops(logx):
    acc = 0.0
    for v in logx:
        if v != -np.inf:
            acc -= math.exp(v) * v
    return acc


log_binomial_weights_nb = jit(log_binomial_weights_loops)
logsumexp_scaled_nb = jit(logsumexp_scaled_loops)
shannon_from_log_nb = jit(shannon_from_log_loops)


def log_binomial_weights_np(n, log_p0, log_p1):
    h = np.arange(n + 1, dtype=float)
    out = gammaln(n + 1.0) - gammaln(h + 1.0) - gammaln(n - h + 1.0)
    with np.errstate(invalid="ignore"):
        a = np.where(n - h > 0, (n - h) * log_p0, 0.0)
        b = np.where(h > 0, h * log_p1, 0.0)
    return out + a + b


def logsumexp_scaled_np(logx, scale):
    finite = logx[np.isfinite(logx)]
    if finite.size == 0:
        return -np.inf
    s = scale * finite
    m = s.max()
    return float(m + np.log(np.exp(s - m).sum()))


def shannon_from_log_np(logx):
    finite = logx[np.isfinite(logx)]
    return float(-(np.exp(finite) * finite).sum())


def log_binomial_weights(n, log_p0, log_p1):
    if USE_NUMBA:
        return log_binomial_weights_nb(int(n), float(log_p0), float(log_p1))
    return log_binomial_weights_np(int(n), float(log_p0), float(log_p1))


def logsumexp_scaled(logx, scale):
    if USE_NUMBA:
        return float(logsumexp_scaled_nb(logx, float(scale)))
    return logsumexp_scaled_np(logx, float(scale))


def shannon_from_log(logx):
    if USE_NUMBA:
        return float(shannon_from_log_nb(logx))
    return shannon_from_log_np(logx)
