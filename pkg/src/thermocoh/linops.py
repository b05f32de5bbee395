"""Dense complex linear algebra: Kronecker products, partial traces,
Hermitian eigendecomposition and spectral functions.

Matrices are plain ``complex128`` numpy arrays.  Tensor factors are ordered
row-major, i.e. the left factor is the most significant index.
"""
from dataclasses import dataclass
from functools import reduce

import numpy as np

from . import _kernels
from .errors import InputError, NumericError

HERMITICITY_TOL = 1e-10
DEGENERACY_TOL = 1e-9
SUPPORT_CUTOFF = 1e-12
PSD_TOL = 1e-9
EIG_RESIDUAL_TOL = 1e-9


def as_matrix(a):
    """Return ``a`` (array-like or operator object) as a square complex array."""
    m = getattr(a, "matrix", a)
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputError(f"expected a square matrix, got shape {m.shape}")
    return m


def dagger(a):
    return np.conj(np.swapaxes(a, -1, -2))


class HermitianOperator:
    """A Hermitian matrix, symmetrised on construction.

    Parameters
    ----------
    matrix : array_like
        Square complex matrix.
    tol : float
        Largest tolerated entrywise ``|M - M^dagger|``.
    """

    def __init__(self, matrix, tol=HERMITICITY_TOL):
        m = as_matrix(matrix)
        defect = float(np.abs(m - dagger(m)).max()) if m.size else 0.0
        if defect > tol:
            raise InputError(f"matrix is not Hermitian (defect {defect:.3g} > {tol:.1g})")
        self.matrix = (m + dagger(m)) / 2
        self.matrix.setflags(write=False)
        self.hermiticity_defect = defect
        self._eig = None

    @property
    def dim(self):
        return self.matrix.shape[0]

    def eig(self):
        """Cached :class:`EigenSystem` with the default degeneracy tolerance."""
        if self._eig is None:
            self._eig = hermitian_eig(self)
        return self._eig

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim})"


@dataclass(frozen=True)
class EigenSystem:
    """Ascending eigenvalues, eigenvector columns, and degenerate index ranges."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    degeneracy_groups: tuple
    residual: float = 0.0

    def projectors(self):
        """Spectral projectors, one per degeneracy group."""
        out = []
        for start, stop in self.degeneracy_groups:
            v = self.eigenvectors[:, start:stop]
            out.append(v @ dagger(v))
        return out

    def group_energies(self):
        return np.array([self.eigenvalues[a:b].mean() for a, b in self.degeneracy_groups])

    def reconstruct(self):
        v = self.eigenvectors
        return (v * self.eigenvalues) @ dagger(v)


def group_degenerate(eigenvalues, tol=DEGENERACY_TOL):
    """Split sorted eigenvalues into ``(start, stop)`` runs with gaps below ``tol``."""
    groups = []
    start = 0
    for i in range(1, len(eigenvalues)):
        if eigenvalues[i] - eigenvalues[i - 1] >= tol:
            groups.append((start, i))
            start = i
    if len(eigenvalues):
        groups.append((start, len(eigenvalues)))
    return tuple(groups)


def hermitian_eig(a, degeneracy_tol=DEGENERACY_TOL):
    """Eigendecomposition of a Hermitian operator.

    Raises :class:`NumericError` if the reconstruction residual exceeds 1e-9
    relative to the operator scale (non-convergence).
    """
    m = a.matrix if isinstance(a, HermitianOperator) else HermitianOperator(a).matrix
    w, v, off, _ = _kernels.eigh(m)
    scale = max(1.0, float(np.abs(m).max()) if m.size else 1.0)
    if off > EIG_RESIDUAL_TOL * scale:
        raise NumericError(f"eigensolver did not converge (off-diagonal residual {off:.3g})")
    return EigenSystem(w, v, group_degenerate(w, degeneracy_tol), float(off))


def eigvalsh(a):
    return _kernels.eigh(as_matrix(a))[0]


def tensor_product(*factors):
    """Kronecker product of one or more matrices, left factor most significant."""
    if not factors:
        raise InputError("tensor_product needs at least one factor")
    return reduce(np.kron, [np.asarray(getattr(f, "matrix", f), dtype=np.complex128) for f in factors])


def partial_trace(m, dims, keep):
    """Trace out every tensor factor not listed in ``keep``.

    ``dims`` lists the factor dimensions; kept factors retain their order.
    """
    m = as_matrix(m)
    dims = [int(d) for d in dims]
    if any(d < 1 for d in dims) or int(np.prod(dims)) != m.shape[0]:
        raise InputError(f"dims {dims} do not match matrix dimension {m.shape[0]}")
    keep = sorted(set(int(k) for k in np.atleast_1d(keep)))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise InputError(f"keep indices {keep} out of range for {len(dims)} factors")
    if len(keep) == len(dims):
        return m.copy()
    traced = [i for i in range(len(dims)) if i not in keep]
    dk = int(np.prod([dims[i] for i in keep])) if keep else 1
    dt = int(np.prod([dims[i] for i in traced]))
    # already ordered as (kept..., traced...) or (traced..., kept...): skip the transpose
    if keep == list(range(len(keep))):
        return _kernels.ptrace_bipartite(m, dk, dt, keep_first=True)
    if traced == list(range(len(traced))):
        return _kernels.ptrace_bipartite(m, dt, dk, keep_first=False)
    n = len(dims)
    perm = keep + traced
    t = m.reshape(dims + dims).transpose(perm + [p + n for p in perm])
    return _kernels.ptrace_bipartite(t.reshape(dk * dt, dk * dt), dk, dt, keep_first=True)


def matrix_function(a, func, cutoff=SUPPORT_CUTOFF):
    """Apply ``func`` to the eigenvalues of a PSD operator on its support.

    Eigenvalues at or below ``cutoff * lambda_max`` map to zero.
    """
    es = a.eig() if isinstance(a, HermitianOperator) else hermitian_eig(a)
    w = es.eigenvalues
    lam_max = float(w[-1]) if w.size else 0.0
    if w.size and w[0] < -PSD_TOL * max(1.0, abs(lam_max)):
        raise InputError(f"operator is not positive semidefinite (min eigenvalue {w[0]:.3g})")
    support = w > cutoff * lam_max if lam_max > 0 else np.zeros(w.shape, bool)
    f = np.zeros_like(w)
    f[support] = func(w[support])
    v = es.eigenvectors
    return (v * f) @ dagger(v)


def matrix_power(a, t, cutoff=SUPPORT_CUTOFF):
    """``A**t`` by functional calculus on the support (pseudo-inverse for t < 0)."""
    return HermitianOperator(matrix_function(a, lambda w: w ** t, cutoff))


def support_projector(a, cutoff=SUPPORT_CUTOFF):
    return matrix_function(a, np.ones_like, cutoff)


def trace_norm(a):
    """Schatten 1-norm of a Hermitian matrix."""
    m = as_matrix(a)
    return float(np.abs(eigvalsh((m + dagger(m)) / 2)).sum())


def trace_distance(a, b):
    """Half the trace norm of ``a - b``."""
    return 0.5 * trace_norm(as_matrix(a) - as_matrix(b))


def is_unitary(u, tol=1e-9):
    u = np.asarray(u)
    return float(np.abs(dagger(u) @ u - np.eye(u.shape[0])).max()) <= tol


def commutator_norm(a, b):
    """Largest entry of ``|[A, B]|``."""
    a, b = as_matrix(a), as_matrix(b)
    return float(np.abs(a @ b - b @ a).max())
