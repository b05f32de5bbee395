"""Thermodynamic states and Hamiltonians.

Gibbs states, the energy dephasing map, coherent thermal states, the clock
(switch) Hamiltonian used for time-dependent protocols, and work bits.  Energies
are in arbitrary units with ``kT = 1 / beta``; entropic quantities are in nats.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .linops import (
    DEGENERACY_TOL,
    HermitianOperator,
    as_matrix,
    commutator_norm,
    dagger,
    eigvalsh,
    hermitian_eig,
    tensor_product,
)

TRACE_TOL = 1e-9
PSD_TOL = 1e-9


class DensityMatrix(HermitianOperator):
    """Unit-trace positive semidefinite operator.

    ``trace_defect`` and ``min_eigenvalue`` are stored as certificates.
    Arbitrary metadata (e.g. degeneracy flags) may be attached via ``meta``.
    """

    def __init__(self, matrix, tol=TRACE_TOL, meta=None):
        super().__init__(matrix)
        tr = np.trace(self.matrix).real
        self.trace_defect = float(tr - 1.0)
        if abs(self.trace_defect) > tol:
            raise InputError(f"trace is {tr:.12g}, expected 1")
        w = eigvalsh(self.matrix)
        self.min_eigenvalue = float(w[0])
        if self.min_eigenvalue < -PSD_TOL:
            raise InputError(f"state has negative eigenvalue {self.min_eigenvalue:.3g}")
        self.meta = dict(meta or {})

    @classmethod
    def pure(cls, vector):
        psi = np.asarray(vector, dtype=np.complex128).ravel()
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def diagonal(cls, probs):
        return cls(np.diag(np.asarray(probs, dtype=float)).astype(np.complex128))


class Hamiltonian(HermitianOperator):
    """Hermitian operator with a cached eigendecomposition grouped into eigenspaces."""

    def __init__(self, matrix, degeneracy_tol=DEGENERACY_TOL):
        super().__init__(matrix)
        self._eig = hermitian_eig(self, degeneracy_tol)

    @classmethod
    def diagonal(cls, energies):
        return cls(np.diag(np.asarray(energies, dtype=float)).astype(np.complex128))

    @property
    def energies(self):
        return self._eig.eigenvalues

    def projectors(self):
        return self._eig.projectors()

    def is_degenerate(self):
        return len(self._eig.degeneracy_groups) < self.dim

    def evolution(self, t):
        """``exp(-i H t)``."""
        es = self._eig
        v = es.eigenvectors
        return (v * np.exp(-1j * es.eigenvalues * t)) @ dagger(v)

    def min_gap(self, tol=DEGENERACY_TOL):
        """Smallest nonzero spacing between distinct energy levels (0 if none)."""
        e = self._eig.group_energies()
        gaps = np.diff(e)
        gaps = gaps[gaps > tol]
        return float(gaps.min()) if gaps.size else 0.0


def as_hamiltonian(h):
    return h if isinstance(h, Hamiltonian) else Hamiltonian(as_matrix(h))


def as_density(rho):
    return rho if isinstance(rho, DensityMatrix) else DensityMatrix(as_matrix(rho))


@dataclass(frozen=True)
class ThermalPair:
    """A Hamiltonian together with its Gibbs state at inverse temperature ``beta``."""

    hamiltonian: Hamiltonian
    beta: float
    gibbs: DensityMatrix = field(repr=False)
    log_partition: float

    @property
    def kT(self):
        if self.beta <= 0:
            raise InputError("kT is undefined at beta = 0")
        return 1.0 / self.beta

    @property
    def equilibrium_free_energy(self):
        """``-kT log Z``."""
        return -self.kT * self.log_partition


def gibbs_weights(energies, beta):
    """Boltzmann weights and ``log Z`` for a list of energies (shifted for stability)."""
    e = np.asarray(energies, dtype=float)
    shifted = -beta * (e - e.min())
    w = np.exp(shifted)
    z = w.sum()
    return w / z, float(np.log(z) - beta * e.min())


def gibbs_state(h, beta):
    """Thermal state ``exp(-beta H) / Z`` of ``h``."""
    beta = float(beta)
    if not np.isfinite(beta) or beta < 0:
        raise InputError(f"beta must be finite and nonnegative, got {beta}")
    h = as_hamiltonian(h)
    es = h.eig()
    p, logz = gibbs_weights(es.eigenvalues, beta)
    v = es.eigenvectors
    # exact spectrum kept so tiny Boltzmann weights are not cut as off-support
    gamma = DensityMatrix((v * p) @ dagger(v), meta={"spectrum": (p, v)})
    return ThermalPair(h, beta, gamma, logz)


def _check_dims(rho, h):
    if rho.shape[0] != h.dim:
        raise InputError(f"state dimension {rho.shape[0]} != Hamiltonian dimension {h.dim}")


def dephase_matrix(rho, h):
    """``sum_E P_E rho P_E`` as a raw array; no certification."""
    rho = as_matrix(rho)
    h = as_hamiltonian(h)
    _check_dims(rho, h)
    es = h.eig()
    if len(es.degeneracy_groups) == 1:
        return rho.copy()
    v = es.eigenvectors
    r = dagger(v) @ rho @ v
    out = np.zeros_like(r)
    for a, b in es.degeneracy_groups:
        out[a:b, a:b] = r[a:b, a:b]
    return v @ out @ dagger(v)


def dephase(rho, h):
    """Remove all coherence between distinct energy eigenspaces of ``h``."""
    return DensityMatrix(dephase_matrix(rho, h))


def coherent_thermal_state(h, beta):
    """Pure state whose amplitudes in the energy basis are ``sqrt`` Gibbs weights.

    Its dephased version is the Gibbs state.  For degenerate ``h`` the eigenbasis
    returned by the eigensolver is used and ``meta['degenerate']`` is set.
    """
    h = as_hamiltonian(h)
    if beta < 0:
        raise InputError("beta must be nonnegative")
    es = h.eig()
    p, _ = gibbs_weights(es.eigenvalues, beta)
    psi = es.eigenvectors @ np.sqrt(p)
    rho = np.outer(psi, psi.conj())
    return DensityMatrix(rho, meta={"degenerate": h.is_degenerate(), "amplitudes": np.sqrt(p)})


def clock_hamiltonian(h0, h1):
    """``H0 (x) |0><0| + H1 (x) |1><1|`` on system (x) switch."""
    h0, h1 = as_hamiltonian(h0), as_hamiltonian(h1)
    if h0.dim != h1.dim:
        raise InputError("clock Hamiltonians must act on the same system dimension")
    p0 = np.diag([1.0, 0.0]).astype(np.complex128)
    p1 = np.diag([0.0, 1.0]).astype(np.complex128)
    return Hamiltonian(tensor_product(h0, p0) + tensor_product(h1, p1))


def work_bit(w):
    """Two-level work bit ``H_w = w |w><w|``; returns ``(H_w, |0><0|, |w><w|)``."""
    w = float(w)
    hw = Hamiltonian.diagonal([0.0, w])
    return hw, DensityMatrix.diagonal([1.0, 0.0]), DensityMatrix.diagonal([0.0, 1.0])


def joint_hamiltonian(*hs):
    """``H1 (x) 1 (x) ... + 1 (x) H2 (x) ... + ...`` for non-interacting parts."""
    hs = [as_hamiltonian(h) for h in hs]
    dims = [h.dim for h in hs]
    total = np.zeros((int(np.prod(dims)),) * 2, dtype=np.complex128)
    for i, h in enumerate(hs):
        parts = [np.eye(d) for d in dims]
        parts[i] = h.matrix
        total += tensor_product(*parts)
    return Hamiltonian(total)


def is_block_diagonal(rho, h, tol=1e-9):
    """True when ``rho`` commutes with ``h`` to within ``tol``."""
    return commutator_norm(rho, as_hamiltonian(h)) <= tol


# ---------------------------------------------------------------------------
# JSON state format: {"dim": d, "matrix": [[[re, im], ...], ...]}
# ---------------------------------------------------------------------------

def matrix_to_json(m, kind=None):
    m = as_matrix(m)
    doc = {
        "dim": int(m.shape[0]),
        "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in m],
    }
    if kind is not None:
        doc["kind"] = kind
    return doc


def matrix_from_json(doc):
    try:
        d = int(doc["dim"])
        arr = np.asarray(doc["matrix"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed matrix document: {exc}") from exc
    if arr.shape != (d, d, 2):
        raise InputError(f"matrix entries have shape {arr.shape}, expected {(d, d, 2)}")
    return arr[..., 0] + 1j * arr[..., 1]


def state_from_json(doc):
    return DensityMatrix(matrix_from_json(doc))


def hamiltonian_from_json(doc):
    kind = doc.get("kind", "hamiltonian")
    if kind != "hamiltonian":
        raise InputError(f"expected kind 'hamiltonian', got {kind!r}")
    return Hamiltonian(matrix_from_json(doc))
