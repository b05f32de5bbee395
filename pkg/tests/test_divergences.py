import math

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings, strategies as st

from thermocoh.divergences import (
    DEFAULT_ALPHAS,
    alpha_tag,
    classical_renyi,
    free_coherence,
    free_coherence_profile,
    free_energy,
    free_energy_split,
    make_grid,
    parse_alpha,
    relative_entropy,
    renyi_divergence,
    renyi_profile,
)
from thermocoh.errors import InputError
from thermocoh.linops import partial_trace
from thermocoh.states import Hamiltonian, coherent_thermal_state, dephase_matrix, gibbs_state

from conftest import rand_density, rand_hermitian


def _mpow(a, t):
    w, v = np.linalg.eigh(a)
    return (v * w ** t) @ v.conj().T


def oracle(rho, sigma, alpha):
    """Direct matrix-function formulas for full-rank arguments."""
    if alpha == 1:
        return np.trace(rho @ (sla.logm(rho) - sla.logm(sigma))).real
    if math.isinf(alpha):
        s = _mpow(sigma, -0.5)
        return math.log(np.linalg.eigvalsh(s @ rho @ s).max())
    if alpha < 1:
        q = np.trace(_mpow(rho, alpha) @ _mpow(sigma, 1 - alpha)).real
        return math.log(q) / (alpha - 1)
    s = _mpow(sigma, (1 - alpha) / (2 * alpha))
    q = np.trace(_mpow(s @ rho @ s, alpha)).real
    return math.log(q) / (alpha - 1)


@pytest.mark.parametrize("alpha", [a for a in DEFAULT_ALPHAS if a > 0])
@pytest.mark.parametrize("dim", [2, 3, 4])
def test_matches_matrix_function_oracle(alpha, dim, rng):
    rho, sigma = rand_density(dim, rng), rand_density(dim, rng)
    assert renyi_divergence(rho, sigma, alpha) == pytest.approx(oracle(rho, sigma, alpha), abs=1e-9)


def test_alpha_zero_is_support_overlap():
    rho = np.diag([0.5, 0.5, 0.0]).astype(complex)
    sigma = np.diag([0.2, 0.3, 0.5]).astype(complex)
    assert renyi_divergence(rho, sigma, 0) == pytest.approx(-math.log(0.5))


def test_classical_reference_values():
    p, q = np.array([0.9, 0.1]), np.array([0.5, 0.5])
    # hand-evaluated sums
    assert classical_renyi(p, q, 2) == pytest.approx(math.log(0.81 / 0.5 + 0.01 / 0.5))
    assert classical_renyi(p, q, 1) == pytest.approx(0.9 * math.log(1.8) + 0.1 * math.log(0.2))
    assert classical_renyi(p, q, math.inf) == pytest.approx(math.log(1.8))
    assert classical_renyi(p, q, 0) == pytest.approx(0.0)


@pytest.mark.parametrize("alpha", DEFAULT_ALPHAS)
def test_commuting_reduces_to_classical(alpha, rng):
    p, q = rng.dirichlet(np.ones(4)), rng.dirichlet(np.ones(4))
    u = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))[0]
    rho, sigma = u @ np.diag(p) @ u.conj().T, u @ np.diag(q) @ u.conj().T
    assert renyi_divergence(rho, sigma, alpha) == pytest.approx(classical_renyi(p, q, alpha), abs=1e-10)


def test_support_violation_is_infinite():
    rho = np.full((2, 2), 0.5, dtype=complex)
    sigma = np.diag([1.0, 0.0]).astype(complex)
    vals = dict(zip(DEFAULT_ALPHAS, renyi_profile(rho, sigma, DEFAULT_ALPHAS)))
    assert all(math.isinf(vals[a]) for a in DEFAULT_ALPHAS if a >= 1)
    assert all(math.isfinite(vals[a]) for a in DEFAULT_ALPHAS if a < 1)
    # orthogonal supports: infinite everywhere
    orth = renyi_profile(np.diag([0.0, 1.0]), sigma, DEFAULT_ALPHAS)
    assert all(math.isinf(v) for v in orth)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 4), st.integers(0, 2**31))
def test_nonneg_and_monotone_in_alpha(dim, seed):
    rng = np.random.default_rng(seed)
    rho, sigma = rand_density(dim, rng), rand_density(dim, rng)
    vals = renyi_profile(rho, sigma, DEFAULT_ALPHAS)
    assert min(vals) >= -1e-10
    # monotone within each branch (Petz below 1, sandwiched above)
    low = [v for a, v in zip(DEFAULT_ALPHAS, vals) if a <= 1]
    high = [v for a, v in zip(DEFAULT_ALPHAS, vals) if a >= 1]
    assert all(b >= a - 1e-9 for a, b in zip(low, low[1:]))
    assert all(b >= a - 1e-9 for a, b in zip(high, high[1:]))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31))
def test_data_processing_under_partial_trace(seed):
    rng = np.random.default_rng(seed)
    rho, sigma = rand_density(4, rng), rand_density(4, rng)
    r, s = partial_trace(rho, [2, 2], [0]), partial_trace(sigma, [2, 2], [0])
    for a in (0.5, 0.75, 1, 2, 5, math.inf):
        assert renyi_divergence(r, s, a) <= renyi_divergence(rho, sigma, a) + 1e-9


def test_self_divergence_zero(rng):
    rho = rand_density(3, rng)
    assert max(abs(v) for v in renyi_profile(rho, rho, DEFAULT_ALPHAS)) < 1e-10


def test_grid_parsing():
    assert make_grid("inf,0,1,0.5") == (0.0, 0.5, 1.0, math.inf)
    assert make_grid(None) == DEFAULT_ALPHAS
    assert [alpha_tag(a) for a in (0, 0.5, 1, math.inf)] == ["0", "0.5", "1", "inf"]
    with pytest.raises(InputError):
        parse_alpha(-0.5)
    with pytest.raises(InputError):
        make_grid("")


def test_dimension_mismatch():
    with pytest.raises(InputError):
        relative_entropy(np.eye(2) / 2, np.eye(3) / 3)


def test_free_energy_of_gibbs_is_equilibrium():
    t = gibbs_state(Hamiltonian.diagonal([0, 1, 2.5]), 0.7)
    for a in DEFAULT_ALPHAS:
        assert free_energy(t.gibbs, t, a) == pytest.approx(t.equilibrium_free_energy, abs=1e-10)


def test_free_energy_excited_qubit():
    t = gibbs_state(Hamiltonian.diagonal([0, 1]), 1.0)
    # F_0 of |1><1| = -kT log gamma_1 - kT log Z = 1
    assert free_energy(np.diag([0, 1.0]), t, 0) == pytest.approx(1.0)
    with pytest.raises(InputError):
        free_energy(np.diag([0, 1.0]), gibbs_state(Hamiltonian.diagonal([0, 1]), 0.0), 1)


def test_free_coherence_plus_state():
    h = Hamiltonian.diagonal([0, 1])
    plus = np.full((2, 2), 0.5, dtype=complex)
    vals = free_coherence_profile(plus, h, DEFAULT_ALPHAS)
    assert np.allclose(vals, math.log(2))


def test_free_coherence_coherent_thermal_state():
    h = Hamiltonian.diagonal([0, 1])
    psi = coherent_thermal_state(h, 1.0)
    g1 = math.exp(-1) / (1 + math.exp(-1))
    binary = -(g1 * math.log(g1) + (1 - g1) * math.log(1 - g1))
    assert free_coherence(psi, h, 1) == pytest.approx(binary, abs=1e-12)
    assert free_coherence(psi, h, 1) == pytest.approx(0.5822, abs=1e-4)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 4), st.integers(0, 2**31))
def test_free_coherence_zero_on_incoherent(dim, seed):
    rng = np.random.default_rng(seed)
    h = Hamiltonian(rand_hermitian(dim, rng))
    d = dephase_matrix(rand_density(dim, rng), h)
    assert max(free_coherence_profile(d, h, DEFAULT_ALPHAS)) < 1e-9


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 4), st.sampled_from([0.2, 1.0, 5.0]), st.integers(0, 2**31))
def test_split_identity(dim, beta, seed):
    rng = np.random.default_rng(seed)
    t = gibbs_state(Hamiltonian(rand_hermitian(dim, rng)), beta)
    s = free_energy_split(rand_density(dim, rng), t)
    assert s.certified and s.residual < 1e-9
    assert s.quantum >= 0
