import json
import os
import subprocess
import sys

import numpy as np
import pytest

from thermocoh import _kernels as K

from conftest import rand_density, rand_hermitian


@pytest.mark.parametrize("n", [1, 2, 3, 6, 16, 48])
def test_jacobi_matches_lapack(n, rng):
    a = np.ascontiguousarray(rand_hermitian(n, rng))
    w, v, off, sweeps = K.jacobi_eigh_nb(a, K.JACOBI_MAX_SWEEPS)
    order = np.argsort(w)
    w, v = w[order], v[:, order]
    assert np.allclose(w, np.linalg.eigvalsh(a), atol=1e-11)
    assert np.allclose((v * w) @ v.conj().T, a, atol=1e-11)
    assert sweeps < K.JACOBI_MAX_SWEEPS


def test_jacobi_degenerate_and_diagonal():
    a = np.diag([2.0, 1.0, 1.0, 0.0]).astype(complex)
    w, v, _, _ = K.jacobi_eigh_nb(a, K.JACOBI_MAX_SWEEPS)
    assert np.allclose(np.sort(w), [0, 1, 1, 2])


def test_loop_source_runs_uncompiled(rng):
    # the plain-python loops are the numba source; they must agree too
    a = np.ascontiguousarray(rand_hermitian(4, rng))
    w = K.jacobi_eigh_loops(a, K.JACOBI_MAX_SWEEPS)[0]
    assert np.allclose(np.sort(w), np.linalg.eigvalsh(a))


@pytest.mark.parametrize("da,db", [(1, 3), (2, 2), (3, 5), (4, 7)])
def test_partial_trace_backends_agree(da, db, rng):
    m = np.ascontiguousarray(rand_density(da * db, rng))
    assert np.allclose(K.ptrace_second_nb(m, da, db), K.ptrace_second_np(m, da, db))
    assert np.allclose(K.ptrace_first_nb(m, da, db), K.ptrace_first_np(m, da, db))


@pytest.mark.parametrize("n", [1, 7, 100, 10_000])
@pytest.mark.parametrize("p", [0.0, 0.2, 0.5, 1.0])
def test_log_space_backends_agree(n, p):
    with np.errstate(divide="ignore"):
        lp0, lp1 = np.log(1 - p), np.log(p)
    a = K.log_binomial_weights_nb(n, lp0, lp1)
    b = K.log_binomial_weights_np(n, lp0, lp1)
    fin = np.isfinite(b)
    assert np.array_equal(np.isfinite(a), fin)
    assert np.allclose(a[fin], b[fin], atol=1e-9)
    for s in (0.5, 1.0, 1.75, 2.0):
        assert K.logsumexp_scaled_nb(a, s) == pytest.approx(K.logsumexp_scaled_np(b, s), abs=1e-9)
    assert K.shannon_from_log_nb(a) == pytest.approx(K.shannon_from_log_np(b), abs=1e-9)


_PROBE = """
import json, math, numpy as np
from thermocoh import _jit
from thermocoh.divergences import renyi_profile, DEFAULT_ALPHAS
from thermocoh.tensorpower import PureQubit, free_coherence_pure_power
rng = np.random.default_rng(0)
g = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)); r = g @ g.conj().T; r /= np.trace(r).real
g = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)); s = g @ g.conj().T; s /= np.trace(s).real
print(json.dumps({"backend": _jit.backend_name(),
                  "div": renyi_profile(r, s, DEFAULT_ALPHAS),
                  "tp": [free_coherence_pure_power(PureQubit(0.3), 500, a) for a in DEFAULT_ALPHAS]}))
"""


def _probe(flag):
    env = dict(os.environ, THERMOCOH_DISABLE_JIT=flag)
    out = subprocess.run([sys.executable, "-c", _PROBE], env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def test_env_flag_switches_backend_with_same_results():
    jit, ref = _probe("0"), _probe("1")
    assert jit["backend"] == "numba" and ref["backend"] == "numpy"
    assert np.allclose(jit["div"], ref["div"], atol=1e-10)
    assert np.allclose(jit["tp"], ref["tp"], atol=1e-10)
