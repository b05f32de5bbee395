"""Compare the numba kernels against their pure-numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 200]

Both paths are importable in one process, so the comparison does not need
``THERMOCOH_DISABLE_JIT``.  Compilation happens in a warm-up call and is
excluded from the timings.
"""
import argparse
import timeit

import numpy as np

from thermocoh import _kernels as K


def _herm(n, rng):
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return np.ascontiguousarray((g + g.conj().T) / 2)


def _time(fn, repeat):
    fn()  # warm-up / JIT compile
    return min(timeit.repeat(fn, number=1, repeat=repeat)) * 1e6


def cases(rng):
    for n in (2, 4, 6, 8, 16, 32):
        a = _herm(n, rng)
        yield (f"eigh n={n}",
               lambda a=a: K.jacobi_eigh_nb(a, K.JACOBI_MAX_SWEEPS),
               lambda a=a: K.eigh_np(a))
    for da, db in ((2, 4), (3, 8), (6, 8)):
        m = _herm(da * db, rng)
        yield (f"ptrace {da}x{db}",
               lambda m=m, da=da, db=db: K.ptrace_second_nb(m, da, db),
               lambda m=m, da=da, db=db: K.ptrace_second_np(m, da, db))
    lp0, lp1 = np.log(0.7), np.log(0.3)
    for n in (100, 10_000, 1_000_000):
        x = K.log_binomial_weights_np(n, lp0, lp1)
        yield (f"binomial n={n}",
               lambda n=n: K.log_binomial_weights_nb(n, lp0, lp1),
               lambda n=n: K.log_binomial_weights_np(n, lp0, lp1))
        yield (f"logsumexp n={n}",
               lambda x=x: K.logsumexp_scaled_nb(x, 0.5),
               lambda x=x: K.logsumexp_scaled_np(x, 0.5))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    print(f"{'kernel':<22}{'numba [us]':>12}{'numpy [us]':>12}{'speedup':>10}")
    for name, fast, slow in cases(rng):
        repeat = args.repeat if "1000000" not in name else max(5, args.repeat // 40)
        tf, ts = _time(fast, repeat), _time(slow, repeat)
        print(f"{name:<22}{tf:12.1f}{ts:12.1f}{ts / tf:10.2f}")


if __name__ == "__main__":
    main()
