"""Benchmark the numba kernels against the pure-numpy implementations.

Both code paths live in ``icllab.simulate.kernels``; the active one is chosen
at import time by the ICLLAB_NO_NUMBA environment variable, so this script
imports the private implementations directly and times them side by side.

Usage: python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from icllab.simulate.kernels import (
    USE_NUMBA,
    _accumulate_gram_numpy,
    _residual_energies_numpy,
)

if USE_NUMBA:
    from icllab.simulate.kernels import (
        _accumulate_gram_numba,
        _residual_energies_numba,
    )


def timeit(fn, *args, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_gram(d, n):
    rng = np.random.default_rng(0)
    xq = rng.standard_normal((n, d))
    v = rng.standard_normal((n, d + 1))
    y = rng.standard_normal(n)
    D = d * (d + 1)

    def run_numpy():
        A = np.zeros((D, D))
        b = np.zeros(D)
        _accumulate_gram_numpy(A, b, xq, v, y)

    t_np = timeit(run_numpy)
    line = f"gram d={d:3d} n={n:6d}: numpy {t_np*1e3:8.1f} ms"
    if USE_NUMBA:

        def run_nb():
            A = np.zeros((D, D))
            b = np.zeros(D)
            _accumulate_gram_numba(A, b, xq, v, y)

        run_nb()  # compile
        t_nb = timeit(run_nb)
        line += f"   numba {t_nb*1e3:8.1f} ms   ratio {t_np/t_nb:5.2f}x"
    print(line)


def bench_residuals(d, ell, k):
    rng = np.random.default_rng(0)
    xs = rng.standard_normal((ell, d))
    ys = rng.standard_normal(ell)
    tasks = rng.standard_normal((k, d))
    t_np = timeit(_residual_energies_numpy, xs, ys, tasks, repeat=20)
    line = f"residuals d={d:3d} ell={ell:5d} k={k:6d}: numpy {t_np*1e3:8.2f} ms"
    if USE_NUMBA:
        _residual_energies_numba(xs, ys, tasks)  # compile
        t_nb = timeit(_residual_energies_numba, xs, ys, tasks, repeat=20)
        line += f"   numba {t_nb*1e3:8.2f} ms   ratio {t_np/t_nb:5.2f}x"
    print(line)


def main():
    print(f"numba available/active: {USE_NUMBA}")
    for d, n in ((20, 1000), (50, 5000), (50, 10000)):
        bench_gram(d, n)
    for d, ell, k in ((10, 100, 1000), (100, 100, 1000), (10, 1000, 10000)):
        bench_residuals(d, ell, k)


if __name__ == "__main__":
    main()
