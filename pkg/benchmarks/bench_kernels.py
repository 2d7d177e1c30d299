"""Compare the compiled kernels against the pure-numpy fallback.

Run twice to see both paths:

    python benchmarks/bench_kernels.py
    NOVTOR_PURE_NUMPY=1 python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from novtor._accel import (USING_NUMBA, count_lattice_points, grid_eval)


def bench(label, fn, repeats=5):
    fn()  # warm up (includes jit compilation when enabled)
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    best = min(times)
    print(f"{label:<28} best of {repeats}: {best * 1e3:9.3f} ms")
    return best


def main():
    print(f"kernel backend: {'numba' if USING_NUMBA else 'pure numpy'}")
    rng = np.random.default_rng(0)

    n_terms, n_pts = 4000, 2000
    amps = rng.standard_normal(n_terms) + 1j * rng.standard_normal(n_terms)
    expos = np.sort(rng.uniform(0.1, 60.0, n_terms))
    zs = -3.0 + 0.5j * rng.standard_normal(n_pts) - rng.uniform(0, 2, n_pts)
    bench("grid_eval (4000x2000)", lambda: grid_eval(amps, expos, zs))

    A = np.array([[2, 1], [1, 1]], dtype=np.int64)
    M = np.linalg.matrix_power(A, 7) - np.eye(2, dtype=np.int64)

    def count():
        total = 0
        for _ in range(20):
            total += count_lattice_points(M)
        return total

    bench("count_lattice (A^7, x20)", count)


if __name__ == "__main__":
    main()
