"""Compare the compiled Jacobi kernel against the numpy fallback.

Run from the repository root:

    python3 benchmarks/bench_svd.py

Both backends execute identical sweeps, so the timing gap is pure
per-rotation overhead.
"""

import time

import numpy as np

from augdual._kernels import COMPILED, _jacobi_py

try:
    from augdual._kernels import _jacobi
except ImportError:
    _jacobi = None

SHAPES = [(8, 6), (20, 15), (50, 40), (100, 80), (200, 150)]
TOL = 5e-15
MAX_SWEEPS = 100


def time_kernel(kernel, mat, repeats):
    best = float("inf")
    for _ in range(repeats):
        a = np.ascontiguousarray(mat.copy())
        v = np.ascontiguousarray(np.eye(mat.shape[1]))
        start = time.perf_counter()
        kernel(a, v, TOL, MAX_SWEEPS)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    print(f"compiled kernel available: {COMPILED}")
    print(f"{'shape':>10} {'pure (ms)':>12} {'compiled (ms)':>14} {'speedup':>8}")
    rng = np.random.default_rng(0)
    for shape in SHAPES:
        mat = rng.standard_normal(shape)
        repeats = 3 if shape[0] >= 100 else 10
        pure = time_kernel(_jacobi_py.jacobi_rotate, mat, repeats)
        if _jacobi is None:
            print(f"{str(shape):>10} {1e3 * pure:12.2f} {'n/a':>14} {'n/a':>8}")
            continue
        comp = time_kernel(_jacobi.jacobi_rotate, mat, repeats)
        print(
            f"{str(shape):>10} {1e3 * pure:12.2f} {1e3 * comp:14.2f} "
            f"{pure / comp:7.1f}x"
        )


if __name__ == "__main__":
    main()
