"""Compare the compiled tridiagonal kernel against the numpy fallback.

The batched Thomas sweep is the hot inner loop of the IMEX stepper (three
solves per step, one system per x-column). Run:

    python benchmarks/bench_tridiag.py
"""

import time

import numpy as np

from mhdlab.kernels import BACKEND, thomas_solve


def bench(n_sys, n, repeats=200):
    rng = np.random.default_rng(0)
    diag = 2.0 + rng.random((n_sys, n))
    lower = -0.5 * rng.random((n_sys, n))
    upper = -0.5 * rng.random((n_sys, n))
    lower[:, 0] = 0.0
    upper[:, -1] = 0.0
    rhs = rng.standard_normal((n_sys, n))

    rows = {}
    for backend in ("cython", "python"):
        if backend == "cython" and BACKEND != "cython":
            rows[backend] = float("nan")
            continue
        thomas_solve(lower, diag, upper, rhs, backend=backend)  # warm up
        t0 = time.perf_counter()
        for _ in range(repeats):
            thomas_solve(lower, diag, upper, rhs, backend=backend)
        rows[backend] = (time.perf_counter() - t0) / repeats
    return rows


def main():
    print(f"active backend: {BACKEND}")
    print(f"{'n_sys':>6} {'n_y':>6} {'cython':>12} {'python':>12} {'speedup':>8}")
    for n_sys, n in [(16, 65), (16, 129), (32, 257), (64, 257), (64, 513)]:
        rows = bench(n_sys, n)
        cy, py = rows["cython"], rows["python"]
        speedup = py / cy if cy == cy and cy > 0 else float("nan")
        print(
            f"{n_sys:>6} {n:>6} {cy * 1e6:>10.1f}us {py * 1e6:>10.1f}us "
            f"{speedup:>7.1f}x"
        )


if __name__ == "__main__":
    main()
