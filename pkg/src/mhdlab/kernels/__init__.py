"""Hot kernels with import-time backend selection.

The compiled Cython sweep is preferred; a pure-numpy implementation with
the identical contract is the fallback, so the package works from a source
checkout without a C toolchain. `BACKEND` records which one is active and
benchmarks/bench_tridiag.py compares the two.
"""

import numpy as np

try:  # pragma: no cover - depends on build environment
    from ._tridiag import solve_batched as _solve_batched

    BACKEND = "cython"
except ImportError:  # pragma: no cover
    from ._tridiag_py import solve_batched as _solve_batched

    BACKEND = "python"

from ._tridiag_py import solve_batched as solve_batched_python


class TridiagonalFailure(RuntimeError):
    """A column produced a singular/non-finite pivot during the sweep."""

    def __init__(self, column: int):
        self.column = column
        super().__init__(f"tridiagonal sweep failed in x-column {column}")


def thomas_solve(lower, diag, upper, rhs, backend=None):
    """Solve the batch of tridiagonal systems, one per leading-axis row."""
    lower = np.ascontiguousarray(lower, dtype=float)
    diag = np.ascontiguousarray(diag, dtype=float)
    upper = np.ascontiguousarray(upper, dtype=float)
    rhs = np.ascontiguousarray(rhs, dtype=float)
    out = np.empty_like(rhs)
    work = np.empty_like(rhs)
    impl = _solve_batched if backend is None else (
        solve_batched_python if backend == "python" else _solve_batched
    )
    bad = impl(lower, diag, upper, rhs, out, work)
    if bad >= 0:
        raise TridiagonalFailure(bad)
    return out
