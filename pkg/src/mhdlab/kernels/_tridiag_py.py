"""Pure-numpy fallback for the batched Thomas solver.

Same contract as the compiled kernel: sweeps are vectorized across the
systems axis, looping only over the (short) banded dimension.
"""

import numpy as np


def solve_batched(lower, diag, upper, rhs, out, work):
    n = diag.shape[1]
    piv = diag[:, 0]
    bad = _first_bad(piv)
    if bad >= 0:
        return bad
    work[:, 0] = upper[:, 0] / piv
    out[:, 0] = rhs[:, 0] / piv
    for j in range(1, n):
        piv = diag[:, j] - lower[:, j] * work[:, j - 1]
        bad = _first_bad(piv)
        if bad >= 0:
            return bad
        work[:, j] = upper[:, j] / piv
        out[:, j] = (rhs[:, j] - lower[:, j] * out[:, j - 1]) / piv
    for j in range(n - 2, -1, -1):
        out[:, j] -= work[:, j] * out[:, j + 1]
    return -1


def _first_bad(piv):
    mask = (piv == 0.0) | np.isnan(piv)
    if mask.any():
        return int(np.argmax(mask))
    return -1
