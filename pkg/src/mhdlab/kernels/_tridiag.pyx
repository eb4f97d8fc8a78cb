# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Batched Thomas sweeps: one tridiagonal system per x-column of the strip.

Row j of system i is  lower[i,j]*x[j-1] + diag[i,j]*x[j] + upper[i,j]*x[j+1]
= rhs[i,j]; lower[i,0] and upper[i,n-1] are ignored. Returns -1 on success
or the index of the first system with a vanishing pivot.
"""

import numpy as np

cimport numpy as cnp


def solve_batched(
    double[:, ::1] lower,
    double[:, ::1] diag,
    double[:, ::1] upper,
    double[:, ::1] rhs,
    double[:, ::1] out,
    double[:, ::1] work,
):
    cdef Py_ssize_t n_sys = diag.shape[0]
    cdef Py_ssize_t n = diag.shape[1]
    cdef Py_ssize_t i, j
    cdef double piv
    for i in range(n_sys):
        piv = diag[i, 0]
        if piv == 0.0 or piv != piv:
            return i
        work[i, 0] = upper[i, 0] / piv
        out[i, 0] = rhs[i, 0] / piv
        for j in range(1, n):
            piv = diag[i, j] - lower[i, j] * work[i, j - 1]
            if piv == 0.0 or piv != piv:
                return i
            work[i, j] = upper[i, j] / piv
            out[i, j] = (rhs[i, j] - lower[i, j] * out[i, j - 1]) / piv
        for j in range(n - 2, -1, -1):
            out[i, j] = out[i, j] - work[i, j] * out[i, j + 1]
    return -1
