# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled simplex pivot loop.

Mirrors ucdispatch._simplex_py.pivot_loop exactly; the build disables FMA
contraction so both kernels produce identical floating-point trajectories.
"""

OPTIMAL = 0
UNBOUNDED = 1
ITER_LIMIT = 2


def pivot_loop(double[:, ::1] tableau, long long[::1] basis,
               unsigned char[::1] allowed, double tol, long max_iter):
    cdef Py_ssize_t m = tableau.shape[0] - 1
    cdef Py_ssize_t width = tableau.shape[1]
    cdef Py_ssize_t ncols = width - 1
    cdef Py_ssize_t i, j, k, col, row
    cdef long iters = 0
    cdef double entry, ratio, best_ratio, factor, pivot

    while iters < max_iter:
        # Bland: first allowed column with negative reduced cost
        col = -1
        for j in range(ncols):
            if allowed[j] and tableau[m, j] < -tol:
                col = j
                break
        if col < 0:
            return OPTIMAL, iters

        # ratio test; ties broken by the smallest basic column index
        row = -1
        best_ratio = 0.0
        for i in range(m):
            entry = tableau[i, col]
            if entry > tol:
                ratio = tableau[i, ncols] / entry
                if row < 0 or ratio < best_ratio or (
                        ratio == best_ratio and basis[i] < basis[row]):
                    best_ratio = ratio
                    row = i
        if row < 0:
            return UNBOUNDED, iters

        pivot = tableau[row, col]
        for k in range(width):
            tableau[row, k] /= pivot
        for i in range(m + 1):
            if i == row:
                continue
            factor = tableau[i, col]
            if factor != 0.0:
                for k in range(width):
                    tableau[i, k] -= factor * tableau[row, k]
        basis[row] = col
        iters += 1
    return ITER_LIMIT, iters
