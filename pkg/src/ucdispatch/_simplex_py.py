"""Pure-NumPy pivot loop, the fallback for the compiled kernel.

Both kernels must make bit-identical pivot decisions: the same Bland entering
rule (first allowed column with reduced cost below -tol), the same ratio test
(minimal ratio, ties broken by the smallest basic column index), and the same
elimination order.  Keep any change here in sync with _simplex_core.pyx.
"""

import numpy as np

OPTIMAL = 0
UNBOUNDED = 1
ITER_LIMIT = 2


def pivot_loop(tableau, basis, allowed, tol, max_iter):
    """Run simplex pivots in place until optimal, unbounded or the cap.

    ``tableau`` is (m+1) x (ncols+1): m constraint rows plus the reduced-cost
    row, last column holds the right-hand sides and minus the objective.
    Returns (status, iterations).
    """
    m = tableau.shape[0] - 1
    cost = tableau[m]
    mask = allowed.astype(bool)
    iters = 0
    while iters < max_iter:
        entering = np.flatnonzero(mask & (cost[:-1] < -tol))
        if entering.size == 0:
            return OPTIMAL, iters
        col = int(entering[0])

        column = tableau[:m, col]
        candidates = np.flatnonzero(column > tol)
        if candidates.size == 0:
            return UNBOUNDED, iters
        ratios = tableau[candidates, -1] / column[candidates]
        best = ratios.min()
        ties = candidates[ratios == best]
        row = int(ties[np.argmin(basis[ties])]) if ties.size > 1 else int(ties[0])

        pivot_row = tableau[row]
        pivot_row /= pivot_row[col]
        factors = tableau[:, col].copy()
        factors[row] = 0.0
        tableau -= np.outer(factors, pivot_row)
        basis[row] = col
        iters += 1
    return ITER_LIMIT, iters
