"""Dense two-phase primal simplex for the exact reference solver.

Solves  min c.x  s.t.  A x (<=,=,>=) b,  x >= 0  with Bland's rule, which
guarantees termination at the price of speed; a hard iteration cap acts as a
cycling guard on top.  The pivot loop runs in a compiled kernel
(ucdispatch._simplex_core) when available and falls back to the NumPy
implementation; set UCDISPATCH_PURE_PYTHON=1 to force the fallback.
"""

from __future__ import annotations

import os
from contextlib import contextmanager
from dataclasses import dataclass

import numpy as np

from . import _simplex_py
from .errors import NumericalFailure

try:
    from . import _simplex_core
except ImportError:  # extension not built
    _simplex_core = None

if os.environ.get("UCDISPATCH_PURE_PYTHON") == "1" or _simplex_core is None:
    _default_kernel = _simplex_py
else:
    _default_kernel = _simplex_core

OPTIMAL = _simplex_py.OPTIMAL
UNBOUNDED = _simplex_py.UNBOUNDED
ITER_LIMIT = _simplex_py.ITER_LIMIT

MAX_ITERATIONS = 100_000


def kernel_name() -> str:
    return "cython" if _default_kernel is _simplex_core else "python"


def available_kernels() -> dict[str, object]:
    kernels = {"python": _simplex_py}
    if _simplex_core is not None:
        kernels["cython"] = _simplex_core
    return kernels


@contextmanager
def use_kernel(name: str):
    """Temporarily select a pivot kernel (benchmarking hook)."""
    global _default_kernel
    previous = _default_kernel
    _default_kernel = available_kernels()[name]
    try:
        yield
    finally:
        _default_kernel = previous


@dataclass
class LpResult:
    status: str               # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None
    objective: float
    iterations: int


def solve_dense_lp(c, A, senses, b, *, tol: float = 1e-9,
                   max_iter: int = MAX_ITERATIONS, kernel: str | None = None) -> LpResult:
    """Solve min c.x s.t. A x (senses) b, x >= 0.

    ``senses`` is a sequence of "<=", "=" or ">=" per row.  Raises
    :class:`NumericalFailure` if the pivot cap is hit.
    """
    impl = available_kernels()[kernel] if kernel else _default_kernel

    c = np.asarray(c, dtype=float)
    A = np.array(A, dtype=float, ndmin=2)
    b = np.array(b, dtype=float)
    n = c.shape[0]
    m = b.shape[0]
    if m == 0:
        if np.any(c < -tol):
            return LpResult("unbounded", None, -np.inf, 0)
        return LpResult("optimal", np.zeros(n), 0.0, 0)

    senses = list(senses)
    A = A.copy()
    # normalize to nonnegative right-hand sides
    flip = {"<=": ">=", ">=": "<=", "=": "="}
    for i in range(m):
        if b[i] < 0.0:
            A[i] = -A[i]
            b[i] = -b[i]
            senses[i] = flip[senses[i]]

    slack_rows = [i for i, s in enumerate(senses) if s == "<="]
    surplus_rows = [i for i, s in enumerate(senses) if s == ">="]
    art_rows = [i for i, s in enumerate(senses) if s in ("=", ">=")]

    n_slack = len(slack_rows)
    n_surplus = len(surplus_rows)
    n_art = len(art_rows)
    art_start = n + n_slack + n_surplus
    total = art_start + n_art

    tableau = np.zeros((m + 1, total + 1))
    tableau[:m, :n] = A
    tableau[:m, -1] = b
    basis = np.full(m, -1, dtype=np.int64)

    for offset, i in enumerate(slack_rows):
        tableau[i, n + offset] = 1.0
        basis[i] = n + offset
    for offset, i in enumerate(surplus_rows):
        tableau[i, n + n_slack + offset] = -1.0
    for offset, i in enumerate(art_rows):
        tableau[i, art_start + offset] = 1.0
        basis[i] = art_start + offset

    allowed = np.ones(total, dtype=np.uint8)
    allowed[art_start:] = 0  # artificials may leave but never re-enter

    iterations = 0
    if n_art:
        # phase 1: minimize the sum of artificial variables
        tableau[m, :] = 0.0
        for i in art_rows:
            tableau[m, :] -= tableau[i, :]
        tableau[m, art_start:total] = 0.0

        status, iters = impl.pivot_loop(tableau, basis, allowed, tol, max_iter)
        iterations += iters
        if status == ITER_LIMIT:
            raise NumericalFailure(f"simplex phase 1 exceeded {max_iter} pivots")
        infeasibility = -tableau[m, -1]
        if infeasibility > 1e-7 * (1.0 + float(np.max(b))):
            return LpResult("infeasible", None, np.inf, iterations)

        # drive leftover artificials out of the basis; drop redundant rows
        redundant = []
        for i in range(m):
            if basis[i] < art_start:
                continue
            pivot_col = -1
            for j in range(art_start):
                if abs(tableau[i, j]) > tol:
                    pivot_col = j
                    break
            if pivot_col < 0:
                redundant.append(i)
                continue
            pivot_row = tableau[i]
            pivot_row /= pivot_row[pivot_col]
            factors = tableau[:, pivot_col].copy()
            factors[i] = 0.0
            tableau -= np.outer(factors, pivot_row)
            basis[i] = pivot_col
        if redundant:
            keep = [i for i in range(m) if i not in set(redundant)]
            tableau = np.ascontiguousarray(tableau[keep + [m]])
            basis = basis[keep].copy()
            m = len(keep)

    # phase 2: the real objective, priced out over the current basis
    tableau[m, :] = 0.0
    tableau[m, :n] = c
    for i in range(m):
        if basis[i] < n and c[basis[i]] != 0.0:
            tableau[m, :] -= c[basis[i]] * tableau[i, :]

    status, iters = impl.pivot_loop(tableau, basis, allowed, tol, max_iter)
    iterations += iters
    if status == ITER_LIMIT:
        raise NumericalFailure(f"simplex phase 2 exceeded {max_iter} pivots")
    if status == UNBOUNDED:
        return LpResult("unbounded", None, -np.inf, iterations)

    x = np.zeros(n)
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = tableau[i, -1]
    return LpResult("optimal", x, float(c @ x), iterations)
