"""Dense two-phase tableau simplex.

Solves   maximize c.x   subject to   A x <= b,  e.x = f,  x >= 0
with a single equality row, which is all the inference LP needs.  The
tableau is kept dense; pivots use Dantzig's rule and fall back to Bland's
rule once a run of degenerate pivots is detected, which guarantees
termination.  All comparisons use an absolute tolerance of 1e-9.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

TOL = 1e-9
_DEGENERATE_RUN = 60

STATUS_OPTIMAL = "optimal"
STATUS_INFEASIBLE = "infeasible"
STATUS_UNBOUNDED = "unbounded"
STATUS_ITERATION_LIMIT = "iteration_limit"


@dataclass
class SimplexResult:
    status: str
    optimum: Optional[float]
    solution: Optional[np.ndarray]
    iterations: int


def _pivot(tab: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    tab[row] /= tab[row, col]
    coeffs = tab[:, col].copy()
    coeffs[row] = 0.0
    tab -= np.outer(coeffs, tab[row])
    basis[row] = col


def _run(tab, basis, cost_row, ncols, allowed, max_iter, start_iter):
    """Drive one phase to optimality.  Returns (status, iterations)."""
    iters = start_iter
    degenerate = 0
    bland = False
    while True:
        if iters >= max_iter:
            return STATUS_ITERATION_LIMIT, iters
        costs = tab[cost_row, :ncols]
        if bland:
            candidates = np.flatnonzero((costs < -TOL) & allowed)
            if candidates.size == 0:
                return STATUS_OPTIMAL, iters
            col = int(candidates[0])
        else:
            masked = np.where(allowed, costs, np.inf)
            col = int(np.argmin(masked))
            if masked[col] >= -TOL:
                return STATUS_OPTIMAL, iters
        ratios = np.full(tab.shape[0] - 2, np.inf)
        np.divide(tab[:-2, -1], tab[:-2, col], out=ratios, where=tab[:-2, col] > TOL)
        row = int(np.argmin(ratios))
        if not np.isfinite(ratios[row]):
            return STATUS_UNBOUNDED, iters
        if bland:
            # Anti-cycling needs ties broken by smallest basic variable.
            tied = np.flatnonzero(ratios <= ratios[row] + TOL)
            row = int(tied[np.argmin(basis[tied])])
        if ratios[row] <= TOL:
            degenerate += 1
            if degenerate >= _DEGENERATE_RUN:
                bland = True
        else:
            degenerate = 0
        _pivot(tab, basis, row, col)
        iters += 1


def simplex_solve(
    c: np.ndarray,
    a_ub: np.ndarray,
    b_ub: np.ndarray,
    e_eq: np.ndarray,
    f_eq: float,
    max_iter: Optional[int] = None,
) -> SimplexResult:
    """Two-phase simplex; see the module docstring for the problem form."""
    c = np.asarray(c, dtype=np.float64)
    a_ub = np.asarray(a_ub, dtype=np.float64)
    b_ub = np.asarray(b_ub, dtype=np.float64)
    e_eq = np.asarray(e_eq, dtype=np.float64)
    nvar = c.size
    nub = a_ub.shape[0]
    nrows = nub + 1
    if max_iter is None:
        max_iter = max(5000, 50 * (nrows + nvar))

    # Inequality rows must have nonnegative right-hand sides for the
    # slack basis to start feasible; the inference LP always has b = 0.
    if np.any(b_ub < -TOL) or f_eq < 0:
        raise ValueError("right-hand sides must be nonnegative")

    # Columns: structurals | slacks | artificial | rhs.  Final two rows
    # hold the phase-2 and phase-1 cost rows, in that order.
    ncols = nvar + nub + 1
    tab = np.zeros((nrows + 2, ncols + 1))
    tab[:nub, :nvar] = a_ub
    tab[:nub, nvar : nvar + nub] = np.eye(nub)
    tab[:nub, -1] = np.maximum(b_ub, 0.0)
    tab[nub, :nvar] = e_eq
    tab[nub, nvar + nub] = 1.0
    tab[nub, -1] = f_eq
    tab[-2, :nvar] = -c
    # Phase-1 objective: minimize the artificial, whose reduced costs are
    # obtained by pricing out the equality row it starts basic in.
    tab[-1] = -tab[nub]
    tab[-1, nvar + nub] = 0.0

    basis = np.concatenate(
        [np.arange(nvar, nvar + nub), np.array([nvar + nub])]
    )
    allowed = np.ones(ncols, dtype=bool)

    status, iters = _run(tab, basis, -1, ncols, allowed, max_iter, 0)
    if status != STATUS_OPTIMAL:
        return SimplexResult(status=status, optimum=None, solution=None, iterations=iters)
    if tab[-1, -1] < -TOL:
        return SimplexResult(
            status=STATUS_INFEASIBLE, optimum=None, solution=None, iterations=iters
        )

    art = nvar + nub
    allowed[art] = False
    where = np.flatnonzero(basis == art)
    if where.size:
        # Artificial stuck in the basis at zero level: swap it for any
        # usable column so phase 2 never touches it.
        row = int(where[0])
        for col in range(ncols):
            if allowed[col] and abs(tab[row, col]) > TOL:
                _pivot(tab, basis, row, col)
                break

    status, iters = _run(tab, basis, -2, ncols, allowed, max_iter, iters)
    if status != STATUS_OPTIMAL:
        return SimplexResult(status=status, optimum=None, solution=None, iterations=iters)

    x = np.zeros(ncols)
    x[basis] = tab[:-2, -1]
    solution = x[:nvar]
    return SimplexResult(
        status=STATUS_OPTIMAL,
        optimum=float(c @ solution),
        solution=solution,
        iterations=iters,
    )
