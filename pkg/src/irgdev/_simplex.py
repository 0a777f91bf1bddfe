"""Dense two-phase primal simplex with Bland's anti-cycling rule.

Solves   min c.x  s.t.  A x <= b,  x >= 0   in floating point with a 1e-9
feasibility tolerance.  Problems here are tiny (tens of variables), so a
dense tableau beats anything clever; Bland's rule (lowest-index entering
column, lowest-index basic variable on ratio ties) guarantees termination.
"""

from __future__ import annotations

import numpy as np

OPTIMAL = 0
INFEASIBLE = 1
UNBOUNDED = 2

_TOL = 1e-9


def _pivot(T, obj, basis, row, col):
    piv = T[row, col]
    T[row] /= piv
    coeffs = T[:, col].copy()
    coeffs[row] = 0.0
    T -= np.outer(coeffs, T[row])
    obj -= obj[col] * T[row]
    basis[row] = col


def _iterate(T, obj, basis, allowed, max_iter):
    """Run simplex pivots until optimal/unbounded over the allowed columns."""
    for _ in range(max_iter):
        # Bland: lowest-index column with negative reduced cost
        neg = np.flatnonzero((obj[:-1] < -_TOL) & allowed)
        if neg.size == 0:
            return OPTIMAL
        col = int(neg[0])
        colvals = T[:, col]
        mask = colvals > _TOL
        if not mask.any():
            return UNBOUNDED
        rows = np.flatnonzero(mask)
        ratios = T[rows, -1] / colvals[rows]
        rmin = ratios.min()
        ties = rows[ratios <= rmin + 1e-12]
        row = int(ties[np.argmin(basis[ties])])
        _pivot(T, obj, basis, row, col)
    raise RuntimeError("simplex iteration cap exceeded")


def solve_lp(c, A_ub, b_ub, max_iter=20000):
    """Minimize c.x subject to A_ub x <= b_ub, x >= 0.

    Returns (status, x, value); x and value are None unless status OPTIMAL.
    """
    A = np.array(A_ub, dtype=float)
    b = np.array(b_ub, dtype=float)
    c = np.array(c, dtype=float)
    m, n = A.shape

    flip = b < 0
    A[flip] *= -1.0
    b = np.where(flip, -b, b)
    art_rows = np.flatnonzero(flip)
    n_art = art_rows.size
    N = n + m + n_art

    T = np.zeros((m, N + 1))
    T[:, :n] = A
    T[np.arange(m), n + np.arange(m)] = np.where(flip, -1.0, 1.0)
    for a, i in enumerate(art_rows):
        T[i, n + m + a] = 1.0
    T[:, -1] = b

    basis = n + np.arange(m)
    basis[art_rows] = n + m + np.arange(n_art)

    if n_art:
        # phase 1: minimize the artificial sum
        obj = np.zeros(N + 1)
        obj[n + m : N] = 1.0
        for i in art_rows:
            obj -= T[i]
        allowed = np.ones(N, dtype=bool)
        status = _iterate(T, obj, basis, allowed, max_iter)
        if status != OPTIMAL or -obj[-1] > 1e-7:
            return INFEASIBLE, None, None
        # drive leftover artificials out of the basis where possible
        for i in range(m):
            if basis[i] >= n + m:
                cols = np.flatnonzero(np.abs(T[i, : n + m]) > _TOL)
                if cols.size:
                    dummy = np.zeros(N + 1)
                    _pivot(T, dummy, basis, i, int(cols[0]))
                # else: redundant row; its artificial stays basic at zero and
                # can never change because artificial columns never re-enter

    allowed = np.ones(N, dtype=bool)
    allowed[n + m:] = False

    c_ext = np.zeros(N)
    c_ext[:n] = c
    obj = np.zeros(N + 1)
    obj[:N] = c_ext
    for i in range(m):
        if c_ext[basis[i]] != 0.0:
            obj -= c_ext[basis[i]] * T[i]
    status = _iterate(T, obj, basis, allowed, max_iter)
    if status != OPTIMAL:
        return status, None, None

    x = np.zeros(N)
    x[basis] = T[:, -1]
    return OPTIMAL, x[:n], float(c @ x[:n])
