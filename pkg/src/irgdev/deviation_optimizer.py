"""Exact solvers for the piecewise-linear rate optimization problems.

Three related programs over weight-exponent profiles beta in [0,1]^k for a
connected pattern H with tail exponent alpha in (1, 2):

* typical growth exponent (concave maximization, single LP):
      max  sum_i (1 - alpha*beta_i) + sum_{(i,j) in E} min(beta_i+beta_j-1, 0)

* tail rate of seeing n^gamma copies (<= 0; binary branch per vertex):
      max  sum_i min(1 - alpha*beta_i, 0)
      s.t. sum_i max(1 - alpha*beta_i, 0)
           + sum_{(i,j)} min(beta_i+beta_j-1, 0) >= gamma

* hub-growth exponent when the tail program is infeasible (theta in [0,1]):
      min  theta
      s.t. sum_i max(1 - alpha*beta_i, theta)
           + sum_{(i,j)} min(beta_i+beta_j-1, 0) >= gamma

The max(...) terms make the feasible sets non-convex, so each program is
solved exactly by enumerating the 2^k branch patterns (b_i = 1 means the
vertex term is on its linear branch) and solving one small LP per pattern
with a dense simplex.  Every reported optimum is re-checked against the raw
piecewise functions, and an independent lattice oracle (grid_search_*) is
provided for verification.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import _gridscan
from ._simplex import OPTIMAL, solve_lp
from .errors import BudgetExceededError, ParameterError
from .graph_model import check_alpha
from .subgraph_catalog import SubgraphPattern

_TOL = 1e-9


@dataclass(frozen=True)
class RateResult:
    """Outcome of one exponent optimization."""

    value: Optional[float]
    beta: Optional[tuple]
    feasible: bool
    pattern: Optional[tuple] = None  # branch indicator per vertex
    tight: Optional[bool] = None  # constraint active at the optimum
    heuristic: bool = False

    def to_json_dict(self):
        out = {
            "value": self.value,
            "beta": list(self.beta) if self.beta is not None else None,
            "feasible": self.feasible,
            "pattern": list(self.pattern) if self.pattern is not None else None,
            "tight": self.tight,
        }
        if self.heuristic:
            out["heuristic"] = True
        return out


# ---------------------------------------------------------------------------
# raw piecewise evaluators (ground truth for re-verification and oracles)
# ---------------------------------------------------------------------------


def typical_objective(beta, H: SubgraphPattern, alpha: float) -> float:
    beta = np.asarray(beta, dtype=float)
    val = float(np.sum(1.0 - alpha * beta))
    for u, v in H.edges:
        val += min(beta[u] + beta[v] - 1.0, 0.0)
    return val


def tail_objective(beta, alpha: float) -> float:
    beta = np.asarray(beta, dtype=float)
    return float(np.sum(np.minimum(1.0 - alpha * beta, 0.0)))


def tail_constraint(beta, H: SubgraphPattern, alpha: float) -> float:
    beta = np.asarray(beta, dtype=float)
    val = float(np.sum(np.maximum(1.0 - alpha * beta, 0.0)))
    for u, v in H.edges:
        val += min(beta[u] + beta[v] - 1.0, 0.0)
    return val


def growth_constraint(beta, theta: float, H: SubgraphPattern, alpha: float) -> float:
    beta = np.asarray(beta, dtype=float)
    val = float(np.sum(np.maximum(1.0 - alpha * beta, theta)))
    for u, v in H.edges:
        val += min(beta[u] + beta[v] - 1.0, 0.0)
    return val


# ---------------------------------------------------------------------------
# typical growth exponent (concave -> one LP, no branch patterns)
# ---------------------------------------------------------------------------


def _typical_lp_rows(H: SubgraphPattern, alpha: float):
    """LP data for min alpha*sum(beta) + sum(y) with y_e >= 1-beta_i-beta_j.

    Variables x = (beta_0..beta_{k-1}, y_e...), all >= 0; the typical
    exponent is k - optimum.
    """
    k, m = H.k, H.edge_count
    n = k + m
    rows, rhs = [], []
    for e, (u, v) in enumerate(H.edges):
        r = np.zeros(n)
        r[u] = -1.0
        r[v] = -1.0
        r[k + e] = -1.0
        rows.append(r)
        rhs.append(-1.0)
    for i in range(k):
        r = np.zeros(n)
        r[i] = 1.0
        rows.append(r)
        rhs.append(1.0)
    c = np.zeros(n)
    c[:k] = alpha
    c[k:] = 1.0
    return c, np.array(rows), np.array(rhs)


def _lex_minimize(c, A, b, opt_val, nfix, slack=1e-11):
    """Lexicographically smallest first-nfix coordinates over the face
    {c.x <= opt_val} of the polytope A x <= b."""
    A = list(A)
    b = list(b)
    A.append(np.asarray(c, dtype=float))
    b.append(opt_val + slack)
    n = len(c)
    fixed = []
    for i in range(nfix):
        ci = np.zeros(n)
        ci[i] = 1.0
        status, x, val = solve_lp(ci, np.array(A), np.array(b))
        if status != OPTIMAL:
            raise RuntimeError("lexicographic refinement LP failed")
        fixed.append(val)
        row = np.zeros(n)
        row[i] = 1.0
        A.append(row)
        b.append(val + slack)
    return np.array(fixed)


def solve_typical_exponent(H: SubgraphPattern, alpha: float) -> RateResult:
    """Polynomial growth exponent of the expected copy count, with the
    lexicographically smallest optimizing profile."""
    check_alpha(alpha)
    c, A, b = _typical_lp_rows(H, alpha)
    status, x, val = solve_lp(c, A, b)
    if status != OPTIMAL:
        raise RuntimeError("typical-exponent LP did not solve")
    value = H.k - val
    beta = _lex_minimize(c, A, b, val, H.k)
    raw = typical_objective(beta, H, alpha)
    if abs(raw - value) > 1e-7:
        raise RuntimeError("typical-exponent verification failed")
    return RateResult(value=float(value), beta=tuple(float(x) for x in np.round(beta, 12)),
                      feasible=True)


def check_concentration(H: SubgraphPattern, alpha: float,
                        strict_margin: float = 1e-7) -> bool:
    """True iff every optimizer of the typical-growth program stays strictly
    below 1/alpha in all coordinates (copy counts then concentrate)."""
    check_alpha(alpha)
    c, A, b = _typical_lp_rows(H, alpha)
    status, _, val = solve_lp(c, A, b)
    if status != OPTIMAL:
        raise RuntimeError("typical-exponent LP did not solve")
    n = len(c)
    A_face = np.vstack([A, c[None, :]])
    b_face = np.concatenate([b, [val + 1e-9]])
    thresh = 1.0 / alpha - strict_margin
    for i in range(H.k):
        ci = np.zeros(n)
        ci[i] = -1.0  # maximize beta_i over the optimal face
        status, _, neg_max = solve_lp(ci, A_face, b_face)
        if status != OPTIMAL:
            raise RuntimeError("concentration face LP failed")
        if -neg_max >= thresh:
            return False
    return True


# ---------------------------------------------------------------------------
# tail rate (branch patterns + LP)
# ---------------------------------------------------------------------------


def _tail_lp(H: SubgraphPattern, alpha: float, gamma: float, bits):
    """LP for one branch pattern of the tail-rate program.

    Variables: beta(k), d(k) with d_i = -min(1-alpha beta_i, 0),
    tp/tm(k) with theta_i = tp_i - tm_i, y(m) with y_e = -min(...,0).
    Minimize sum(d); constraint rows as documented in the module header.
    """
    k, m = H.k, H.edge_count
    ib, idd, itp, itm, iy = 0, k, 2 * k, 3 * k, 4 * k
    n = 4 * k + m
    rows, rhs = [], []
    for i in range(k):
        r = np.zeros(n)
        r[ib + i] = alpha
        r[idd + i] = -1.0
        rows.append(r)
        rhs.append(1.0)
    for i in range(k):
        r = np.zeros(n)
        r[itp + i] = 1.0
        r[itm + i] = -1.0
        rows.append(r)
        rhs.append(float(bits[i]))
        r = np.zeros(n)
        r[itp + i] = 1.0
        r[itm + i] = -1.0
        r[ib + i] = alpha
        rows.append(r)
        rhs.append(2.0 - bits[i])
    for e, (u, v) in enumerate(H.edges):
        r = np.zeros(n)
        r[iy + e] = -1.0
        r[ib + u] = -1.0
        r[ib + v] = -1.0
        rows.append(r)
        rhs.append(-1.0)
    r = np.zeros(n)
    r[itp:itp + k] = -1.0
    r[itm:itm + k] = 1.0
    r[iy:iy + m] = 1.0
    rows.append(r)
    rhs.append(-gamma)
    for i in range(k):
        r = np.zeros(n)
        r[ib + i] = 1.0
        rows.append(r)
        rhs.append(1.0)
    c = np.zeros(n)
    c[idd:idd + k] = 1.0
    return c, np.array(rows), np.array(rhs)


def solve_tail_rate(H: SubgraphPattern, alpha: float, gamma: float) -> RateResult:
    """Log-scale rate (always <= 0) of the weight configurations producing
    n^gamma copies of H; infeasibility means no profile achieves gamma."""
    check_alpha(alpha)
    if gamma <= 0:
        raise ParameterError("gamma must be positive")
    k = H.k
    best_val = None
    cands = []
    for bits in itertools.product((0, 1), repeat=k):
        c, A, b = _tail_lp(H, alpha, gamma, bits)
        status, x, val = solve_lp(c, A, b)
        if status != OPTIMAL:
            continue
        value = -val
        if best_val is None or value > best_val + _TOL:
            best_val = value
            cands = [(bits, c, A, b, val)]
        elif value > best_val - _TOL:
            cands.append((bits, c, A, b, val))
    if best_val is None:
        return RateResult(value=None, beta=None, feasible=False)
    best_beta = None
    best_bits = None
    for bits, c, A, b, val in cands:
        beta = _lex_minimize(c, A, b, val, k)
        if best_beta is None or tuple(beta) < tuple(best_beta):
            best_beta = beta
            best_bits = bits
    raw_obj = tail_objective(best_beta, alpha)
    raw_con = tail_constraint(best_beta, H, alpha)
    if abs(raw_obj - best_val) > 1e-7 or raw_con < gamma - 1e-7:
        raise RuntimeError("tail-rate verification failed")
    value = 0.0 if abs(best_val) < _TOL else float(best_val)
    return RateResult(
        value=value,
        beta=tuple(float(x) for x in np.round(best_beta, 12)),
        feasible=True,
        pattern=tuple(best_bits),
        tight=bool(abs(raw_con - gamma) <= 1e-7),
    )


# ---------------------------------------------------------------------------
# hub growth exponent (infeasible tail regime)
# ---------------------------------------------------------------------------


def _growth_lp(H: SubgraphPattern, alpha: float, gamma: float, bits):
    """LP for one branch pattern of the hub-growth program.

    Variables: beta(k), theta(1), tp/tm(k) with t_i = tp_i - tm_i, y(m).
    Minimize theta; b_i = 1 puts vertex i on the 1 - alpha*beta_i branch,
    b_i = 0 on the theta branch.
    """
    k, m = H.k, H.edge_count
    ib, ith, itp, itm, iy = 0, k, k + 1, 2 * k + 1, 3 * k + 1
    n = 3 * k + 1 + m
    rows, rhs = [], []
    for i in range(k):
        r = np.zeros(n)
        r[itp + i] = 1.0
        r[itm + i] = -1.0
        if bits[i]:
            r[ib + i] = alpha
            rows.append(r)
            rhs.append(1.0)
        else:
            r[ith] = -1.0
            rows.append(r)
            rhs.append(0.0)
    for e, (u, v) in enumerate(H.edges):
        r = np.zeros(n)
        r[iy + e] = -1.0
        r[ib + u] = -1.0
        r[ib + v] = -1.0
        rows.append(r)
        rhs.append(-1.0)
    r = np.zeros(n)
    r[itp:itp + k] = -1.0
    r[itm:itm + k] = 1.0
    r[iy:iy + m] = 1.0
    rows.append(r)
    rhs.append(-gamma)
    for i in range(k):
        r = np.zeros(n)
        r[ib + i] = 1.0
        rows.append(r)
        rhs.append(1.0)
    r = np.zeros(n)
    r[ith] = 1.0
    rows.append(r)
    rhs.append(1.0)
    c = np.zeros(n)
    c[ith] = 1.0
    return c, np.array(rows), np.array(rhs)


def solve_hub_growth_exponent(H: SubgraphPattern, alpha: float, gamma: float) -> RateResult:
    """Minimal exponent theta such that n^theta planted top-weight hubs make
    n^gamma copies of H attainable; 0 exactly when the tail program is
    feasible, infeasible when even theta = 1 cannot reach gamma."""
    check_alpha(alpha)
    if gamma <= 0:
        raise ParameterError("gamma must be positive")
    k = H.k
    best_val = None
    cands = []
    for bits in itertools.product((0, 1), repeat=k):
        c, A, b = _growth_lp(H, alpha, gamma, bits)
        status, x, val = solve_lp(c, A, b)
        if status != OPTIMAL:
            continue
        if best_val is None or val < best_val - _TOL:
            best_val = val
            cands = [(bits, c, A, b, val)]
        elif val < best_val + _TOL:
            cands.append((bits, c, A, b, val))
    if best_val is None:
        return RateResult(value=None, beta=None, feasible=False)
    best_beta = None
    best_bits = None
    for bits, c, A, b, val in cands:
        # pin theta at its optimum, then lex-minimize beta
        beta = _lex_minimize(c, A, b, val, k)
        if best_beta is None or tuple(beta) < tuple(best_beta):
            best_beta = beta
            best_bits = bits
    theta = max(float(best_val), 0.0)
    raw_con = growth_constraint(best_beta, theta, H, alpha)
    if raw_con < gamma - 1e-7:
        raise RuntimeError("hub-growth verification failed")
    return RateResult(
        value=theta,
        beta=tuple(float(x) for x in np.round(best_beta, 12)),
        feasible=True,
        pattern=tuple(best_bits),
        tight=bool(abs(raw_con - gamma) <= 1e-7),
    )


# ---------------------------------------------------------------------------
# generalized local-statistic hook
# ---------------------------------------------------------------------------


@dataclass
class ExponentFunction:
    """Growth exponent g(beta) of a local vertex statistic.

    When the statistic is a plain copy count of a pattern, set edge_pattern
    and the exact pattern machinery is used; otherwise a budgeted lattice
    search plus coordinate refinement runs on the black-box callable.
    """

    fn: Callable[[np.ndarray], float]
    k: int
    concave: bool = False
    edge_pattern: Optional[SubgraphPattern] = None
    budget: int = 200_000


def solve_tail_rate_general(g: ExponentFunction, alpha: float, gamma: float) -> RateResult:
    """Tail rate with a general exponent function in the constraint:
    max sum(min(1-alpha beta_i, 0)) s.t. sum(max(1-alpha beta_i, 0)) + g >= gamma."""
    check_alpha(alpha)
    if g.edge_pattern is not None:
        return solve_tail_rate(g.edge_pattern, alpha, gamma)
    k = g.k
    G0 = max(10, int(round(g.budget ** (1.0 / k))) - 1)
    levels = np.linspace(0.0, 1.0, G0 + 1)
    best = None  # (objective, beta)
    evals = 0
    for combo in itertools.product(levels, repeat=k):
        beta = np.array(combo)
        evals += 1
        if evals > g.budget:
            break
        con = float(np.maximum(1 - alpha * beta, 0).sum()) + float(g.fn(beta))
        if con >= gamma - _TOL:
            obj = tail_objective(beta, alpha)
            if best is None or obj > best[0]:
                best = (obj, beta)
    if best is None:
        return RateResult(value=None, beta=None, feasible=False, heuristic=True)
    obj, beta = best
    # coordinate refinement
    for _ in range(4):
        improved = False
        for i in range(k):
            span = np.linspace(0.0, 1.0, 401)
            trial = np.repeat(beta[None, :], span.size, axis=0)
            trial[:, i] = span
            for b in trial:
                con = float(np.maximum(1 - alpha * b, 0).sum()) + float(g.fn(b))
                if con >= gamma - _TOL:
                    o = tail_objective(b, alpha)
                    if o > obj + 1e-12:
                        obj, beta = o, b.copy()
                        improved = True
        if not improved:
            break
    return RateResult(
        value=float(obj),
        beta=tuple(float(x) for x in np.round(beta, 12)),
        feasible=True,
        heuristic=True,
    )


# ---------------------------------------------------------------------------
# lattice oracles
# ---------------------------------------------------------------------------


def grid_search_tail_rate(H: SubgraphPattern, alpha: float, gamma: float,
                          G: int = 100) -> RateResult:
    """Independent lattice oracle: exact optimum of the tail-rate program
    restricted to {0, 1/G, ..., 1}^k (G even).  The lattice value lies within
    k*(alpha+2)/G of the continuum optimum."""
    res = grid_search_tail_rate_multi(H, alpha, [gamma], G)[0]
    return res


def grid_search_tail_rate_multi(H: SubgraphPattern, alpha: float,
                                gammas: Sequence[float], G: int = 100):
    check_alpha(alpha)
    for gamma in gammas:
        if gamma <= 0:
            raise ParameterError("gamma must be positive")
    if (G + 1) ** H.k > 1e12:
        raise BudgetExceededError("grid oracle budget exceeded")
    adj = H.adjacency_sets()
    raw = _gridscan.grid_tail_rate(adj, alpha, gammas, G)
    out = []
    for r in raw:
        if r is None:
            out.append(RateResult(value=None, beta=None, feasible=False))
        else:
            val, prof = r
            out.append(RateResult(value=float(val), beta=tuple(float(x) for x in prof),
                                  feasible=True))
    return out


def grid_search_typical_exponent(H: SubgraphPattern, alpha: float,
                                 G: int = 200) -> RateResult:
    """Exact lattice maximum of the typical-growth objective (concave, so the
    candidate scan is exact)."""
    check_alpha(alpha)
    val, prof = _gridscan.grid_typical_exponent(H.adjacency_sets(), alpha, G)
    return RateResult(value=float(val), beta=tuple(float(x) for x in prof), feasible=True)
