"""Exact lattice optimization used as the independent oracle for rate values.

The search space is the lattice {0, 1/G, ..., 1}^k.  A brute-force sweep is
hopeless at G = 100, k = 5, so the scan decomposes by the hub set
T = {i : beta_i > 1/alpha}:

* the objective sum(min(1 - alpha*beta_i, 0)) depends only on hub levels,
  and is a decreasing function of their sum;
* pairs of hub levels always saturate the edge term (beta_i + beta_j > 2/alpha
  >= 1), so hubs never interact with each other;
* with hub levels fixed, maximizing the constraint over the non-hub block is
  a CONCAVE piecewise-linear problem (the vertex terms are linear below
  1/alpha), so its exact optimum is attained with every non-hub level in the
  closure of {0, l_alpha, G/2, G - l_alpha} u {G - l_h : h hub} under
  s -> clip(G - s, 0, l_alpha).  G must be even so that the odd-cycle anchor
  G/2 is on the lattice.

This makes the sweep exact at a cost that is polynomial in G for the hub
blocks plus a constant-size candidate scan for the non-hub block, and it is
validated against literal brute force at small G in the test suite.
"""

from __future__ import annotations

import itertools

import numpy as np

from .errors import ParameterError

_TOL = 1e-9


def _level_tables(alpha: float, G: int):
    levels = np.arange(G + 1) / G
    vtab = np.maximum(1.0 - alpha * levels, 0.0)
    otab = np.minimum(1.0 - alpha * levels, 0.0)
    wsum = np.minimum(np.arange(2 * G + 1) / G - 1.0, 0.0)
    l_alpha = int(np.floor(G / alpha + 1e-12))
    return vtab, otab, wsum, l_alpha


def _nonhub_candidates(G: int, l_alpha: int, hub_levels) -> np.ndarray:
    base = {0, l_alpha, G // 2, min(max(G - l_alpha, 0), l_alpha)}
    for h in hub_levels:
        base.add(min(max(G - int(h), 0), l_alpha))
    # close under s -> clip(G - s)
    while True:
        extra = {min(max(G - s, 0), l_alpha) for s in base} - base
        if not extra:
            break
        base |= extra
    return np.array(sorted(base), dtype=np.int64)


def _scan_assignments(H_adj, T, hub_assign, vtab, wsum, G, l_alpha):
    """Max constraint over the non-hub block for each hub assignment row.

    hub_assign: (M, t) int array of hub levels for the vertices in T.
    Returns (cmax (M,), best combo index (M,), candidate matrix (M, ncand)).
    """
    k = len(H_adj)
    t = len(T)
    M = hub_assign.shape[0]
    nh = [v for v in range(k) if v not in T]
    hub_pos = {v: a for a, v in enumerate(T)}

    # candidate level matrix, fixed columns first then one per hub
    fixed = np.array(
        sorted({0, l_alpha, G // 2, min(max(G - l_alpha, 0), l_alpha)}), dtype=np.int64
    )
    ncand = fixed.size + t
    V = np.empty((M, ncand), dtype=np.int64)
    V[:, : fixed.size] = fixed[None, :]
    for a in range(t):
        V[:, fixed.size + a] = np.clip(G - hub_assign[:, a], 0, l_alpha)

    if not nh:
        # all vertices are hubs: vertex terms vanish, hub pairs saturate
        return np.zeros(M), np.zeros(M, dtype=np.int64), V

    cmax = np.full(M, -np.inf)
    carg = np.zeros(M, dtype=np.int64)
    nh_index = {v: i for i, v in enumerate(nh)}
    nh_edges = []
    hub_edges = []  # (nh position, hub column in hub_assign)
    for u in range(k):
        for v in H_adj[u]:
            if v <= u:
                continue
            if u in nh_index and v in nh_index:
                nh_edges.append((nh_index[u], nh_index[v]))
            elif u in nh_index:
                hub_edges.append((nh_index[u], hub_pos[v]))
            elif v in nh_index:
                hub_edges.append((nh_index[v], hub_pos[u]))
            # hub-hub edges always contribute zero

    for ci, combo in enumerate(itertools.product(range(ncand), repeat=len(nh))):
        vals = V[:, list(combo)]  # (M, nh)
        c = vtab[vals].sum(axis=1)
        for a, b in nh_edges:
            c += wsum[vals[:, a] + vals[:, b]]
        for a, h in hub_edges:
            c += wsum[vals[:, a] + hub_assign[:, h]]
        better = c > cmax
        cmax[better] = c[better]
        carg[better] = ci
    return cmax, carg, V


def _profile_from(T, hub_row, carg_combo, V_row, nh, k):
    prof = np.zeros(k, dtype=np.int64)
    for a, v in enumerate(T):
        prof[v] = hub_row[a]
    combo = carg_combo
    for i, v in enumerate(nh):
        prof[v] = V_row[combo[i]]
    return prof


def grid_tail_rate(adj, alpha, gammas, G):
    """Exact lattice solutions of the tail-rate problem for several gammas.

    adj: adjacency sets of the pattern on vertices 0..k-1.
    Returns a list aligned with `gammas` of (value, profile levels/G) or None
    when no lattice point satisfies the constraint.
    """
    k = len(adj)
    if G < 10:
        raise ParameterError("grid resolution must be at least 10")
    if G % 2:
        raise ParameterError("grid resolution must be even")
    if (G + 1) ** k > 1e12:
        raise ParameterError("grid budget exceeded")
    vtab, otab, wsum, l_alpha = _level_tables(alpha, G)
    if l_alpha >= G:
        raise ParameterError("alpha too small for this grid")
    gammas = list(gammas)
    results: list = [None] * len(gammas)

    # hub-free block: value 0 when feasible
    cand0 = _nonhub_candidates(G, l_alpha, ())
    empty = np.zeros((1, 0), dtype=np.int64)
    cmax0 = -np.inf
    best_combo0 = None
    for combo in itertools.product(cand0.tolist(), repeat=k):
        c = vtab[np.array(combo)].sum()
        for u in range(k):
            for v in adj[u]:
                if v > u:
                    c += wsum[combo[u] + combo[v]]
        if c > cmax0:
            cmax0, best_combo0 = c, combo
    for gi, g in enumerate(gammas):
        if cmax0 >= g - _TOL:
            results[gi] = (0.0, np.array(best_combo0) / G)

    hub_range = np.arange(l_alpha + 1, G + 1, dtype=np.int64)
    nlev = hub_range.size

    for t in range(1, k + 1):
        o_best = t * otab[l_alpha + 1]
        needed = [
            gi
            for gi in range(len(gammas))
            if results[gi] is None or results[gi][0] < o_best - 1e-12
        ]
        if not needed:
            break
        for T in itertools.combinations(range(k), t):
            nh = [v for v in range(k) if v not in T]
            # quick feasibility ceiling: all hubs at the top level
            top = np.full((1, t), G, dtype=np.int64)
            ctop, _, _ = _scan_assignments(adj, T, top, vtab, wsum, G, l_alpha)
            gneed = [gi for gi in needed if ctop[0] >= gammas[gi] - _TOL]
            if not gneed:
                continue
            if t <= 3 and nlev**t <= 200_000:
                mesh = np.stack(
                    np.meshgrid(*([hub_range] * t), indexing="ij"), axis=-1
                ).reshape(-1, t)
                cmax, carg, V = _scan_assignments(adj, T, mesh, vtab, wsum, G, l_alpha)
                lsum = mesh.sum(axis=1)
                for gi in gneed:
                    feas = cmax >= gammas[gi] - _TOL
                    if not feas.any():
                        continue
                    idx = np.flatnonzero(feas)
                    best = idx[np.argmin(lsum[idx])]
                    val = float(otab[mesh[best]].sum())
                    if results[gi] is None or val > results[gi][0] + 1e-12:
                        combo = list(
                            itertools.product(range(V.shape[1]), repeat=len(nh))
                        )[carg[best]]
                        prof = _profile_from(T, mesh[best], combo, V[best], nh, k)
                        results[gi] = (val, prof / G)
            else:
                # deep hub sets: ascend by level sum, stop at first feasible
                open_g = set(gneed)
                for L in range(t * (l_alpha + 1), t * G + 1):
                    if not open_g:
                        break
                    # objective is linear in the level sum, equal on the layer
                    val_at_L = t - alpha * L / G
                    for gi in list(open_g):
                        if results[gi] is not None and results[gi][0] >= val_at_L - 1e-12:
                            open_g.discard(gi)
                    if not open_g:
                        break
                    rows = list(_compositions(L, t, l_alpha + 1, G))
                    if not rows:
                        continue
                    batch = np.array(rows, dtype=np.int64)
                    cmax, carg, V = _scan_assignments(
                        adj, T, batch, vtab, wsum, G, l_alpha
                    )
                    for gi in list(open_g):
                        feas = cmax >= gammas[gi] - _TOL
                        if feas.any():
                            best = int(np.flatnonzero(feas)[0])
                            val = float(otab[batch[best]].sum())
                            if results[gi] is None or val > results[gi][0] + 1e-12:
                                combo = list(
                                    itertools.product(range(V.shape[1]), repeat=len(nh))
                                )[carg[best]]
                                prof = _profile_from(
                                    T, batch[best], combo, V[best], nh, k
                                )
                                results[gi] = (val, prof / G)
                            open_g.discard(gi)
    return results


def _compositions(total, parts, lo, hi):
    """Ordered tuples of `parts` ints in [lo, hi] summing to `total`."""
    if parts == 1:
        if lo <= total <= hi:
            yield (total,)
        return
    first_lo = max(lo, total - (parts - 1) * hi)
    first_hi = min(hi, total - (parts - 1) * lo)
    for x in range(first_lo, first_hi + 1):
        for rest in _compositions(total - x, parts - 1, lo, hi):
            yield (x,) + rest


def grid_typical_exponent(adj, alpha, G):
    """Exact lattice maximum of the hub-free growth objective
    sum(1 - alpha*beta_i) + sum_edges min(beta_i + beta_j - 1, 0).

    The objective is concave, so the exact optimum is attained on the
    candidate set {0, G/2, G} per coordinate.
    """
    if G % 2:
        raise ParameterError("grid resolution must be even")
    k = len(adj)
    cands = (0, G // 2, G)
    best = -np.inf
    best_combo = None
    for combo in itertools.product(cands, repeat=k):
        val = sum(1.0 - alpha * c / G for c in combo)
        for u in range(k):
            for v in adj[u]:
                if v > u:
                    val += min((combo[u] + combo[v]) / G - 1.0, 0.0)
        if val > best:
            best, best_combo = val, combo
    return float(best), np.array(best_combo) / G


def brute_tail_rate(adj, alpha, gamma, G):
    """Literal lattice sweep (small k*G only); ground truth for tests."""
    k = len(adj)
    if (G + 1) ** k > 4e7:
        raise ParameterError("brute-force grid too large")
    levels = np.arange(G + 1) / G
    grids = np.meshgrid(*([levels] * k), indexing="ij")
    beta = np.stack([g.ravel() for g in grids], axis=1)
    obj = np.minimum(1 - alpha * beta, 0).sum(axis=1)
    con = np.maximum(1 - alpha * beta, 0).sum(axis=1)
    for u in range(k):
        for v in adj[u]:
            if v > u:
                con += np.minimum(beta[:, u] + beta[:, v] - 1.0, 0.0)
    feas = con >= gamma - _TOL
    if not feas.any():
        return None
    idx = np.flatnonzero(feas)
    best = idx[np.argmax(obj[idx])]
    return float(obj[best]), beta[best]


def brute_hub_growth(adj, alpha, gamma, G):
    """Brute lattice-in-beta minimum of the hub-count growth exponent, with
    the optimal theta solved exactly per point.  Test oracle for small k."""
    k = len(adj)
    if (G + 1) ** k > 4e7:
        raise ParameterError("brute-force grid too large")
    levels = np.arange(G + 1) / G
    grids = np.meshgrid(*([levels] * k), indexing="ij")
    beta = np.stack([g.ravel() for g in grids], axis=1)
    w = np.zeros(beta.shape[0])
    for u in range(k):
        for v in adj[u]:
            if v > u:
                w += np.minimum(beta[:, u] + beta[:, v] - 1.0, 0.0)
    m = 1.0 - alpha * beta  # (N, k)
    r = gamma - w
    # minimal theta >= 0 with sum(max(m_i, theta)) >= r, theta <= 1
    msort = np.sort(m, axis=1)[:, ::-1]
    f0 = np.maximum(msort, 0.0).sum(axis=1)
    theta = np.full(beta.shape[0], np.inf)
    theta[f0 >= r - _TOL] = 0.0
    # with j coordinates on the theta branch (the j smallest),
    # f(theta) = prefix_sum(k-j largest) + j*theta
    prefix = np.concatenate(
        [np.zeros((msort.shape[0], 1)), np.cumsum(msort, axis=1)], axis=1
    )
    for j in range(1, k + 1):
        keep = prefix[:, k - j]
        cand = (r - keep) / j
        lo = msort[:, k - j]  # theta must be >= all replaced m_i
        hi = msort[:, k - j - 1] if j < k else np.full(len(cand), np.inf)
        ok = (cand >= lo - 1e-12) & (cand <= hi + 1e-12) & (cand >= -1e-12)
        cand = np.clip(cand, 0.0, None)
        theta = np.where(ok & (cand < theta), cand, theta)
    theta = np.where(theta <= 1.0 + 1e-12, theta, np.inf)
    if not np.isfinite(theta).any():
        return None
    best = int(np.argmin(theta))
    return float(theta[best]), beta[best]
