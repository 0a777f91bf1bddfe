"""Heavy-tailed random graph model: weight sampling, kernel, realization.

Vertex weights are exact Pareto on [1, inf) with tail exponent alpha in
(1, 2), so the tail is P(W > x) = x**-alpha and the mean is mu =
alpha/(alpha-1).  Edges appear independently with probability
min(w_i*w_j/(mu*n), 1).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _fastpath
from .errors import ParameterError
from .rng import as_generator


def check_alpha(alpha: float) -> float:
    if not (1.0 < alpha < 2.0):
        raise ParameterError(f"tail exponent must lie in (1, 2), got {alpha}")
    return float(alpha)


def mean_weight(alpha: float) -> float:
    """Mean of the Pareto(alpha) weight law on [1, inf)."""
    check_alpha(alpha)
    return alpha / (alpha - 1.0)


def pareto_inverse_cdf(u, alpha: float):
    """Map tail probability u in (0, 1] to the weight x with P(W > x) = u.

    Monotone decreasing in u; equals u**(-1/alpha), always >= 1.
    """
    check_alpha(alpha)
    ua = np.asarray(u, dtype=float)
    if np.any(ua <= 0.0) or np.any(ua > 1.0):
        raise ParameterError("u must lie in (0, 1]")
    out = ua ** (-1.0 / alpha)
    return float(out) if np.isscalar(u) or ua.ndim == 0 else out


@dataclass(frozen=True)
class WeightVector:
    """n positive vertex weights plus the exponent that generated them."""

    weights: np.ndarray
    alpha: float

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size < 1:
            raise ParameterError("weights must be a nonempty 1-d array")
        if np.any(w < 1.0):
            raise ParameterError("all weights must be >= 1")
        check_alpha(self.alpha)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return int(self.weights.size)


def sample_weights(n: int, alpha: float, seed) -> WeightVector:
    """n i.i.d. Pareto(alpha) weights, bit-identical for equal (seed, stream)."""
    check_alpha(alpha)
    if n < 1:
        raise ParameterError(f"need n >= 1 vertices, got {n}")
    rng = as_generator(seed)
    u = 1.0 - rng.random(n)  # uniform on (0, 1]
    return WeightVector(u ** (-1.0 / alpha), alpha)


def edge_probability(wi: float, wj: float, n: int, alpha: float) -> float:
    """Connection kernel min(wi*wj/(mu*n), 1)."""
    if wi < 1.0 or wj < 1.0:
        raise ParameterError("weights must be >= 1")
    if n < 2:
        raise ParameterError("need n >= 2")
    return min(wi * wj / (mean_weight(alpha) * n), 1.0)


class GraphSample:
    """Realized simple undirected graph on vertices 0..n-1.

    Immutable after construction; adjacency derived structures are cached.
    """

    def __init__(self, n: int, edges: np.ndarray, _trusted: bool = False):
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if edges.size:
            lo = np.minimum(edges[:, 0], edges[:, 1])
            hi = np.maximum(edges[:, 0], edges[:, 1])
            if np.any(lo == hi):
                raise ParameterError("self-loops are not allowed")
            if np.any(lo < 0) or np.any(hi >= n):
                raise ParameterError("edge endpoint out of range")
            edges = np.stack([lo, hi], axis=1)
            if not _trusted:
                edges = np.unique(edges, axis=0)
        self.n = int(n)
        self.edges = edges
        self._neighbor_sets = None
        self._csr = None

    @property
    def edge_count(self) -> int:
        return int(self.edges.shape[0])

    def neighbor_sets(self):
        if self._neighbor_sets is None:
            sets = [set() for _ in range(self.n)]
            for u, v in self.edges:
                sets[u].add(int(v))
                sets[v].add(int(u))
            self._neighbor_sets = sets
        return self._neighbor_sets

    def csr(self):
        """Symmetric adjacency as (indptr, indices) with sorted rows."""
        if self._csr is None:
            n, m = self.n, self.edge_count
            if m:
                src = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
                dst = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
                order = np.lexsort((dst, src))
                indices = np.ascontiguousarray(dst[order])
                counts = np.bincount(src, minlength=n)
            else:
                indices = np.empty(0, dtype=np.int64)
                counts = np.zeros(n, dtype=np.int64)
            indptr = np.zeros(n + 1, dtype=np.int64)
            np.cumsum(counts, out=indptr[1:])
            self._csr = (indptr, indices)
        return self._csr

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.neighbor_sets()[u]

    def degrees(self) -> np.ndarray:
        indptr, _ = self.csr()
        return np.diff(indptr)


def sample_graph(weights: WeightVector, seed) -> GraphSample:
    """Realize the graph: each unordered pair independently with kernel prob.

    Runs in roughly O(n + m) via geometric skip sampling over the
    weight-sorted pair stream, so large sparse instances stay cheap.
    """
    rng = as_generator(seed)
    w = weights.weights
    n = weights.n
    s = mean_weight(weights.alpha) * n
    order = np.argsort(-w, kind="stable")
    ws = np.ascontiguousarray(w[order])

    # generous first estimate of the edge count for buffer sizing
    tot = float(ws.sum())
    m_hat = int(min(n * (n - 1) / 2, tot * tot / (2.0 * s))) + 16
    cap = m_hat + n
    eu = np.empty(cap, dtype=np.int64)
    ev = np.empty(cap, dtype=np.int64)

    if n >= 2:
        i, j = 0, 1
        p = min(ws[0] * ws[1] / s, 1.0)
        ne = 0
        status = _fastpath.NEED_UNIFORMS
        buf = max(4 * m_hat + 2 * n, 1 << 12)
        while status != _fastpath.DONE:
            us = rng.random(buf)
            status, i, j, p, used, ne = _fastpath.mh_sample_kernel(
                ws, s, us, i, j, p, eu, ev, ne
            )
            while status == _fastpath.NEED_CAPACITY:
                cap *= 2
                eu = np.concatenate([eu, np.empty(cap - eu.size, dtype=np.int64)])
                ev = np.concatenate([ev, np.empty(cap - ev.size, dtype=np.int64)])
                status, i, j, p, used2, ne = _fastpath.mh_sample_kernel(
                    ws, s, us[used:], i, j, p, eu, ev, ne
                )
                used += used2
        edges = np.stack([order[eu[:ne]], order[ev[:ne]]], axis=1)
    else:
        edges = np.empty((0, 2), dtype=np.int64)
    return GraphSample(n, edges, _trusted=True)


def plant_hubs(weights: WeightVector, hub_weights) -> WeightVector:
    """Copy of `weights` with the first len(hub_weights) entries overwritten."""
    hubs = np.asarray(hub_weights, dtype=float)
    if hubs.size > weights.n:
        raise ParameterError("more hubs than vertices")
    if hubs.size and np.any(hubs < 1.0):
        raise ParameterError("hub weights must be >= 1")
    w = weights.weights.copy()
    w[: hubs.size] = hubs
    return WeightVector(w, weights.alpha)
