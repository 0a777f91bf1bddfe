"""Small pattern graphs: canonical forms, enumeration, and exact counting.

Patterns live on vertex set 0..k-1 (k <= 8).  The canonical code is the
minimal upper-triangle adjacency bitmask over all k! relabelings, so two
patterns are isomorphic iff their codes match.  Counting in a realized graph
is exact: cliques via degeneracy-ordered neighborhood intersection, general
patterns via backtracking over injective embeddings divided by the
automorphism count.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _fastpath
from .errors import ParameterError
from .graph_model import GraphSample

MAX_PATTERN_VERTICES = 8


def _pair_index_table(k: int):
    """Map unordered pair -> bit position, in row-major upper-triangle order."""
    idx = {}
    t = 0
    for i in range(k):
        for j in range(i + 1, k):
            idx[(i, j)] = t
            t += 1
    return idx


@lru_cache(maxsize=8)
def _perm_tables(k: int):
    """(perms, code_weights, bit_source) for all k! relabelings.

    bit_source[p, t] is the bit position in the original mask that lands in
    bit t after applying permutation p.
    """
    perms = np.array(list(itertools.permutations(range(k))), dtype=np.int64)
    pairs = _pair_index_table(k)
    nbits = k * (k - 1) // 2
    src = np.empty((perms.shape[0], nbits), dtype=np.int64)
    t = 0
    for i in range(k):
        for j in range(i + 1, k):
            a = perms[:, i]
            b = perms[:, j]
            lo = np.minimum(a, b)
            hi = np.maximum(a, b)
            flat = np.array([pairs[(x, y)] for x, y in zip(lo, hi)], dtype=np.int64)
            src[:, t] = flat
            t += 1
    weights = (np.int64(1) << np.arange(nbits, dtype=np.int64))
    return perms, weights, src


def _edges_to_mask(k: int, edges) -> int:
    pairs = _pair_index_table(k)
    mask = 0
    for u, v in edges:
        u, v = int(u), int(v)
        if u == v:
            raise ParameterError("self-loop in pattern")
        if not (0 <= u < k and 0 <= v < k):
            raise ParameterError("pattern edge endpoint out of range")
        lo, hi = (u, v) if u < v else (v, u)
        bit = pairs[(lo, hi)]
        if mask >> bit & 1:
            raise ParameterError("duplicate pattern edge")
        mask |= 1 << bit
    return mask


def _mask_to_edges(k: int, mask: int):
    edges = []
    t = 0
    for i in range(k):
        for j in range(i + 1, k):
            if mask >> t & 1:
                edges.append((i, j))
            t += 1
    return tuple(edges)


def _mask_images(k: int, mask: int) -> np.ndarray:
    """Masks of all k! relabelings of `mask`."""
    _, _, src = _perm_tables(k)
    nbits = src.shape[1]
    images = np.zeros(src.shape[0], dtype=np.int64)
    m = np.int64(mask)
    for t in range(nbits):
        images |= ((m >> src[:, t]) & 1) << t
    return images


def _mask_connected(k: int, mask: int) -> bool:
    adj = [0] * k
    t = 0
    for i in range(k):
        for j in range(i + 1, k):
            if mask >> t & 1:
                adj[i] |= 1 << j
                adj[j] |= 1 << i
            t += 1
    seen = 1
    stack = [0]
    while stack:
        v = stack.pop()
        rest = adj[v] & ~seen
        while rest:
            u = (rest & -rest).bit_length() - 1
            seen |= 1 << u
            stack.append(u)
            rest &= rest - 1
    return seen == (1 << k) - 1


def canonical_form(k: int, edges) -> int:
    """Minimal adjacency bitmask over all relabelings; equal iff isomorphic."""
    if k > MAX_PATTERN_VERTICES:
        raise ParameterError(f"patterns limited to {MAX_PATTERN_VERTICES} vertices")
    if k < 1:
        raise ParameterError("need k >= 1")
    mask = _edges_to_mask(k, edges)
    return int(_mask_images(k, mask).min())


def automorphism_count(k: int, edges) -> int:
    """Number of adjacency-preserving permutations of 0..k-1."""
    if k > MAX_PATTERN_VERTICES:
        raise ParameterError(f"patterns limited to {MAX_PATTERN_VERTICES} vertices")
    mask = _edges_to_mask(k, edges)
    images = _mask_images(k, mask)
    return int(np.count_nonzero(images == mask))


@dataclass(frozen=True)
class SubgraphPattern:
    """Connected simple pattern with its canonical code and |Aut|."""

    k: int
    edges: tuple
    canonical_code: int
    aut_count: int

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def is_clique(self) -> bool:
        return self.edge_count == self.k * (self.k - 1) // 2

    def adjacency_sets(self):
        adj = [set() for _ in range(self.k)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj


def make_pattern(k: int, edges) -> SubgraphPattern:
    if k > MAX_PATTERN_VERTICES:
        raise ParameterError(f"patterns limited to {MAX_PATTERN_VERTICES} vertices")
    mask = _edges_to_mask(k, edges)
    if not _mask_connected(k, mask):
        raise ParameterError("pattern must be connected")
    images = _mask_images(k, mask)
    code = int(images.min())
    aut = int(np.count_nonzero(images == mask))
    norm = tuple(sorted((min(u, v), max(u, v)) for u, v in edges))
    return SubgraphPattern(k=k, edges=norm, canonical_code=code, aut_count=aut)


def clique_pattern(k: int) -> SubgraphPattern:
    return make_pattern(k, list(itertools.combinations(range(k), 2)))


def path_pattern(k: int) -> SubgraphPattern:
    return make_pattern(k, [(i, i + 1) for i in range(k - 1)])


def cycle_pattern(k: int) -> SubgraphPattern:
    return make_pattern(k, [(i, (i + 1) % k) for i in range(k)])


def star_pattern(leaves: int) -> SubgraphPattern:
    return make_pattern(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


@lru_cache(maxsize=8)
def enumerate_connected(k: int):
    """One representative per isomorphism class of connected graphs on k
    vertices, sorted by (edge count, canonical code)."""
    if not (3 <= k <= 7):
        raise ParameterError("catalog enumeration supports 3 <= k <= 7")
    nbits = k * (k - 1) // 2
    seen = np.zeros(1 << nbits, dtype=bool)
    out = []
    for mask in range(1 << nbits):
        if seen[mask]:
            continue
        images = _mask_images(k, mask)
        seen[images] = True
        if _mask_connected(k, mask):
            aut = int(np.count_nonzero(images == mask))
            out.append(
                SubgraphPattern(
                    k=k,
                    edges=_mask_to_edges(k, mask),
                    canonical_code=mask,
                    aut_count=aut,
                )
            )
    out.sort(key=lambda p: (p.edge_count, p.canonical_code))
    return tuple(out)


# ---------------------------------------------------------------------------
# counting in realized graphs
# ---------------------------------------------------------------------------


def _forward_sets(G: GraphSample):
    """Position-space forward adjacency sets under the degeneracy order."""
    indptr, indices = G.csr()
    order = _fastpath.degeneracy_order(G.n, indptr, indices)
    pos = np.empty(G.n, dtype=np.int64)
    pos[order] = np.arange(G.n)
    optr, oidx = _fastpath.oriented_csr(G.n, indptr, indices, pos)
    return [set(oidx[optr[r]:optr[r + 1]].tolist()) for r in range(G.n)]


def count_cliques(G: GraphSample, k: int) -> int:
    """Exact number of k-vertex subsets inducing a complete subgraph."""
    if k < 2:
        raise ParameterError("clique counting needs k >= 2")
    if k > G.n:
        return 0
    if k == 2:
        return G.edge_count
    indptr, indices = G.csr()
    order = _fastpath.degeneracy_order(G.n, indptr, indices)
    pos = np.empty(G.n, dtype=np.int64)
    pos[order] = np.arange(G.n)
    optr, oidx = _fastpath.oriented_csr(G.n, indptr, indices, pos)
    if k == 3:
        return int(_fastpath.triangle_count(G.n, optr, oidx))
    fwd = [set(oidx[optr[r]:optr[r + 1]].tolist()) for r in range(G.n)]

    def rec(cands, depth):
        if depth == 1:
            return len(cands)
        total = 0
        for u in cands:
            nxt = cands & fwd[u]
            if len(nxt) >= depth - 1:
                total += rec(nxt, depth - 1)
        return total

    total = 0
    for r in range(G.n):
        if len(fwd[r]) >= k - 1:
            total += rec(fwd[r], k - 1)
    return total


def _embedding_order(H: SubgraphPattern):
    """Order of H's vertices so every later vertex has an earlier neighbor;
    greedy by number of already-placed neighbors, then degree."""
    adj = H.adjacency_sets()
    deg = [len(a) for a in adj]
    start = max(range(H.k), key=lambda v: (deg[v], -v))
    order = [start]
    placed = {start}
    while len(order) < H.k:
        best = None
        key = None
        for v in range(H.k):
            if v in placed:
                continue
            back = len(adj[v] & placed)
            cand = (back, deg[v], -v)
            if best is None or cand > key:
                best, key = v, cand
        if key[0] == 0:
            raise ParameterError("pattern must be connected")
        order.append(best)
        placed.add(best)
    back_positions = []
    index_of = {v: t for t, v in enumerate(order)}
    for t, v in enumerate(order):
        back_positions.append(sorted(index_of[u] for u in adj[v] if index_of[u] < t))
    return order, back_positions


def count_subgraph_copies(G: GraphSample, H: SubgraphPattern) -> int:
    """Number of distinct (not necessarily induced) copies of H in G:
    injective adjacency-preserving maps divided by |Aut(H)|."""
    if H.k > G.n:
        return 0
    adj = G.neighbor_sets()
    _, back = _embedding_order(H)
    k = H.k
    mapping = [0] * k
    used = set()
    embeddings = 0

    def rec(t):
        nonlocal embeddings
        if t == k:
            embeddings += 1
            return
        b = back[t]
        cands = adj[mapping[b[0]]]
        for x in b[1:]:
            cands = cands & adj[mapping[x]]
            if not cands:
                return
        for c in cands:
            if c in used:
                continue
            mapping[t] = c
            used.add(c)
            rec(t + 1)
            used.remove(c)

    for v0 in range(G.n):
        mapping[0] = v0
        used.add(v0)
        rec(1)
        used.remove(v0)

    assert embeddings % H.aut_count == 0
    return embeddings // H.aut_count


# ---------------------------------------------------------------------------
# text format: first line "k m", then m lines "i j" (0-based)
# ---------------------------------------------------------------------------


def parse_pattern_text(text: str) -> SubgraphPattern:
    lines = [ln for ln in (s.strip() for s in text.splitlines()) if ln]
    if not lines:
        raise ParameterError("empty pattern text")
    try:
        k, m = (int(x) for x in lines[0].split())
    except ValueError as exc:
        raise ParameterError(f"bad pattern header {lines[0]!r}") from exc
    if len(lines) - 1 != m:
        raise ParameterError(f"expected {m} edge lines, got {len(lines) - 1}")
    edges = []
    for ln in lines[1:]:
        try:
            u, v = (int(x) for x in ln.split())
        except ValueError as exc:
            raise ParameterError(f"bad pattern edge line {ln!r}") from exc
        edges.append((u, v))
    return make_pattern(k, edges)


def format_pattern_text(H: SubgraphPattern) -> str:
    lines = [f"{H.k} {H.edge_count}"]
    lines.extend(f"{u} {v}" for u, v in H.edges)
    return "\n".join(lines) + "\n"


def load_pattern(path) -> SubgraphPattern:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_pattern_text(fh.read())
