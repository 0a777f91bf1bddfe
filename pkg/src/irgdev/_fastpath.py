"""Numba kernels for the hot loops: edge sampling, degeneracy order, triangles.

Everything here is deterministic given its inputs; random numbers are consumed
from pre-drawn buffers so that results do not depend on buffer sizes.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# Kernel status codes for the resumable edge sampler.
DONE = 0
NEED_UNIFORMS = 1
NEED_CAPACITY = 2


@njit(cache=True)
def mh_sample_kernel(w, s, us, i, j, p, eu, ev, ne):
    """Skip-sampling pass over vertex pairs, weights sorted descending.

    For each anchor i the inner index j advances with geometric skips drawn
    at the current probability bound p (valid because w is descending, so the
    true pair probability only decreases with j); landed pairs are accepted
    with ratio q/p.  Consumes uniforms from `us` sequentially and returns a
    resumable (status, i, j, p, used, ne) tuple.  Each loop iteration needs at
    most two uniforms and one edge slot, checked up front so the state stays
    consistent across calls.
    """
    n = w.shape[0]
    nu = us.shape[0]
    cap = eu.shape[0]
    used = 0
    while i < n - 1:
        if j >= n:
            i += 1
            if i >= n - 1:
                break
            j = i + 1
            p = w[i] * w[j] / s
            if p > 1.0:
                p = 1.0
            continue
        if used + 2 > nu:
            return NEED_UNIFORMS, i, j, p, used, ne
        if ne >= cap:
            return NEED_CAPACITY, i, j, p, used, ne
        if p < 1.0:
            r = us[used]
            used += 1
            # geometric number of failures before the next candidate
            skip = int(np.floor(np.log(r) / np.log(1.0 - p)))
            if skip > n:
                skip = n
            j += skip
            if j >= n:
                continue
        q = w[i] * w[j] / s
        if q > 1.0:
            q = 1.0
        r = us[used]
        used += 1
        if r * p < q:
            eu[ne] = i
            ev[ne] = j
            ne += 1
        p = q
        j += 1
    return DONE, i, j, p, used, ne


@njit(cache=True)
def degeneracy_order(n, indptr, indices):
    """Vertex order from repeated minimum-degree removal (bucket queue)."""
    deg = np.empty(n, np.int64)
    for v in range(n):
        deg[v] = indptr[v + 1] - indptr[v]
    maxd = 0
    for v in range(n):
        if deg[v] > maxd:
            maxd = deg[v]
    head = np.full(maxd + 1, -1, np.int64)
    nxt = np.full(n, -1, np.int64)
    prv = np.full(n, -1, np.int64)
    for v in range(n):
        d = deg[v]
        nxt[v] = head[d]
        if head[d] != -1:
            prv[head[d]] = v
        head[d] = v
    removed = np.zeros(n, np.bool_)
    order = np.empty(n, np.int64)
    cur = 0
    for step in range(n):
        while head[cur] == -1:
            cur += 1
        v = head[cur]
        head[cur] = nxt[v]
        if nxt[v] != -1:
            prv[nxt[v]] = -1
        nxt[v] = -1
        order[step] = v
        removed[v] = True
        for ii in range(indptr[v], indptr[v + 1]):
            u = indices[ii]
            if removed[u]:
                continue
            d = deg[u]
            # unlink u from bucket d
            if prv[u] != -1:
                nxt[prv[u]] = nxt[u]
            else:
                head[d] = nxt[u]
            if nxt[u] != -1:
                prv[nxt[u]] = prv[u]
            # insert into bucket d-1
            deg[u] = d - 1
            prv[u] = -1
            nxt[u] = head[d - 1]
            if head[d - 1] != -1:
                prv[head[d - 1]] = u
            head[d - 1] = u
        if cur > 0:
            cur -= 1
    return order


@njit(cache=True)
def oriented_csr(n, indptr, indices, pos):
    """Forward-edge CSR in position space: row r lists positions (> r) of the
    neighbors of the vertex ranked r, sorted ascending."""
    outdeg = np.zeros(n, np.int64)
    for v in range(n):
        r = pos[v]
        for ii in range(indptr[v], indptr[v + 1]):
            if pos[indices[ii]] > r:
                outdeg[r] += 1
    optr = np.zeros(n + 1, np.int64)
    for r in range(n):
        optr[r + 1] = optr[r] + outdeg[r]
    oidx = np.empty(optr[n], np.int64)
    fill = optr[:-1].copy()
    for v in range(n):
        r = pos[v]
        for ii in range(indptr[v], indptr[v + 1]):
            q = pos[indices[ii]]
            if q > r:
                oidx[fill[r]] = q
                fill[r] += 1
    for r in range(n):
        seg = oidx[optr[r]:optr[r + 1]]
        seg.sort()
    return optr, oidx


@njit(cache=True)
def triangle_count(n, optr, oidx):
    """Total triangles: sorted-merge intersection of forward neighborhoods."""
    total = 0
    for r in range(n):
        lo = optr[r]
        hi = optr[r + 1]
        for ii in range(lo, hi):
            u = oidx[ii]
            a = lo
            b = optr[u]
            bhi = optr[u + 1]
            while a < hi and b < bhi:
                x = oidx[a]
                y = oidx[b]
                if x == y:
                    total += 1
                    a += 1
                    b += 1
                elif x < y:
                    a += 1
                else:
                    b += 1
    return total
