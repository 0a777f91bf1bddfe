"""Integration against the Pareto weight measure dF(x) = alpha x^(-alpha-1) dx.

Three layers, all deterministic:

* closed-form power moments over intervals (pareto_moment);
* exact piecewise integrals of products min(c x, 1)^m times a power
  (the only kinks are at x = 1/c, so each segment is a pure moment);
* composite Gauss-Legendre in the u = x^(-alpha) variable for integrands
  that are smooth between analytically known kinks, plus a randomized
  Halton rule for dimensions >= 3.
"""

from __future__ import annotations

import numpy as np

_GL_CACHE: dict = {}


def gl_nodes(order: int):
    if order not in _GL_CACHE:
        x, w = np.polynomial.legendre.leggauss(order)
        _GL_CACHE[order] = (x, w)
    return _GL_CACHE[order]


def pareto_moment(alpha: float, m: float, lo, hi):
    """integral of x^m dF over [lo, hi] (vectorized in lo/hi; hi may be inf).

    Requires m < alpha when hi is infinite; empty ranges return 0.
    """
    lo = np.maximum(np.asarray(lo, dtype=float), 1.0)
    hi = np.asarray(hi, dtype=float)
    p = m - alpha
    if abs(p) < 1e-13:
        lo_c = np.minimum(lo, hi)
        out = alpha * (np.log(hi) - np.log(lo_c))
        return np.where(hi > lo, out, 0.0)
    with np.errstate(over="ignore"):
        hi_term = np.where(np.isinf(hi), 0.0 if p < 0 else np.inf, hi**p)
        out = (alpha / p) * (hi_term - lo**p)
    return np.where(hi > lo, out, 0.0)


def minprod_moment(alpha: float, power: float, factors, lo: float, hi: float) -> float:
    """integral of x^power * prod_f min(c_f x, 1)^{m_f} dF over [lo, hi].

    factors: sequence of (coef, mult) with coef > 0.  Exact: the integrand is
    a pure power on each segment between the kinks 1/c_f.
    """
    lo = max(lo, 1.0)
    if hi <= lo:
        return 0.0
    pts = sorted({1.0 / c for c, _ in factors if lo < 1.0 / c < hi})
    bounds = [lo] + pts + [hi]
    total = 0.0
    for a, b in zip(bounds[:-1], bounds[1:]):
        mid = np.sqrt(a * b) if np.isfinite(b) else 2.0 * a
        pw = power
        coef = 1.0
        for c, mult in factors:
            if c * mid < 1.0:  # uncapped on this segment
                pw += mult
                coef *= c**mult
        total += coef * float(pareto_moment(alpha, pw, a, b))
    return total


def minprod_moment_var(alpha: float, power: float, vcoefs, vmult: int,
                       fixed, lo: float, hi: float):
    """Like minprod_moment but with one extra factor min(v x, 1)^vmult whose
    coefficient v varies over the array vcoefs.  Returns an array."""
    v = np.asarray(vcoefs, dtype=float)
    lo = max(lo, 1.0)
    tv = np.clip(1.0 / v, lo, hi)
    pts = sorted({1.0 / c for c, _ in fixed if lo < 1.0 / c < hi})
    bounds = [lo] + pts + [hi]
    out = np.zeros_like(v)
    for a, b in zip(bounds[:-1], bounds[1:]):
        mid = np.sqrt(a * b) if np.isfinite(b) else 2.0 * a
        pw = power
        coef = 1.0
        for c, mult in fixed:
            if c * mid < 1.0:
                pw += mult
                coef *= c**mult
        t = np.clip(tv, a, b)
        out += coef * v**vmult * pareto_moment(alpha, pw + vmult, a, t)
        out += coef * pareto_moment(alpha, pw, t, b)
    return out


def quad_pareto(f, alpha: float, lo: float, hi: float, kinks=(),
                panels: int = 256, order: int = 8,
                tail_const: bool = False) -> float:
    """integral of f(x) dF(x) over [lo, hi] by composite Gauss-Legendre in
    u = x^(-alpha), with panels aligned to the given kink locations and
    geometric grading inside each smooth piece.

    For hi = inf, tail_const=True asserts that f is constant beyond the
    largest kink, and that piece is integrated in closed form.
    """
    lo = max(lo, 1.0)
    u_hi = lo**-alpha
    pieces = sorted({float(x) for x in kinks if lo < x < hi})
    if np.isinf(hi):
        if not tail_const:
            raise ValueError("infinite range requires tail_const with a kink")
        xmax = pieces[-1] if pieces else lo
        tail = float(f(np.array([2.0 * xmax]))[0]) * xmax**-alpha
        hi = xmax
        if hi <= lo:
            return tail
    else:
        tail = 0.0
    bounds_x = [lo] + [x for x in pieces if x < hi] + [hi]
    total = tail
    npieces = len(bounds_x) - 1
    per_piece = max(6, panels // max(npieces, 1))
    gx, gw = gl_nodes(order)
    for a, b in zip(bounds_x[:-1], bounds_x[1:]):
        ua, ub = b**-alpha, a**-alpha  # u decreasing in x
        if ub <= ua:
            continue
        # geometric panel spacing toward the small-u (large-x) end
        edges = ua * (ub / ua) ** (np.arange(per_piece + 1) / per_piece)
        mids = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * (edges[1:] - edges[:-1])
        u_nodes = (mids[:, None] + half[:, None] * gx[None, :]).ravel()
        w_nodes = (half[:, None] * gw[None, :]).ravel()
        x_nodes = u_nodes ** (-1.0 / alpha)
        total += float(np.dot(w_nodes, f(x_nodes)))
    return total


def halton(n: int, dim: int, shift=None) -> np.ndarray:
    """First n points of the Halton sequence in [0,1)^dim, optionally with a
    random shift (mod 1) for error estimation."""
    primes = [2, 3, 5, 7, 11, 13, 17, 19]
    if dim > len(primes):
        raise ValueError("dimension too large for the Halton rule")
    out = np.empty((n, dim))
    idx = np.arange(1, n + 1)
    for d in range(dim):
        base = primes[d]
        res = np.zeros(n)
        denom = 1.0
        i = idx.copy()
        while i.max() > 0:
            denom *= base
            res += (i % base) / denom
            i //= base
        out[:, d] = res
    if shift is not None:
        out = (out + np.asarray(shift)[None, :]) % 1.0
    return out
