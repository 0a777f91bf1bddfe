"""Scaling quantities for clique counts under the heavy-tailed kernel.

Closed-form exponents plus deterministic numeric evaluators for the expected
k-clique count, the hub weight threshold generating a prescribed expected
excess of cliques, the pinned-hub clique integrals, the concentration rate
function, and the empirical-tail envelope event.

The numeric layer splits every expectation at sqrt(mu*n): pairs of weights
below the split never saturate the kernel (their term is a plain product),
pairs above it always do (their term is 1), so each integral reduces to
closed-form moments plus low-dimensional smooth quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._quadrature import (
    halton,
    minprod_moment,
    minprod_moment_var,
    pareto_moment,
    quad_pareto,
)
from .errors import InfeasibleError, ParameterError
from .graph_model import WeightVector, check_alpha, mean_weight

_QMC_RNG_SEED = 20240915


def expected_clique_exponent(k: int, alpha: float) -> float:
    """Polynomial growth index of the expected k-clique count: k(2-alpha)/2."""
    check_alpha(alpha)
    if k < 2:
        raise ParameterError("need k >= 2")
    return k * (2.0 - alpha) / 2.0


def hub_threshold_exponent(k: int, alpha: float) -> float:
    """Growth index of the hub weight threshold: 1 - (2-k(2-alpha))/(4(alpha-1))."""
    check_alpha(alpha)
    if k < 3:
        raise ParameterError("need k >= 3")
    return 1.0 - (2.0 - k * (2.0 - alpha)) / (4.0 * (alpha - 1.0))


def concentration_rate(zeta: float) -> float:
    """Rate function (1+z) * log(z + 1/(1+z)) / 3 of the clique-count
    concentration bound; zero at zero, increasing on z >= 0."""
    if zeta < 0:
        raise ParameterError("zeta must be >= 0")
    return (1.0 + zeta) * math.log(zeta + 1.0 / (1.0 + zeta)) / 3.0


# ---------------------------------------------------------------------------
# expected clique count
# ---------------------------------------------------------------------------


def clique_tuple_integral(k: int, alpha: float, n: int) -> float:
    """E prod_{i<j} min(W_i W_j/(mu n), 1) over k i.i.d. Pareto weights.

    Decomposed over the number t of coordinates above sqrt(mu*n); the below-
    split block is a closed-form moment power, t <= 2 hub coordinates use
    kink-aligned quadrature, deeper blocks a randomized Halton rule (they are
    tiny corrections).
    """
    check_alpha(alpha)
    if k < 2:
        raise ParameterError("need k >= 2")
    if n < 2:
        raise ParameterError("need n >= 2")
    s = mean_weight(alpha) * n
    B = math.sqrt(s)
    tail_B = B**-alpha

    total = (
        float(pareto_moment(alpha, k - 1, 1.0, B)) ** k / s ** (k * (k - 1) // 2)
    )

    def small_block(ys, t):
        """integral over [1, B] of x^(k-t-1) prod_j min(x y_j / s, 1) dF,
        vectorized over rows of ys (shape (N, t))."""
        ys = np.asarray(ys, dtype=float)
        kinks = np.sort(np.clip(s / ys, 1.0, B), axis=1)
        out = np.zeros(ys.shape[0])
        inv_sorted = 1.0 / kinks  # = y_desc / s
        for j in range(t + 1):
            lo = kinks[:, j - 1] if j > 0 else np.ones(ys.shape[0])
            hi = kinks[:, j] if j < t else np.full(ys.shape[0], B)
            coef = np.prod(inv_sorted[:, j:], axis=1) if j < t else 1.0
            out += coef * pareto_moment(alpha, k - t - 1 + (t - j), lo, hi)
        return out

    if k >= 2:
        # one hub coordinate
        def g1(y):
            a = small_block(y[:, None], 1)
            return a ** (k - 1)

        t1 = quad_pareto(g1, alpha, B, np.inf, kinks=[s], tail_const=True)
        total += k * t1 / s ** ((k - 1) * (k - 2) // 2)

    if k >= 3:
        # two hub coordinates: split each axis at s where the kernel saturates
        def a2_pairs(y1, y2):
            ys = np.stack([y1, y2], axis=1)
            return small_block(ys, 2)

        nodes, wts = _u_panel_nodes(alpha, B, s, panels=48, order=8)
        inner_vals = a2_pairs(
            np.repeat(nodes, nodes.size), np.tile(nodes, nodes.size)
        ) ** (k - 2)
        t2a = float(
            (np.repeat(wts, wts.size) * np.tile(wts, wts.size) * inner_vals).sum()
        )

        def g2b(y):
            ys = np.stack([y, np.full(y.size, 2.0 * s)], axis=1)
            return small_block(ys, 2) ** (k - 2)

        t2b = 2.0 * s**-alpha * quad_pareto(g2b, alpha, B, s, kinks=[])
        t2c = float(pareto_moment(alpha, k - 3, 1.0, B)) ** (k - 2) * s ** (
            -2.0 * alpha
        )
        total += math.comb(k, 2) * (t2a + t2b + t2c) / s ** (
            (k - 2) * (k - 3) // 2
        )

    rng = np.random.default_rng(_QMC_RNG_SEED)
    for t in range(3, k):
        vals = []
        for _ in range(2):
            u = halton(8192, t, shift=rng.random(t)) * tail_B
            u = np.maximum(u, 1e-300)
            ys = u ** (-1.0 / alpha)
            block = small_block(ys, t) ** (k - t)
            vals.append(tail_B**t * block.mean())
        total += math.comb(k, t) * 0.5 * (vals[0] + vals[1]) / s ** (
            (k - t) * (k - t - 1) // 2
        )

    total += tail_B**k
    return total


def _u_panel_nodes(alpha, lo, hi, panels=48, order=8):
    """Gauss-Legendre nodes/weights for the Pareto measure on [lo, hi],
    geometrically graded in u = x^-alpha."""
    from ._quadrature import gl_nodes

    ua, ub = hi**-alpha, lo**-alpha
    edges = ua * (ub / ua) ** (np.arange(panels + 1) / panels)
    mids = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    gx, gw = gl_nodes(order)
    u = (mids[:, None] + half[:, None] * gx[None, :]).ravel()
    w = (half[:, None] * gw[None, :]).ravel()
    return u ** (-1.0 / alpha), w


def expected_clique_count(n: int, k: int, alpha: float) -> float:
    """Expected number of k-cliques: C(n, k) times the tuple integral."""
    if k > n:
        return 0.0
    return float(math.comb(n, k)) * clique_tuple_integral(k, alpha, n)


# ---------------------------------------------------------------------------
# hub weight threshold
# ---------------------------------------------------------------------------


def pinned_pair_integral(c: float, k: int, alpha: float, n: int) -> float:
    """integral over (x, y) of the clique kernel with k-2 coordinates pinned
    at weight c: E f(x, y, c, ..., c) for two i.i.d. Pareto weights."""
    check_alpha(alpha)
    if k < 3:
        raise ParameterError("need k >= 3")
    s = mean_weight(alpha) * n
    B = math.sqrt(s)
    npin = k - 2
    hub_pairs = min(c * c / s, 1.0) ** (npin * (npin - 1) // 2)
    factors = [(c / s, npin)]

    part_a = minprod_moment(alpha, 1, factors, 1.0, B) ** 2 / s

    def g(y):
        inner = minprod_moment_var(alpha, 0.0, y / s, 1, factors, 1.0, B)
        return np.minimum(y * c / s, 1.0) ** npin * inner

    kinks = [s]
    if s / c > B:
        kinks.append(s / c)
    part_b = 2.0 * quad_pareto(g, alpha, B, np.inf, kinks=kinks, tail_const=True)

    part_c = minprod_moment(alpha, 0, factors, B, np.inf) ** 2
    return hub_pairs * (part_a + part_b + part_c)


def hub_weight_threshold(n: int, excess: float, k: int, alpha: float,
                         tol: float = 1e-6) -> float:
    """Smallest common weight c of k-2 pinned hubs whose expected clique
    excess over random pairs exceeds `excess` times the expected count.

    Bisection with relative tolerance `tol`; raises InfeasibleError when even
    c = mu*n cannot generate the excess.
    """
    check_alpha(alpha)
    if excess <= 0:
        raise ParameterError("excess factor must be positive")
    if tol <= 0:
        raise ParameterError("tolerance must be positive")
    if k < 3:
        raise ParameterError("need k >= 3")
    if n < k:
        raise ParameterError("need n >= k")
    target = excess * expected_clique_count(n, k, alpha)
    pairs = float(math.comb(n, 2))

    def holds(c):
        return pairs * pinned_pair_integral(c, k, alpha, n) > target

    s = mean_weight(alpha) * n
    hi = s
    if not holds(hi):
        raise InfeasibleError(
            f"excess {excess} not reachable even with hub weight mu*n = {s:.3g}"
        )
    lo = 1.0
    if holds(lo):
        return 1.0
    for _ in range(200):
        if hi <= lo * (1.0 + tol):
            break
        mid = math.sqrt(lo * hi)
        if holds(mid):
            hi = mid
        else:
            lo = mid
    return math.sqrt(lo * hi)


# ---------------------------------------------------------------------------
# pinned-hub clique integrals
# ---------------------------------------------------------------------------


def hub_clique_integral(hub_weights, k: int, alpha: float, n: int,
                        return_error: bool = False):
    """Probability that h pinned hubs plus k-h random-weight vertices form a
    clique: the clique kernel integrated over the free coordinates.

    Exact in closed form for one free coordinate, kink-aligned quadrature for
    two, randomized Halton for three or more (the returned error estimate is
    half the spread between two independent shifts).
    """
    check_alpha(alpha)
    hubs = np.asarray(hub_weights, dtype=float)
    h = hubs.size
    if not 1 <= h <= k - 1:
        raise ParameterError("need 1 <= h <= k-1 pinned hubs")
    if np.any(hubs < 1.0):
        raise ParameterError("hub weights must be >= 1")
    s = mean_weight(alpha) * n
    d = k - h
    w_hh = 1.0
    for i in range(h):
        for j in range(i + 1, h):
            w_hh *= min(hubs[i] * hubs[j] / s, 1.0)
    factors = [(b / s, 1) for b in hubs]

    err = 0.0
    if d == 1:
        val = w_hh * minprod_moment(alpha, 0, factors, 1.0, np.inf)
    elif d == 2:
        def g(x1):
            cself = np.ones_like(x1)
            for b in hubs:
                cself = cself * np.minimum(x1 * b / s, 1.0)
            inner = minprod_moment_var(alpha, 0.0, x1 / s, 1, factors, 1.0, np.inf)
            return cself * inner

        kinks = sorted({s} | {s / b for b in hubs if s / b > 1} | {b for b in hubs if b > 1})
        val = w_hh * quad_pareto(g, alpha, 1.0, np.inf, kinks=kinks, tail_const=True)
    else:
        rng = np.random.default_rng(_QMC_RNG_SEED + 1)
        vals = []
        for _ in range(2):
            u = np.maximum(halton(16384, d, shift=rng.random(d)), 1e-300)
            xs = u ** (-1.0 / alpha)
            prod = np.ones(xs.shape[0])
            for i in range(d):
                for j in range(i + 1, d):
                    prod *= np.minimum(xs[:, i] * xs[:, j] / s, 1.0)
                for b in hubs:
                    prod *= np.minimum(xs[:, i] * b / s, 1.0)
            vals.append(prod.mean())
        val = w_hh * 0.5 * (vals[0] + vals[1])
        err = w_hh * 0.5 * abs(vals[0] - vals[1])
    if return_error:
        return val, err
    return val


def hub_clique_integral_asymptotic(b: float, k: int, alpha: float, n: int) -> float:
    """Large-n form of hub_clique_integral for k-2 equal hubs of weight b:
    (1/(mu n)) * (alpha(k-2)/((alpha-1)(k-alpha-1)) * (b/(mu n))^(alpha-1))^2."""
    check_alpha(alpha)
    if k < 3:
        raise ParameterError("need k >= 3")
    s = mean_weight(alpha) * n
    pref = alpha * (k - 2) / ((alpha - 1.0) * (k - alpha - 1.0))
    return (pref * (b / s) ** (alpha - 1.0)) ** 2 / s


# ---------------------------------------------------------------------------
# empirical-tail envelope
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TailEnvelopeParams:
    """Slack factor, tail constant and window exponent of the envelope event."""

    slack: float  # multiplies every bound as (1 + slack)
    tail_constant: float  # bound c/n on the far tail
    window: float  # half-width exponent of the mid window around n^(1/alpha)

    def __post_init__(self):
        if self.slack <= 0 or self.tail_constant <= 0 or self.window <= 0:
            raise ParameterError("envelope parameters must be positive")

    def lower_cut(self, n: int, alpha: float) -> float:
        return n ** (1.0 / alpha - self.window)

    def upper_cut(self, n: int, alpha: float) -> float:
        return n ** (1.0 / alpha + self.window)


@dataclass(frozen=True)
class TailEnvelopeReport:
    passed: bool
    below_window: bool
    in_window: bool
    above_window: bool
    worst_ratio_below: float
    count_in_window: int
    count_above: int


def tail_envelope_check(weights: WeightVector, params: TailEnvelopeParams) -> TailEnvelopeReport:
    """Check the three-piece envelope on the empirical tail of the weights:
    proportional bound below the window, frozen bound inside it, c/n beyond.

    The empirical tail is a step function, so suprema are evaluated as left
    limits at the sorted sample points.
    """
    w = np.sort(weights.weights)
    n = weights.n
    alpha = weights.alpha
    a_n = params.lower_cut(n, alpha)
    b_n = params.upper_cut(n, alpha)
    if not a_n < b_n:
        raise ParameterError("empty envelope window")
    slack = 1.0 + params.slack

    # below the window: F_bar_n(x) <= (1+A) x^-alpha for all x < a_n;
    # the sup is approached from the left of each sample point and of a_n
    count_ge = n - np.arange(n)  # number of samples >= w_j
    below = w < a_n
    worst = 0.0
    ok_below = True
    if below.any():
        ratios = (count_ge[below] / n) / w[below] ** -alpha
        worst = float(ratios.max())
        ok_below = worst <= slack
    n_ge_a = int(np.count_nonzero(w >= a_n))
    ratio_at_a = (n_ge_a / n) / a_n**-alpha
    worst = max(worst, ratio_at_a)
    ok_below = ok_below and ratio_at_a <= slack

    # inside the window the bound is frozen at (1+A) F_bar(a_n)
    n_gt_a = int(np.count_nonzero(w > a_n))
    ok_window = n_gt_a / n <= slack * a_n**-alpha

    # beyond the window: (1+A) c / n
    n_gt_b = int(np.count_nonzero(w > b_n))
    ok_above = n_gt_b <= slack * params.tail_constant

    return TailEnvelopeReport(
        passed=bool(ok_below and ok_window and ok_above),
        below_window=bool(ok_below),
        in_window=bool(ok_window),
        above_window=bool(ok_above),
        worst_ratio_below=worst,
        count_in_window=n_gt_a,
        count_above=n_gt_b,
    )
