import math

import numpy as np
import pytest

from irgdev import asymptotics as asy
from irgdev import graph_model as gm
from irgdev._quadrature import minprod_moment, pareto_moment, quad_pareto
from irgdev.errors import InfeasibleError, ParameterError


# ---------------------------------------------------------------------------
# quadrature layer
# ---------------------------------------------------------------------------


def test_pareto_moment_closed_forms():
    # integral of dF over [1, inf) = 1
    assert float(pareto_moment(1.5, 0, 1.0, np.inf)) == pytest.approx(1.0)
    # tail mass x^-alpha
    assert float(pareto_moment(1.5, 0, 4.0, np.inf)) == pytest.approx(4.0**-1.5)
    # mean alpha/(alpha-1)
    assert float(pareto_moment(1.5, 1, 1.0, np.inf)) == pytest.approx(3.0)
    # m == alpha edge case
    assert float(pareto_moment(1.5, 1.5, 1.0, 2.0)) == pytest.approx(
        1.5 * math.log(2.0)
    )


def test_minprod_moment_vs_quadrature():
    rng = np.random.default_rng(0)
    for _ in range(10):
        alpha = float(rng.uniform(1.1, 1.9))
        c1, c2 = rng.uniform(0.001, 2.0, 2)
        p = int(rng.integers(0, 3))
        hi = float(rng.uniform(5.0, 500.0))

        def f(x):
            return x**p * np.minimum(c1 * x, 1) * np.minimum(c2 * x, 1) ** 2

        exact = minprod_moment(alpha, p, [(c1, 1), (c2, 2)], 1.0, hi)
        num = quad_pareto(f, alpha, 1.0, hi, kinks=[1 / c1, 1 / c2], panels=64)
        assert exact == pytest.approx(num, rel=1e-9)


def test_quad_pareto_tail_const():
    # integral of min(x/10, 1) dF over [1, inf): exact piecewise value
    alpha = 1.5
    exact = minprod_moment(alpha, 0, [(0.1, 1)], 1.0, np.inf)
    num = quad_pareto(
        lambda x: np.minimum(x / 10, 1.0), alpha, 1.0, np.inf, kinks=[10.0],
        tail_const=True,
    )
    assert num == pytest.approx(exact, rel=1e-9)


# ---------------------------------------------------------------------------
# exponents and the rate function
# ---------------------------------------------------------------------------


def test_expected_clique_exponent():
    assert asy.expected_clique_exponent(3, 1.5) == pytest.approx(0.75)
    assert asy.expected_clique_exponent(2, 1.5) == pytest.approx(0.5)
    assert asy.expected_clique_exponent(5, 1.999) == pytest.approx(0.0025)


def test_hub_threshold_exponent():
    assert asy.hub_threshold_exponent(3, 1.75) == pytest.approx(1 - 1.25 / 3)
    assert asy.hub_threshold_exponent(4, 1.9) == pytest.approx(1 - 1.6 / 3.6)
    # alpha = 2 - 2/k makes the exponent exactly 1
    for k in (3, 4, 5):
        assert asy.hub_threshold_exponent(k, 2 - 2 / k) == pytest.approx(1.0)


def test_hub_threshold_exponent_window():
    # exponent lies in (1/2, 1) exactly when alpha in (2 - 2/k, 2)
    for k in (3, 4, 5):
        for alpha in np.linspace(1.05, 1.95, 19):
            if alpha <= 2 - 2 / k + 1e-12:
                continue
            e = asy.hub_threshold_exponent(k, float(alpha))
            assert 0.5 < e <= 1.0 + 1e-12


def test_concentration_rate_values():
    assert asy.concentration_rate(0.0) == 0.0
    assert asy.concentration_rate(1.0) == pytest.approx(0.27031, abs=1e-5)
    assert asy.concentration_rate(2.0) == pytest.approx(math.log(7 / 3), abs=1e-12)
    with pytest.raises(ParameterError):
        asy.concentration_rate(-0.1)


def test_concentration_rate_monotone():
    zs = np.linspace(0.0, 10.0, 100)
    vals = [asy.concentration_rate(float(z)) for z in zs]
    assert all(v >= -1e-15 for v in vals)
    assert all(b > a - 1e-15 for a, b in zip(vals, vals[1:]))


# ---------------------------------------------------------------------------
# expected clique count
# ---------------------------------------------------------------------------


def test_clique_tuple_integral_vs_monte_carlo():
    rng = np.random.default_rng(1)
    for (k, alpha, n) in [(3, 1.5, 100), (3, 1.75, 30), (4, 1.5, 50), (2, 1.3, 80)]:
        N = 400_000
        W = (1 - rng.random((N, k))) ** (-1 / alpha)
        s = alpha / (alpha - 1) * n
        prod = np.ones(N)
        for i in range(k):
            for j in range(i + 1, k):
                prod *= np.minimum(W[:, i] * W[:, j] / s, 1.0)
        mc, se = prod.mean(), prod.std() / math.sqrt(N)
        val = asy.clique_tuple_integral(k, alpha, n)
        assert abs(val - mc) <= 4 * se


def test_expected_clique_count_scaling():
    ns = [10**4, 10**5, 10**6]
    ms = [asy.expected_clique_count(n, 3, 1.5) for n in ns]
    slope = np.polyfit(np.log(ns), np.log(ms), 1)[0]
    # slowly-converging prefactor: generous window around k(2-alpha)/2
    assert abs(slope - 0.75) < 0.08


# ---------------------------------------------------------------------------
# hub threshold
# ---------------------------------------------------------------------------


def test_pinned_pair_integral_vs_brute():
    def brute(c, k, alpha, n, M=3000):
        s = alpha / (alpha - 1) * n
        edges = np.exp(np.linspace(np.log(1e-13), 0.0, M + 1))
        mids = 0.5 * (edges[1:] + edges[:-1])
        wid = np.diff(edges)
        x = mids ** (-1 / alpha)
        npin = k - 2
        fx = np.minimum(x * c / s, 1.0) ** npin
        hubfac = min(c * c / s, 1.0) ** (npin * (npin - 1) // 2)
        xy = np.minimum(np.outer(x, x) / s, 1.0)
        return hubfac * float(
            (wid[:, None] * wid[None, :] * xy * fx[:, None] * fx[None, :]).sum()
        )

    for (c, k, alpha, n) in [
        (5000.0, 3, 1.75, 10**6),
        (300.0, 3, 1.5, 10**4),
        (2000.0, 4, 1.6, 10**5),
    ]:
        mine = asy.pinned_pair_integral(c, k, alpha, n)
        ref = brute(c, k, alpha, n)
        assert mine == pytest.approx(ref, rel=2e-4)


def test_hub_weight_threshold_monotone():
    vals = {}
    for n in (10**4, 10**5, 10**6):
        for a in (0.5, 1.0, 2.0):
            vals[(n, a)] = asy.hub_weight_threshold(n, a, 3, 1.75)
    for n in (10**4, 10**5, 10**6):
        assert vals[(n, 0.5)] < vals[(n, 1.0)] < vals[(n, 2.0)]
    for a in (0.5, 1.0, 2.0):
        assert vals[(10**4, a)] < vals[(10**5, a)] < vals[(10**6, a)]


def test_hub_weight_threshold_bracketing():
    n, a, k, alpha = 10**5, 1.0, 3, 1.75
    tol = 1e-6
    c = asy.hub_weight_threshold(n, a, k, alpha, tol=tol)
    target = a * asy.expected_clique_count(n, k, alpha)
    pairs = math.comb(n, 2)
    assert pairs * asy.pinned_pair_integral(c * (1 + tol), k, alpha, n) > target
    assert pairs * asy.pinned_pair_integral(c * (1 - tol), k, alpha, n) <= target


def test_hub_weight_threshold_slope():
    ns = [10**4, 10**5, 10**6, 10**7]
    cs = [asy.hub_weight_threshold(n, 1.0, 3, 1.75) for n in ns]
    slope = np.polyfit(np.log(ns), np.log(cs), 1)[0]
    assert abs(slope - asy.hub_threshold_exponent(3, 1.75)) < 0.05


def test_hub_weight_threshold_infeasible():
    with pytest.raises(InfeasibleError):
        asy.hub_weight_threshold(1000, 1e9, 3, 1.5)


# ---------------------------------------------------------------------------
# pinned-hub clique integrals
# ---------------------------------------------------------------------------


def test_hub_clique_integral_exact_d1():
    # saturated case: one free vertex, huge hubs => integral 1
    n, alpha, k = 100, 1.5, 3
    s = alpha / (alpha - 1) * n
    val = asy.hub_clique_integral([2 * s, 2 * s], k, alpha, n)
    assert val == pytest.approx(1.0)


def test_hub_clique_integral_vs_brute_d2():
    def brute(hubs, k, alpha, n, M=3000):
        s = alpha / (alpha - 1) * n
        edges = np.exp(np.linspace(np.log(1e-13), 0.0, M + 1))
        mids = 0.5 * (edges[1:] + edges[:-1])
        wid = np.diff(edges)
        x = mids ** (-1 / alpha)
        cx = np.ones_like(x)
        for b in hubs:
            cx = cx * np.minimum(x * b / s, 1.0)
        whh = 1.0
        for i in range(len(hubs)):
            for j in range(i + 1, len(hubs)):
                whh *= min(hubs[i] * hubs[j] / s, 1.0)
        xy = np.minimum(np.outer(x, x) / s, 1.0)
        return whh * float(
            (wid[:, None] * wid[None, :] * xy * cx[:, None] * cx[None, :]).sum()
        )

    for (k, alpha, n, be) in [(3, 1.5, 10**6, 0.8), (4, 1.6, 10**5, 0.7)]:
        b = float(n) ** be
        hubs = [b] * (k - 2)
        mine = asy.hub_clique_integral(hubs, k, alpha, n)
        assert mine == pytest.approx(brute(hubs, k, alpha, n), rel=2e-4)


def test_hub_clique_integral_qmc_vs_monte_carlo():
    k, h, alpha, n = 5, 1, 1.5, 300
    hubs = [70.0]
    rng = np.random.default_rng(3)
    N = 300_000
    d = k - h
    X = (1 - rng.random((N, d))) ** (-1 / alpha)
    s = alpha / (alpha - 1) * n
    prod = np.ones(N)
    for i in range(d):
        for j in range(i + 1, d):
            prod *= np.minimum(X[:, i] * X[:, j] / s, 1)
        for b in hubs:
            prod *= np.minimum(X[:, i] * b / s, 1)
    mc, se = prod.mean(), prod.std() / math.sqrt(N)
    val, err = asy.hub_clique_integral(hubs, k, alpha, n, return_error=True)
    assert abs(val - mc) <= 4 * se + 3 * err


def test_hub_clique_integral_monotone_in_hub_weight():
    n, alpha = 10**4, 1.6
    lo = asy.hub_clique_integral([200.0], 3, alpha, n)
    hi = asy.hub_clique_integral([400.0], 3, alpha, n)
    assert hi > lo


def test_hub_clique_asymptotic_homogeneity():
    n, alpha, k = 10**6, 1.5, 3
    v1 = asy.hub_clique_integral_asymptotic(1e4, k, alpha, n)
    v2 = asy.hub_clique_integral_asymptotic(2e4, k, alpha, n)
    assert v2 / v1 == pytest.approx(2 ** (2 * (alpha - 1)), rel=1e-12)


def test_hub_clique_numeric_tracks_asymptotic_at_large_k():
    # at k = 5 the subleading bracket terms are negligible
    k, alpha, n = 5, 1.7, 10**7
    b = float(n) ** 0.75
    num = asy.hub_clique_integral([b] * (k - 2), k, alpha, n)
    asym = asy.hub_clique_integral_asymptotic(b, k, alpha, n)
    assert num / asym == pytest.approx(1.0, abs=0.05)


def test_hub_clique_lemma5_style_slope():
    for (k, alpha) in [(3, 1.5), (4, 1.7)]:
        vals = [
            asy.hub_clique_integral([float(n) ** 0.9] * (k - 1), k, alpha, n)
            for n in (10**5, 10**7)
        ]
        slope = (math.log(vals[1]) - math.log(vals[0])) / math.log(100)
        assert abs(slope - (-alpha * 0.1)) < 0.05


# ---------------------------------------------------------------------------
# envelope
# ---------------------------------------------------------------------------


def test_envelope_trivial_cases():
    params = asy.TailEnvelopeParams(slack=0.5, tail_constant=5.0, window=0.1)
    all_ones = gm.WeightVector(np.ones(1000), 1.5)
    assert asy.tail_envelope_check(all_ones, params).passed
    one_big = gm.WeightVector(np.concatenate([[1000.0], np.ones(999)]), 1.5)
    assert asy.tail_envelope_check(one_big, params).passed


def test_envelope_rejects_fat_sample():
    # every weight at the window edge: empirical tail hugely above the bound
    params = asy.TailEnvelopeParams(slack=0.5, tail_constant=5.0, window=0.1)
    n = 1000
    w = gm.WeightVector(np.full(n, n ** (1 / 1.5)), 1.5)
    rep = asy.tail_envelope_check(w, params)
    assert not rep.passed


def test_envelope_param_validation():
    with pytest.raises(ParameterError):
        asy.TailEnvelopeParams(slack=0.0, tail_constant=5.0, window=0.1)
    with pytest.raises(ParameterError):
        asy.TailEnvelopeParams(slack=0.5, tail_constant=-1.0, window=0.1)


def test_envelope_typical_samples_mostly_pass():
    # at these parameters the envelope holds for the vast majority of samples
    params = asy.TailEnvelopeParams(slack=1.0, tail_constant=8.0, window=0.2)
    passes = sum(
        asy.tail_envelope_check(gm.sample_weights(20_000, 1.5, seed), params).passed
        for seed in range(50)
    )
    assert passes >= 48
