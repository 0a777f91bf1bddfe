import itertools
import math

import numpy as np
import pytest

from irgdev import conditional_counts as cc
from irgdev import graph_model as gm
from irgdev import subgraph_catalog as sc
from irgdev.errors import BudgetExceededError, ParameterError


def brute_conditional_cliques(w, alpha, k):
    n = len(w)
    s = alpha / (alpha - 1) * n
    tot = 0.0
    for S in itertools.combinations(range(n), k):
        p = 1.0
        for i, j in itertools.combinations(S, 2):
            p *= min(w[i] * w[j] / s, 1.0)
        tot += p
    return tot


def brute_conditional_copies(w, alpha, H):
    n = len(w)
    s = alpha / (alpha - 1) * n
    adjprod = 0.0
    for S in itertools.permutations(range(n), H.k):
        p = 1.0
        for u, v in H.edges:
            p *= min(w[S[u]] * w[S[v]] / s, 1.0)
        adjprod += p
    return adjprod / H.aut_count


def test_clique_tuple_weight_examples():
    assert cc.clique_tuple_weight([1.0, 1.0, 1.0], 3, 1.5) == pytest.approx(
        (1 / 9) ** 3
    )
    # saturated tuple
    assert cc.clique_tuple_weight([1e6, 1e6, 1e6], 10, 1.5) == 1.0
    # permutation symmetry
    a = cc.clique_tuple_weight([2.0, 7.0, 3.0, 1.5], 50, 1.7)
    b = cc.clique_tuple_weight([7.0, 1.5, 2.0, 3.0], 50, 1.7)
    assert a == pytest.approx(b, rel=1e-15)


def test_exact_cliques_vs_brute_force():
    rng = np.random.default_rng(0)
    for trial in range(10):
        n = int(rng.integers(8, 24))
        alpha = float(rng.uniform(1.1, 1.9))
        w = (1 - rng.random(n)) ** (-1 / alpha)
        if trial % 2:
            w[:3] = [50.0, 200.0, 8.0]  # force above-split strata
        wv = gm.WeightVector(w, alpha)
        for k in (2, 3, 4):
            fast = cc.conditional_expected_cliques(wv, k).value
            ref = brute_conditional_cliques(w, alpha, k)
            assert fast == pytest.approx(ref, rel=1e-11, abs=1e-300)


def test_exact_single_forced_clique():
    wv = gm.WeightVector(np.full(4, 1e9), 1.5)
    assert cc.conditional_expected_cliques(wv, 4).value == pytest.approx(1.0)


def test_exact_small_triangle_value():
    wv = gm.WeightVector(np.ones(3), 1.5)
    assert cc.conditional_expected_cliques(wv, 3).value == pytest.approx(
        (1 / 9) ** 3
    )


def test_exact_subgraphs_vs_injection_brute_force():
    rng = np.random.default_rng(4)
    w = (1 - rng.random(9)) ** (-1 / 1.5)
    w[0] = 30.0
    wv = gm.WeightVector(w, 1.5)
    for H in (sc.path_pattern(3), sc.cycle_pattern(4), sc.star_pattern(3)):
        mine = cc.conditional_expected_subgraphs(wv, H).value
        ref = brute_conditional_copies(w, 1.5, H)
        assert mine == pytest.approx(ref, rel=1e-10)


def test_subgraph_edge_closed_form():
    n = 50
    wv = gm.WeightVector(np.ones(n), 1.5)
    v = cc.conditional_expected_subgraphs(wv, sc.clique_pattern(2)).value
    assert v == pytest.approx(math.comb(n, 2) / (3 * n))


def test_clique_subgraph_consistency():
    for seed in range(3):
        wv = gm.sample_weights(20, 1.5, seed)
        for k in (3, 4):
            a = cc.conditional_expected_cliques(wv, k).value
            b = cc.conditional_expected_subgraphs(wv, sc.clique_pattern(k)).value
            assert b == pytest.approx(a, rel=1e-9)


def test_exact_budget_refusal():
    wv = gm.sample_weights(200, 1.5, 1)
    with pytest.raises(BudgetExceededError):
        cc.conditional_expected_subgraphs(wv, sc.path_pattern(4))


def test_sampled_unbiased():
    wv = gm.sample_weights(100, 1.5, 3)
    exact = cc.conditional_expected_cliques(wv, 3).value
    ests, ses = [], []
    for r in range(100):
        est = cc.conditional_expected_cliques(
            wv, 3, mode="sampled", samples=20_000, seed=(1, r)
        )
        ests.append(est.value)
        ses.append(est.stderr)
    ests = np.asarray(ests)
    pooled = math.sqrt(float(np.mean(np.square(ses))) / 100)
    assert abs(ests.mean() - exact) <= 3 * pooled


def test_sampled_vs_exact_subgraphs():
    wv = gm.sample_weights(30, 1.6, 5)
    H = sc.cycle_pattern(4)
    ex = cc.conditional_expected_subgraphs(wv, H).value
    est = cc.conditional_expected_subgraphs(wv, H, mode="sampled",
                                            samples=100_000, seed=9)
    assert est.value == pytest.approx(ex, abs=3 * est.stderr + 1e-9 * ex)


def test_monotone_in_single_weight():
    wv = gm.sample_weights(40, 1.4, 2)
    for H in (sc.path_pattern(3), sc.clique_pattern(3)):
        base = cc.conditional_expected_subgraphs(wv, H).value
        wmod = wv.weights.copy()
        wmod[5] *= 3
        up = cc.conditional_expected_subgraphs(gm.WeightVector(wmod, 1.4), H).value
        assert up >= base - 1e-12


def test_unconditional_consistency():
    # E over weights of the conditional count == two-level Monte Carlo mean
    from irgdev.subgraph_catalog import count_cliques

    n, alpha, k = 60, 1.6, 3
    conds, realized = [], []
    for r in range(300):
        wv = gm.sample_weights(n, alpha, (5, r))
        conds.append(cc.conditional_expected_cliques(wv, k).value)
        realized.append(count_cliques(gm.sample_graph(wv, (6, r)), k))
    conds = np.asarray(conds)
    realized = np.asarray(realized, dtype=float)
    se = math.sqrt(conds.var(ddof=1) / 300 + realized.var(ddof=1) / 300)
    assert abs(conds.mean() - realized.mean()) <= 3 * se


def test_realized_vs_conditional_triangles():
    wv = gm.sample_weights(200, 1.5, 11)
    rep = cc.realized_vs_conditional_check(wv, sc.clique_pattern(3), 300, 21)
    assert abs(rep.zscore) <= 4


def test_realized_vs_conditional_path4():
    wv = gm.sample_weights(200, 1.5, 11)
    rep = cc.realized_vs_conditional_check(wv, sc.path_pattern(4), 120, 22)
    assert abs(rep.zscore) <= 4


def test_realized_vs_conditional_degenerate():
    wv = gm.WeightVector(np.full(8, 1e9), 1.5)
    rep = cc.realized_vs_conditional_check(wv, sc.clique_pattern(3), 30, 1)
    assert rep.realized_mean == rep.conditional.value
    assert rep.zscore == 0.0


def test_parameter_errors():
    wv = gm.sample_weights(10, 1.5, 0)
    with pytest.raises(ParameterError):
        cc.conditional_expected_cliques(wv, 1)
    with pytest.raises(ParameterError):
        cc.conditional_expected_cliques(wv, 3, mode="nope")
    with pytest.raises(ParameterError):
        cc.conditional_expected_cliques(wv, 3, mode="sampled", samples=0)
    with pytest.raises(ParameterError):
        cc.realized_vs_conditional_check(wv, sc.clique_pattern(3), 10, 0)
