import itertools

import numpy as np
import pytest

from irgdev import graph_model as gm
from irgdev.errors import ParameterError


def test_pareto_inverse_cdf_values():
    assert gm.pareto_inverse_cdf(1.0, 1.5) == pytest.approx(1.0)
    assert gm.pareto_inverse_cdf(0.5, 1.5) == pytest.approx(0.5 ** (-2 / 3), abs=1e-12)
    assert gm.pareto_inverse_cdf(0.25, 1.5) == pytest.approx(2.5198, abs=2e-4)


def test_pareto_inverse_cdf_domain():
    with pytest.raises(ParameterError):
        gm.pareto_inverse_cdf(0.5, 2.0)
    with pytest.raises(ParameterError):
        gm.pareto_inverse_cdf(0.0, 1.5)
    with pytest.raises(ParameterError):
        gm.pareto_inverse_cdf(1.5, 1.5)


def test_pareto_inverse_cdf_monotone():
    us = np.linspace(0.01, 1.0, 50)
    ws = gm.pareto_inverse_cdf(us, 1.3)
    assert np.all(np.diff(ws) < 0) or np.all(np.diff(ws) <= 0)
    assert np.all(ws >= 1.0)


def test_sample_weights_rejects_empty():
    with pytest.raises(ParameterError):
        gm.sample_weights(0, 1.5, 1)


def test_sample_weights_deterministic():
    a = gm.sample_weights(10_000, 1.5, 123)
    b = gm.sample_weights(10_000, 1.5, 123)
    assert np.array_equal(a.weights, b.weights)
    c = gm.sample_weights(10_000, 1.5, 124)
    assert not np.array_equal(a.weights, c.weights)


def test_sample_weights_tail_fraction():
    w = gm.sample_weights(100_000, 1.5, 7).weights
    frac = np.mean(w > 10.0)
    target = 10.0 ** -1.5
    assert target * 0.9 <= frac <= target * 1.1


def test_empirical_tail_ks_distance():
    # sup-norm distance between empirical and exact tail over 1e5 samples
    n = 100_000
    passes = 0
    for seed in range(100):
        w = np.sort(gm.sample_weights(n, 1.5, seed).weights)
        tail_emp_right = np.arange(n - 1, -1, -1) / n  # F_bar just right of each point
        tail_emp_left = np.arange(n, 0, -1) / n
        tail_exact = w ** -1.5
        d = max(
            np.abs(tail_emp_right - tail_exact).max(),
            np.abs(tail_emp_left - tail_exact).max(),
        )
        passes += d < 0.01
    assert passes >= 95


def test_edge_probability_values():
    assert gm.edge_probability(100.0, 100.0, 5, 1.5) == 1.0
    assert gm.edge_probability(1.0, 1.0, 100, 1.5) == pytest.approx(1 / 300)
    assert gm.edge_probability(10.0, 30.0, 100, 1.5) == 1.0  # exactly mu*n


def test_edge_probability_symmetric_monotone():
    rng = np.random.default_rng(0)
    for _ in range(100):
        wi, wj = 1.0 + rng.random(2) * 50
        p = gm.edge_probability(wi, wj, 200, 1.7)
        assert p == gm.edge_probability(wj, wi, 200, 1.7)
        assert p <= 1.0
        assert gm.edge_probability(wi + 1.0, wj, 200, 1.7) >= p


def test_sample_graph_complete_when_saturated():
    w = gm.WeightVector(np.full(7, 1e8), 1.5)
    G = gm.sample_graph(w, 5)
    assert G.edge_count == 21


def test_sample_graph_deterministic():
    w = gm.sample_weights(500, 1.5, 11)
    a = gm.sample_graph(w, 3)
    b = gm.sample_graph(w, 3)
    assert np.array_equal(np.sort(a.edges.view("i8,i8"), axis=0),
                          np.sort(b.edges.view("i8,i8"), axis=0))


def test_sample_graph_binomial_edge_count():
    # equal weights => every pair has the same probability p < 1
    n, alpha = 50, 1.5
    wval = 2.0
    p = wval * wval / (gm.mean_weight(alpha) * n)
    w = gm.WeightVector(np.full(n, wval), alpha)
    npairs = n * (n - 1) // 2
    reps = 500
    counts = [gm.sample_graph(w, (5, r)).edge_count for r in range(reps)]
    mean = np.mean(counts)
    se = np.sqrt(npairs * p * (1 - p) / reps)
    assert abs(mean - npairs * p) <= 3 * se


def test_sample_graph_per_pair_frequencies():
    # heterogeneous weights: empirical pair frequencies match the kernel
    alpha = 1.6
    w = gm.WeightVector(np.array([1.0, 2.0, 4.0, 9.0, 1.5, 3.0]), alpha)
    n = w.n
    reps = 20_000
    freq = np.zeros((n, n))
    for r in range(reps):
        G = gm.sample_graph(w, (77, r))
        for u, v in G.edges:
            freq[u, v] += 1
            freq[v, u] += 1
    freq /= reps
    for i, j in itertools.combinations(range(n), 2):
        p = gm.edge_probability(w.weights[i], w.weights[j], n, alpha)
        se = np.sqrt(p * (1 - p) / reps)
        assert abs(freq[i, j] - p) <= 4.5 * se + 1e-12


def test_graph_sample_symmetric_irreflexive():
    w = gm.sample_weights(300, 1.5, 2)
    G = gm.sample_graph(w, 8)
    ns = G.neighbor_sets()
    for u, v in G.edges:
        assert u != v
        assert v in ns[u] and u in ns[v]


def test_plant_hubs():
    w = gm.WeightVector(np.ones(5), 1.5)
    same = gm.plant_hubs(w, [])
    assert np.array_equal(same.weights, w.weights)
    planted = gm.plant_hubs(w, [100.0, 200.0])
    assert planted.weights.tolist() == [100.0, 200.0, 1.0, 1.0, 1.0]
    assert w.weights.tolist() == [1.0] * 5  # original untouched
    with pytest.raises(ParameterError):
        gm.plant_hubs(w, np.ones(6))
    with pytest.raises(ParameterError):
        gm.plant_hubs(w, [0.5])


def test_seed_streams_independent():
    a = gm.sample_weights(100, 1.5, (9, 0))
    b = gm.sample_weights(100, 1.5, (9, 1))
    assert not np.array_equal(a.weights, b.weights)
