import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from qcomposite.graph import (BinomialIntersectionParams, ErParams, KeyAssignment, ModelParams,
                              UndirectedGraph, build_graph, graph_from_json, graph_to_dict,
                              graph_to_json, sample_binomial_intersection, sample_er,
                              sample_key_assignment, sample_rkg, shared_key_count)
from qcomposite.seeding import RngSeed
from qcomposite.theory import exact_edge_probability


def naive_edges(a: KeyAssignment, q: int) -> set:
    n = a.params.n
    return {(i, j) for i in range(n) for j in range(i + 1, n) if shared_key_count(a, i, j) >= q}


def edge_frequency(params, seeds) -> float:
    return sum(sample_rkg(params, RngSeed(s, "freq")).m for s in range(seeds)) / seeds


# --- parameters and graph type ----------------------------------------------

@pytest.mark.parametrize("bad", [(1, 1, 1, 1), (5, 0, 1, 3), (5, 3, 2, 10), (5, 1, 11, 10),
                                 (5, 1.5, 2, 10)])
def test_model_params_rejects(bad):
    with pytest.raises(ValueError):
        ModelParams(*bad)


def test_graph_is_canonical():
    g = UndirectedGraph(4, [(3, 1), (0, 2), (1, 3), (2, 0)])
    assert g.edge_list() == [(0, 2), (1, 3)]
    assert g == UndirectedGraph(4, [(0, 2), (1, 3)])
    assert g.has_edge(3, 1) and not g.has_edge(0, 1)


@pytest.mark.parametrize("edges", [[(0, 0)], [(0, 4)], [(-1, 2)]])
def test_graph_rejects_loops_and_out_of_range(edges):
    with pytest.raises(ValueError):
        UndirectedGraph(4, edges)


def test_named_graphs():
    assert UndirectedGraph.complete(5).m == 10
    assert UndirectedGraph.cycle(6).m == 6
    assert UndirectedGraph.star(4).n == 5
    pet = UndirectedGraph.petersen()
    assert pet.m == 15 and set(pet.degrees.tolist()) == {3}


def test_without_nodes_relabels_in_order():
    g = UndirectedGraph.path(5).without_nodes([1])
    assert g.n == 4 and g.edge_list() == [(1, 2), (2, 3)]


# --- key assignment -----------------------------------------------------------

def test_full_pool_forced():
    a = sample_key_assignment(ModelParams(2, 1, 3, 3), 123)
    assert a.rings.tolist() == [[0, 1, 2], [0, 1, 2]]


def test_assignment_deterministic():
    p = ModelParams(1000, 2, 88, 50000)
    assert sample_key_assignment(p, 7) == sample_key_assignment(p, 7)
    assert sample_key_assignment(p, 7) != sample_key_assignment(p, 8)


@given(n=st.integers(2, 30), K=st.integers(1, 40), extra=st.integers(0, 60),
       seed=st.integers(0, 2**32))
def test_rings_are_sorted_distinct_in_range(n, K, extra, seed):
    p = ModelParams(n, 1, K, K + extra)
    r = sample_key_assignment(p, seed).rings
    assert r.shape == (n, K)
    assert r.min() >= 0 and r.max() < p.P
    assert np.all(np.diff(r, axis=1) > 0)


def test_occupancy_chi_square():
    n, K, P = 10_000, 20, 10_000
    rings = sample_key_assignment(ModelParams(n, 1, K, P), 2024).rings
    occupancy = np.bincount(rings.ravel(), minlength=P)
    dist = stats.binom(n, K / P)
    lo, hi = int(dist.ppf(0.001)), int(dist.ppf(0.999))
    observed = [np.sum(occupancy <= lo)]
    expected = [dist.cdf(lo)]
    for c in range(lo + 1, hi):
        observed.append(np.sum(occupancy == c))
        expected.append(dist.pmf(c))
    observed.append(np.sum(occupancy >= hi))
    expected.append(dist.sf(hi - 1))
    expected = np.asarray(expected) * P
    assert expected.min() >= 5
    _, pvalue = stats.chisquare(observed, expected * sum(observed) / expected.sum())
    assert pvalue > 0.001


def test_assignment_validation():
    p = ModelParams(2, 1, 2, 5)
    with pytest.raises(ValueError):
        KeyAssignment(p, [[0, 1], [3, 3]])
    with pytest.raises(ValueError):
        KeyAssignment(p, [[0, 1], [3, 5]])
    with pytest.raises(ValueError):
        KeyAssignment(p, [[0, 1, 2], [0, 1, 2]])


# --- shared keys and the edge rule --------------------------------------------

def _assign(rings, q=1, P=10):
    return KeyAssignment(ModelParams(len(rings), q, len(rings[0]), P), rings)


@pytest.mark.parametrize("r1,r2,count", [
    ([0, 1, 2], [2, 3, 4], 1), ([0, 1, 2], [0, 1, 2], 3), ([0, 1, 2], [5, 6, 7], 0)])
def test_shared_key_count(r1, r2, count):
    assert shared_key_count(_assign([r1, r2]), 0, 1) == count


@pytest.mark.parametrize("i,j", [(0, 0), (0, 2), (-1, 0)])
def test_shared_key_count_rejects(i, j):
    with pytest.raises(ValueError):
        shared_key_count(_assign([[0, 1, 2], [2, 3, 4]]), i, j)


@pytest.mark.parametrize("method", ["sparse", "dense"])
def test_edge_boundary_at_q(method):
    a = _assign([[0, 1, 2, 3], [2, 3, 7, 8], [3, 5, 6, 9]], q=2)
    assert build_graph(a, method=method).edge_list() == [(0, 1)]


@pytest.mark.parametrize("method", ["sparse", "dense"])
def test_identical_rings_give_complete_graph(method):
    a = _assign([[1, 4, 6]] * 5, q=3)
    assert build_graph(a, method=method) == UndirectedGraph.complete(5)


def test_edge_rule_matches_naive_loop():
    rng = np.random.default_rng(99)
    for trial in range(500):
        n = int(rng.integers(2, 13))
        K = int(rng.integers(1, 8))
        P = K + int(rng.integers(0, 20))
        q = int(rng.integers(1, K + 1))
        a = sample_key_assignment(ModelParams(n, q, K, P), RngSeed(trial, "naive"))
        want = naive_edges(a, q)
        for method in ("sparse", "dense"):
            assert set(build_graph(a, method=method).edge_list()) == want


def test_dense_limit():
    a = sample_key_assignment(ModelParams(300, 1, 2, 50), 1)
    with pytest.raises(ValueError):
        build_graph(a, method="dense")


@given(seed=st.integers(0, 2**32), q=st.integers(1, 4))
def test_edges_shrink_with_q(seed, q):
    a = sample_key_assignment(ModelParams(40, q, 6, 30), seed)
    low = set(build_graph(a, q=q).edge_list())
    high = set(build_graph(a, q=q + 1).edge_list())
    assert high <= low


@given(seed=st.integers(0, 2**32))
def test_sampled_graphs_are_simple(seed):
    g = sample_rkg(ModelParams(60, 1, 5, 100), seed)
    e = g.edges
    assert np.all(e[:, 0] < e[:, 1])
    assert len({tuple(x) for x in e.tolist()}) == g.m
    assert all(i not in g.adj_sets[i] for i in range(g.n))
    assert all(j in g.adj_sets[i] and i in g.adj_sets[j] for i, j in g.edge_list())


# --- sampler distributions ------------------------------------------------------

def _within_4_sigma(freq, p, trials):
    return abs(freq - p) <= 4 * math.sqrt(p * (1 - p) / trials)


def test_two_singletons_collide_half_the_time():
    assert _within_4_sigma(edge_frequency(ModelParams(2, 1, 1, 2), 10_000), 0.5, 10_000)


def test_q2_pairs_must_coincide():
    assert _within_4_sigma(edge_frequency(ModelParams(2, 2, 2, 4), 10_000), 1 / 6, 10_000)


def test_q1_edge_probability():
    K, P, trials = 3, 20, 10_000
    p = 1 - math.comb(P - K, K) / math.comb(P, K)
    assert exact_edge_probability(1, K, P) == pytest.approx(p, abs=1e-12)
    assert _within_4_sigma(edge_frequency(ModelParams(2, 1, K, P), trials), p, trials)


def test_er_extremes():
    assert sample_er(ErParams(20, 0.0), 1).m == 0
    assert sample_er(ErParams(20, 1.0), 1) == UndirectedGraph.complete(20)


def test_er_edge_count():
    counts = np.array([sample_er(ErParams(100, 0.5), s).m for s in range(200)])
    sigma = math.sqrt(4950 * 0.25)
    assert np.all(np.abs(counts - 2475) <= 4.5 * sigma)
    assert abs(counts.mean() - 2475) <= 4 * sigma / math.sqrt(200)


def test_er_pairs_are_uniform():
    # Every pair of a 5-node graph should show up about equally often.
    hits = np.zeros((5, 5))
    for s in range(4000):
        for i, j in sample_er(ErParams(5, 0.3), s).edge_list():
            hits[i, j] += 1
    upper = hits[np.triu_indices(5, 1)]
    assert np.all(np.abs(upper / 4000 - 0.3) <= 4 * math.sqrt(0.21 / 4000))


def test_binomial_intersection_extremes():
    assert sample_binomial_intersection(BinomialIntersectionParams(10, 0.0, 5, 1), 1).m == 0
    full = sample_binomial_intersection(BinomialIntersectionParams(10, 1.0, 5, 3), 1)
    assert full == UndirectedGraph.complete(10)


def test_binomial_intersection_single_key():
    p = BinomialIntersectionParams(2, 0.5, 1, 1)
    freq = sum(sample_binomial_intersection(p, s).m for s in range(10_000)) / 10_000
    assert _within_4_sigma(freq, 0.25, 10_000)


def test_sampler_determinism():
    p = ModelParams(500, 2, 40, 20000)
    assert sample_rkg(p, 5) == sample_rkg(p, 5)
    assert sample_er(ErParams(300, 0.05), 5) == sample_er(ErParams(300, 0.05), 5)


# --- JSON -----------------------------------------------------------------------

def test_json_round_trip_and_format():
    p = ModelParams(100, 2, 30, 10000)
    g = sample_rkg(p, 1)
    text = graph_to_json(g, "rkg", p, RngSeed(1, "rkg"))
    assert text == graph_to_json(sample_rkg(p, 1), "rkg", p, RngSeed(1, "rkg"))
    d = json.loads(text)
    assert list(d) == ["n", "model", "params", "seed", "edges"]
    assert d["edges"] == sorted(d["edges"])
    assert all(i < j for i, j in d["edges"])
    assert graph_from_json(text) == g


def test_json_rejects_unknown_model():
    with pytest.raises(ValueError):
        graph_to_dict(UndirectedGraph(2), "ws", {}, None)
