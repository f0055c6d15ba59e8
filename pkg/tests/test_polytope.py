import math

import pytest

from nibble_colour import rng
from nibble_colour.core import (
    EdgeCorrespondence,
    LinearHypergraph,
    PreconditionError,
    WeightedListAssignment,
)
from nibble_colour.harness import GeneratorSpec, enumerate_matchings, generate
from nibble_colour.polytope import (
    EnumerationLimitError,
    UnsupportedInstanceError,
    edmonds_membership,
    lists_to_fractional,
    polytope_lists_to_weights,
)
from conftest import triangle_graph


def test_single_edge_indicator_inside():
    g = LinearHypergraph.build(2, [(0, 1)], k=2)
    verdict = edmonds_membership(g, {0: 1.0})
    assert verdict.inside and verdict.witness is None


def test_zero_vector_inside():
    g = triangle_graph()
    assert edmonds_membership(g, {e: 0.0 for e in range(3)}).inside


def test_triangle_half_vector_odd_set_witness():
    g = triangle_graph()
    verdict = edmonds_membership(g, {e: 0.5 for e in range(3)})
    assert not verdict.inside
    assert verdict.witness.kind == "odd-set"
    assert verdict.witness.subject == (0, 1, 2)
    assert verdict.witness.slack == pytest.approx(1.0 - 1.5)


def test_degree_violation_witness():
    g = LinearHypergraph.build(3, [(0, 1), (0, 2)], k=2)
    verdict = edmonds_membership(g, {0: 0.7, 1: 0.7})
    assert not verdict.inside and verdict.witness.kind == "degree"
    assert verdict.witness.subject == (0,)


def test_nonnegativity_witness():
    g = LinearHypergraph.build(2, [(0, 1)], k=2)
    verdict = edmonds_membership(g, {0: -0.5})
    assert not verdict.inside and verdict.witness.kind == "nonnegativity"


def test_enumeration_limit_and_unsupported():
    g = LinearHypergraph.build(25, [(0, 1)], k=2)
    with pytest.raises(EnumerationLimitError):
        edmonds_membership(g, {0: 0.1})
    g3 = LinearHypergraph.build(3, [(0, 1, 2)], k=3)
    with pytest.raises(UnsupportedInstanceError):
        edmonds_membership(g3, {0: 0.1})
    g = LinearHypergraph.build(2, [(0, 1)], k=2)
    with pytest.raises(PreconditionError):
        edmonds_membership(g, {})  # undefined on edge 0


def _random_graph(seed, n=7, p=0.5):
    return generate(GeneratorSpec(kind="random-graph", n=n, p=p, seed=seed))


def test_all_matching_indicators_inside():
    for seed in range(8):
        g = _random_graph(seed)
        if g.edge_count == 0 or g.edge_count > 12:
            continue
        for matching in enumerate_matchings(g):
            x = {e: 1.0 if e in matching else 0.0 for e in range(g.edge_count)}
            assert edmonds_membership(g, x).inside


def test_random_convex_combinations_inside():
    for seed in range(6):
        g = _random_graph(seed, n=6, p=0.6)
        if g.edge_count == 0 or g.edge_count > 12:
            continue
        matchings = list(enumerate_matchings(g))
        for trial in range(10):
            coeffs = [rng.uniform(seed, 95, trial, i) for i in range(len(matchings))]
            total = sum(coeffs)
            x = {e: 0.0 for e in range(g.edge_count)}
            for lam, matching in zip(coeffs, matchings):
                for e in matching:
                    x[e] += lam / total
            assert edmonds_membership(g, x, tol=1e-9).inside


def test_shrink_monotonicity():
    for seed in range(10):
        g = _random_graph(seed, n=6, p=0.6)
        if g.edge_count == 0:
            continue
        x = {e: 1.2 * rng.uniform(seed, 96, e) / max(1, g.degree(g.edges[e][0])) for e in range(g.edge_count)}
        passes = [edmonds_membership(g, x, shrink=s).inside for s in (0.0, 0.1, 0.3, 0.5)]
        # passing at larger shrink implies passing at smaller shrink
        for small, large in zip(passes, passes[1:]):
            assert small or not large


def test_lists_to_fractional():
    lists = WeightedListAssignment.unit({0: [1, 2, 3, 4], 1: [1, 2]})
    x = lists_to_fractional(lists)
    assert x == {0: pytest.approx(0.25), 1: pytest.approx(0.5)}
    with pytest.raises(PreconditionError):
        lists_to_fractional(WeightedListAssignment.build({0: []}, {}))


def test_lists_to_fractional_regular_degree_sums():
    g = generate(GeneratorSpec(kind="regular-graph", n=8, d=3, seed=2))
    lists = WeightedListAssignment.unit({e: list(range(4)) for e in range(g.edge_count)})
    x = lists_to_fractional(lists)
    assert all(v == pytest.approx(0.25) for v in x.values())
    for v in range(8):
        assert sum(x[e] for e in g.edges_at(v)) == pytest.approx(0.75)


def test_polytope_lists_to_weights_example():
    # path: big lists, delta = 0.2 -> mu = 1/8, weighted size 1.25
    g = LinearHypergraph.build(3, [(0, 1), (1, 2)], k=2)
    lists = WeightedListAssignment.unit({e: list(range(10)) for e in range(2)})
    out = polytope_lists_to_weights(g, lists, 0.2)
    for e in (0, 1):
        assert out.weight(e, 0) == pytest.approx(1 / 8)
        assert sum(out.weight(e, c) for c in out.colours(e)) == pytest.approx(1.25)


def test_polytope_lists_to_weights_delta_limit():
    g = LinearHypergraph.build(3, [(0, 1), (1, 2)], k=2)
    lists = WeightedListAssignment.unit({e: list(range(10)) for e in range(2)})
    out = polytope_lists_to_weights(g, lists, 1e-9)
    assert sum(out.weight(0, c) for c in out.colours(0)) == pytest.approx(1.0, abs=1e-6)


def test_polytope_lists_to_weights_range_error():
    g = LinearHypergraph.build(2, [(0, 1)], k=2)
    lists = WeightedListAssignment.unit({0: [1]})
    with pytest.raises(PreconditionError):
        polytope_lists_to_weights(g, lists, 0.5)  # mu = 2 > 1


def test_polytope_lists_to_weights_rejects_outside():
    g = triangle_graph()
    lists = WeightedListAssignment.unit({e: [0, 1] for e in range(3)})  # x = 1/2 violates odd set
    with pytest.raises(PreconditionError):
        polytope_lists_to_weights(g, lists, 0.1)


def test_degree_weight_construction_satisfies_conditions():
    """Weights 1/max-degree with lists of size >= (1+eps) max-degree give
    weighted list size >= 1+eps and per-vertex per-colour sums <= 1."""
    from nibble_colour.harness import build_local_lists, neighbourhood_audit

    eps = 0.5
    for seed in range(5):
        g = _random_graph(seed, n=8, p=0.5)
        if g.edge_count == 0:
            continue
        lists = build_local_lists(g, eps, universe_size=64, mode="degree-weighted", seed=seed)
        for e in lists.edge_ids():
            assert lists.list_weight(e) >= 1 + eps - 1e-12
        audit = neighbourhood_audit(g, lists, EdgeCorrespondence())
        assert audit.max_colour_sum <= 1.0 + 1e-12
