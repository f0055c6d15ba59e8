import math

import pytest
from hypothesis import given, settings, strategies as st

from nibble_colour.core import (
    EdgeCorrespondence,
    LinearHypergraph,
    MissingWeightError,
    PreconditionError,
    WeightedListAssignment,
    colour_neighbours,
    restrict_lists,
    validate_colouring,
    validate_instance,
    weighted_size,
)
from conftest import path_graph, star_graph, triangle_graph, random_sigma, random_micro_instance


# ---------------------------------------------------------------------------
# weighted_size
# ---------------------------------------------------------------------------


def test_weighted_size_empty_is_zero():
    lists = WeightedListAssignment.unit({0: [1]})
    assert weighted_size([], lists) == 0.0


def test_weighted_size_two_terms():
    lists = WeightedListAssignment.build({0: [1], 1: [2]}, {(0, 1): 0.3, (1, 2): 0.5})
    assert weighted_size([(0, 1), (1, 2)], lists) == pytest.approx(0.8)


def test_weighted_size_ten_tenths():
    lists = WeightedListAssignment.build({0: list(range(10))}, {(0, c): 0.1 for c in range(10)})
    assert weighted_size([(0, c) for c in range(10)], lists) == pytest.approx(1.0, abs=1e-12)


def test_weighted_size_missing_pair():
    lists = WeightedListAssignment.unit({0: [1]})
    with pytest.raises(MissingWeightError):
        weighted_size([(0, 2)], lists)


@given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5)), max_size=20), st.randoms())
@settings(max_examples=100, deadline=None)
def test_weighted_size_order_invariant(pairs, rand):
    lists = WeightedListAssignment.build(
        {e: list(range(6)) for e in range(6)},
        {(e, c): 0.1 + 0.13 * ((e + c) % 7) for e in range(6) for c in range(6)},
    )
    shuffled = list(pairs)
    rand.shuffle(shuffled)
    assert weighted_size(pairs, lists) == weighted_size(shuffled, lists)


# ---------------------------------------------------------------------------
# colour_neighbours
# ---------------------------------------------------------------------------


def test_colour_neighbours_isolated_edge():
    g = LinearHypergraph.build(2, [(0, 1)], k=2)
    lists = WeightedListAssignment.unit({0: [1, 2]})
    assert colour_neighbours(g, lists, EdgeCorrespondence(), 0, 0, 1) == ()


def test_colour_neighbours_path_identity():
    g = path_graph(2)
    lists = WeightedListAssignment.unit({0: [1, 2], 1: [1, 3]})
    assert colour_neighbours(g, lists, EdgeCorrespondence(), 0, 1, 1) == ((1, 1),)
    # colour 2 is not in the neighbour's list
    assert colour_neighbours(g, lists, EdgeCorrespondence(), 0, 1, 2) == ()


def test_colour_neighbours_star():
    g = star_graph(3)
    lists = WeightedListAssignment.unit({0: [5], 1: [5], 2: [5]})
    assert colour_neighbours(g, lists, EdgeCorrespondence(), 0, 0, 5) == ((1, 5), (2, 5))


def test_colour_neighbours_respects_sigma():
    g = path_graph(2)
    lists = WeightedListAssignment.unit({0: [1], 1: [7]})
    sigma = EdgeCorrespondence(maps={(0, 1): {1: 7}})
    # (1,7) blocks (0,1) because sigma_{1,0}(7) = 1
    assert colour_neighbours(g, lists, sigma, 0, 1, 1) == ((1, 7),)
    assert colour_neighbours(g, lists, sigma, 1, 1, 7) == ((0, 1),)


def test_colour_neighbours_preconditions():
    g = path_graph(2)
    lists = WeightedListAssignment.unit({0: [1], 1: [1]})
    with pytest.raises(PreconditionError):
        colour_neighbours(g, lists, EdgeCorrespondence(), 0, 2, 1)  # vertex not in edge
    with pytest.raises(PreconditionError):
        colour_neighbours(g, lists, EdgeCorrespondence(), 0, 0, 9)  # colour not listed


def test_colour_neighbour_sets_disjoint_across_vertices_and_colours():
    for seed in range(30):
        graph, lists, sigma, _ = random_micro_instance(seed)
        for e in lists.edge_ids():
            per_vertex = {}
            for v in graph.edges[e]:
                union_at_v = set()
                for c in lists.colours(e):
                    nb = set(colour_neighbours(graph, lists, sigma, e, v, c))
                    # sigma consistency: each returned pair genuinely blocks (e, c)
                    for f, c2 in nb:
                        assert sigma.image(f, e, c2) == c
                    # distinct colours at one vertex have disjoint neighbour sets
                    assert not (union_at_v & nb)
                    union_at_v |= nb
                per_vertex[v] = union_at_v
            vs = list(per_vertex)
            for i in range(len(vs)):
                for j in range(i + 1, len(vs)):
                    assert not (per_vertex[vs[i]] & per_vertex[vs[j]])


# ---------------------------------------------------------------------------
# validate_colouring
# ---------------------------------------------------------------------------


def test_validate_colouring_distinct_ok():
    g = path_graph(2)
    lists = WeightedListAssignment.unit({0: [1, 2], 1: [1, 2]})
    assert validate_colouring(g, lists, EdgeCorrespondence(), {0: 1, 1: 2}) == []


def test_validate_colouring_identity_conflict():
    g = path_graph(2)
    lists = WeightedListAssignment.unit({0: [1, 2], 1: [1, 2]})
    violations = validate_colouring(g, lists, EdgeCorrespondence(), {0: 1, 1: 1})
    assert len(violations) == 1 and violations[0].kind == "blocking"


def test_validate_colouring_list_violation():
    g = LinearHypergraph.build(2, [(0, 1)], k=2)
    lists = WeightedListAssignment.unit({0: [1]})
    violations = validate_colouring(g, lists, EdgeCorrespondence(), {0: 9})
    assert [v.kind for v in violations] == ["list"]


def test_validate_colouring_sigma_conflict_only_via_map():
    g = path_graph(2)
    lists = WeightedListAssignment.unit({0: [1, 2], 1: [1, 7]})
    sigma = EdgeCorrespondence(maps={(0, 1): {1: 7}})
    assert validate_colouring(g, lists, sigma, {0: 1, 1: 7}) != []
    # same colour is fine now: the stored partial map does not pair (1, 1)
    assert validate_colouring(g, lists, sigma, {0: 1, 1: 1}) == []


def test_validate_sub_colouring_of_valid_is_valid():
    for seed in range(40):
        graph, lists, sigma, _ = random_micro_instance(seed)
        from nibble_colour.harness import brute_force_colour

        result = brute_force_colour(graph, lists, sigma, node_cap=10_000)
        if result.status != "found":
            continue
        full = result.colouring
        assert validate_colouring(graph, lists, sigma, full) == []
        sub = {e: c for e, c in full.items() if e % 2 == 0}
        assert validate_colouring(graph, lists, sigma, sub) == []


# ---------------------------------------------------------------------------
# restrict_lists
# ---------------------------------------------------------------------------


def test_restrict_lists_nothing_coloured():
    g = path_graph(2)
    lists = WeightedListAssignment.unit({0: [1, 2], 1: [1, 2]})
    restricted = restrict_lists(g, lists, EdgeCorrespondence(), {})
    assert restricted.lists == {0: (1, 2), 1: (1, 2)}


def test_restrict_lists_identity_removal():
    g = path_graph(2)
    lists = WeightedListAssignment.unit({0: [1, 2], 1: [1, 2]})
    restricted = restrict_lists(g, lists, EdgeCorrespondence(), {1: 1})
    assert restricted.lists == {0: (2,)}


def test_restrict_lists_applies_permutation():
    g = path_graph(2)
    lists = WeightedListAssignment.unit({0: [1, 7, 9], 1: [1]})
    sigma = EdgeCorrespondence(maps={(1, 0): {1: 7}})
    restricted = restrict_lists(g, lists, sigma, {1: 1})
    assert restricted.lists == {0: (1, 9)}


def test_restrict_lists_rejects_invalid_colouring():
    g = path_graph(2)
    lists = WeightedListAssignment.unit({0: [1], 1: [1]})
    with pytest.raises(PreconditionError):
        restrict_lists(g, lists, EdgeCorrespondence(), {0: 1, 1: 1})


def test_restrict_lists_idempotent():
    for seed in range(25):
        graph, lists, sigma, _ = random_micro_instance(seed)
        from nibble_colour.harness import brute_force_colour

        result = brute_force_colour(graph, lists, sigma, node_cap=10_000)
        if result.status != "found":
            continue
        partial = {e: c for e, c in result.colouring.items() if e % 2 == 0}
        once = restrict_lists(graph, lists, sigma, partial)
        twice = restrict_lists(graph, once, sigma, partial)
        assert once.lists == twice.lists and once.weights == twice.weights


# ---------------------------------------------------------------------------
# validate_instance
# ---------------------------------------------------------------------------


def test_validate_instance_triangle_ok():
    g = triangle_graph()
    lists = WeightedListAssignment.unit({0: [0], 1: [1], 2: [2]})
    assert validate_instance(g, EdgeCorrespondence(), lists, (0, 5)) == []


def test_validate_instance_linearity_violation():
    g = LinearHypergraph.build(4, [(0, 1, 2), (0, 1, 3)], k=3)
    lists = WeightedListAssignment.unit({0: [0], 1: [0]})
    kinds = [v.kind for v in validate_instance(g, EdgeCorrespondence(), lists)]
    assert "linearity" in kinds


def test_validate_instance_weight_range():
    g = LinearHypergraph.build(2, [(0, 1)], k=2)
    lists = WeightedListAssignment.build({0: [3]}, {(0, 3): 1.5})
    kinds = [v.kind for v in validate_instance(g, EdgeCorrespondence(), lists)]
    assert kinds == ["weight-range"]


def test_validate_instance_uniformity():
    g = LinearHypergraph(vertex_count=3, edges=((0, 1, 2),), k=2)
    lists = WeightedListAssignment.unit({0: [0]})
    kinds = [v.kind for v in validate_instance(g, EdgeCorrespondence(), lists)]
    assert "uniformity" in kinds


def test_validate_instance_sigma_checks():
    g = path_graph(2)
    lists = WeightedListAssignment.unit({0: [0, 1], 1: [0, 1]})
    bad_inverse = EdgeCorrespondence(maps={(0, 1): {0: 1}, (1, 0): {0: 1}})
    kinds = [v.kind for v in validate_instance(g, bad_inverse, lists)]
    assert "sigma-inverse" in kinds
    not_injective = EdgeCorrespondence(maps={(0, 1): {0: 1, 1: 1}})
    kinds = [v.kind for v in validate_instance(g, not_injective, lists)]
    assert "sigma-injective" in kinds
    non_adjacent = EdgeCorrespondence(maps={(0, 5): {0: 0}})
    kinds = [v.kind for v in validate_instance(g, non_adjacent, lists)]
    assert "sigma-adjacency" in kinds
    outside = EdgeCorrespondence(maps={(0, 1): {0: 99}})
    kinds = [v.kind for v in validate_instance(g, outside, lists, (0, 5))]
    assert "sigma-universe" in kinds


def test_sigma_inverse_composition_property():
    g = star_graph(4)
    sigma = random_sigma(g, 8, seed=11, density=1.0)
    for (e, f), m in sigma.maps.items():
        for c1, c2 in m.items():
            assert sigma.image(f, e, c2) == c1
