import itertools
from decimal import ROUND_HALF_UP, Decimal

import pytest
from hypothesis import given, settings, strategies as st

from mpld.errors import GraphError
from mpld.flow import max_flow, weighted_network
from mpld.ghtree import (
    CrossingEdge,
    CutRecord,
    TreeEdge,
    build_gomory_hu,
    format_tree_dump,
    merge_with_rotation,
    refine_and_round,
    remove_kcuts,
    round_weight,
)
from mpld.graphmodel import Coloring, evaluate_cost
from mpld.layoutio import parse_graph_file
from support import clique_edges, connected_graphs, graph_of


def two_cliques_joined_by(bridges):
    return graph_of(10, ce=clique_edges(range(5)) + clique_edges(range(5, 10)) + bridges)


# ==========================================
# Tree construction
# ==========================================

@settings(max_examples=40, deadline=None)
@given(connected_graphs(max_n=10))
def test_tree_path_minimum_equals_pairwise_max_flow(graph):
    network = weighted_network(graph)
    tree = build_gomory_hu(network)
    assert len(tree.edges) == graph.n - 1
    for s, t in itertools.combinations(range(graph.n), 2):
        assert tree.path_min(s, t) == max_flow(network, s, t).value


def test_disconnected_network_is_rejected():
    with pytest.raises(GraphError):
        build_gomory_hu(weighted_network(graph_of(3, ce=[(0, 1)])))


def test_single_vertex_tree_has_no_edges():
    assert build_gomory_hu(weighted_network(graph_of(1))).edges == ()


def test_tree_dump_uses_file_ids():
    graph = parse_graph_file("dg 1\nv 10\nv 20\nce 10 20\n")
    tree = build_gomory_hu(weighted_network(graph))
    assert format_tree_dump(tree) == "ghtree 1 0 1\n"
    assert format_tree_dump(tree, graph) == "ghtree 20 10 1\n"


# ==========================================
# Rounding
# ==========================================

@pytest.mark.parametrize("weight, rounded", [(3.4, 3), (3.8, 4), (3.5, 4), (2.8, 3), (1.4, 1), (0.0, 0)])
def test_round_weight_examples(weight, rounded):
    assert round_weight(weight) == rounded


@given(st.integers(0, 10_000))
def test_round_weight_is_half_up_on_one_decimal(tenths):
    expected = int((Decimal(tenths) / 10).quantize(Decimal(1), rounding=ROUND_HALF_UP))
    assert round_weight(tenths / 10) == expected


def test_refine_and_round_keeps_scaled_weights():
    graph = graph_of(3, ce=[(0, 1), (0, 2)], se=[(1, 2)])
    tree = refine_and_round(build_gomory_hu(weighted_network(graph)))
    assert sorted(e.weight for e in tree.edges) == [2.0, 2.0]
    assert sorted(e.scaled for e in tree.edges) == [20, 24]


# ==========================================
# Cut removal and rotation merge
# ==========================================

def test_light_bridge_between_cliques_is_removed():
    graph = two_cliques_joined_by([(0, 5), (1, 6)])
    tree = refine_and_round(build_gomory_hu(weighted_network(graph)))
    pieces, cuts = remove_kcuts(tree, 4, graph)
    assert pieces == [[0, 1, 2, 3, 4], [5, 6, 7, 8, 9]]
    assert len(cuts) == 1
    assert {cuts[0].component_a, cuts[0].component_b} == {0, 1}
    assert (cuts[0].conflict_count, cuts[0].stitch_count) == (2, 0)


def test_heavy_bridge_is_kept():
    graph = two_cliques_joined_by([(0, 5), (1, 6), (2, 7), (3, 8)])
    tree = refine_and_round(build_gomory_hu(weighted_network(graph)))
    pieces, cuts = remove_kcuts(tree, 4, graph)
    assert pieces == [list(range(10))]
    assert cuts == []


def test_cut_of_two_stitches_is_kept():
    """Two stitch edges weigh 2.8, which rounds below K=4, but the cut still stays."""
    graph = graph_of(8, ce=clique_edges(range(4)) + clique_edges(range(4, 8)), se=[(0, 4), (1, 5)])
    tree = refine_and_round(build_gomory_hu(weighted_network(graph)))
    assert 28 in [e.scaled for e in tree.edges]

    pieces, cuts = remove_kcuts(tree, 4, graph)
    assert all(cut.stitch_count <= 1 for cut in cuts)
    assert pieces == [[0, 1, 4, 5], [2], [3], [6], [7]]
    assert all(cut.conflict_count == 3 for cut in cuts)


@settings(max_examples=40, deadline=None)
@given(connected_graphs(max_n=10), st.sampled_from([4, 5]))
def test_removed_cuts_cross_at_most_one_stitch(graph, k):
    tree = refine_and_round(build_gomory_hu(weighted_network(graph)))
    pieces, cuts = remove_kcuts(tree, k, graph)
    assert all(cut.stitch_count <= 1 for cut in cuts)
    assert len(pieces) == len(cuts) + 1


def test_rotation_clears_the_bridge_conflicts():
    graph = two_cliques_joined_by([(0, 5), (1, 6)])
    tree = refine_and_round(build_gomory_hu(weighted_network(graph)))
    pieces, cuts = remove_kcuts(tree, 4, graph)
    local = Coloring(colors=(0, 1, 2, 3, 0), k=4)
    merged = merge_with_rotation([local, local], pieces, cuts, graph, 4)
    assert merged.colors == (0, 1, 2, 3, 0, 1, 2, 3, 0, 1)
    assert evaluate_cost(graph, merged).conflicts == 2


@st.composite
def precolored_pairs(draw):
    k = draw(st.sampled_from([4, 5]))
    a = draw(st.integers(1, 5))
    b = draw(st.integers(1, 5))
    pairs = list(itertools.product(range(a), range(a, a + b)))
    bridges = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=k - 1))
    left = draw(st.lists(st.integers(0, k - 1), min_size=a, max_size=a))
    right = draw(st.lists(st.integers(0, k - 1), min_size=b, max_size=b))
    return k, a, b, bridges, left, right


@given(precolored_pairs())
def test_fewer_than_k_crossing_conflicts_always_rotate_away(case):
    k, a, b, bridges, left, right = case
    graph = graph_of(a + b, ce=bridges)
    cut = CutRecord(
        tree_edge=TreeEdge(u=0, v=a, weight=float(len(bridges)), scaled=10 * len(bridges)),
        crossing=tuple(CrossingEdge(u=u, v=v, kind="ce") for u, v in bridges),
        component_a=0,
        component_b=1,
    )
    merged = merge_with_rotation(
        [Coloring(colors=tuple(left), k=k), Coloring(colors=tuple(right), k=k)],
        [list(range(a)), list(range(a, a + b))],
        [cut],
        graph,
        k,
    )
    assert evaluate_cost(graph, merged).conflicts == 0
