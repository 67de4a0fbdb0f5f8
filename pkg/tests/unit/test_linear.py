import pytest
from hypothesis import given, settings, strategies as st

from mpld.errors import ParameterError
from mpld.graphmodel import Coloring, ColoringProblem, evaluate_cost
from mpld.solvers.linear import (
    build_order_buckets,
    degree_coloring,
    linear_assign,
    min_cost_color,
    post_refinement,
    run_linear,
    sequence_coloring,
    three_round_coloring,
)
from support import colored_graphs, decomposition_graphs, graph_of


def order_sensitive_graph():
    """Vertex-id order walks into a conflict that degree-ordered rounds avoid."""
    return graph_of(5, ce=[(0, 3), (2, 3), (1, 2), (0, 4), (1, 4), (2, 4), (3, 4)])


@st.composite
def forests(draw, max_n=14):
    n = draw(st.integers(1, max_n))
    edges = []
    for v in range(1, n):
        parent = draw(st.one_of(st.none(), st.integers(0, v - 1)))
        if parent is not None:
            edges.append((parent, v))
    return graph_of(n, ce=edges)


# ==========================================
# Vertex orders
# ==========================================

def test_order_buckets_split_on_conflict_degree():
    graph = graph_of(14, ce=[(0, v) for v in range(1, 8)] + [(8, v) for v in range(9, 14)])
    buckets = build_order_buckets(graph, 4)
    assert buckets.vec1 == (0,)
    assert buckets.vec2 == (8,)
    assert buckets.vec3 == (1, 2, 3, 4, 5, 6, 7, 9, 10, 11, 12, 13)
    assert buckets.ordered()[:2] == [0, 8]


def test_sequence_order_is_beaten_by_three_rounds():
    graph = order_sensitive_graph()
    sequence = sequence_coloring(None, graph, 3)
    assert sequence.colors == (0, 0, 1, 2, 1)
    assert evaluate_cost(graph, sequence).conflicts == 1
    buckets = build_order_buckets(graph, 3)
    assert buckets.ordered() == [4, 0, 1, 2, 3]
    three = three_round_coloring(buckets, graph, 3)
    assert three.colors == (1, 2, 1, 2, 0)
    assert evaluate_cost(graph, three).conflicts == 0
    assert len(degree_coloring(buckets, graph, 3)) == 5


def test_first_round_spreads_isolated_vertices_over_all_masks():
    graph = graph_of(4)
    assert three_round_coloring(build_order_buckets(graph, 4), graph, 4).colors == (0, 1, 2, 3)


def test_orders_must_cover_every_vertex():
    with pytest.raises(ParameterError):
        sequence_coloring([0, 0, 1], graph_of(3), 3)


# ==========================================
# Color choice
# ==========================================

def test_friendly_neighbor_breaks_ties():
    graph = graph_of(3, fe=[(0, 2)])
    assert min_cost_color(graph, [1, -1, -1], 2, 4) == 1
    assert min_cost_color(graph_of(3), [1, -1, -1], 2, 4) == 0


def test_stitch_neighbor_pulls_its_color():
    graph = graph_of(3, ce=[(0, 2)], se=[(1, 2)])
    assert min_cost_color(graph, [0, 2, -1], 2, 3) == 2


def test_min_cost_color_requires_an_uncolored_vertex():
    with pytest.raises(ParameterError):
        min_cost_color(graph_of(2), [0, -1], 0, 3)


# ==========================================
# Full linear assignment
# ==========================================

def test_linear_assign_peels_the_order_sensitive_graph():
    graph = order_sensitive_graph()
    outcome = run_linear(ColoringProblem.from_graph(graph, 3))
    assert outcome.peeled == 5
    assert outcome.chosen is None
    assert evaluate_cost(graph, linear_assign(graph, 3)).conflicts == 0


def test_run_linear_reports_three_candidates():
    graph = order_sensitive_graph()
    outcome = run_linear(ColoringProblem.from_graph(graph, 3), peel=False)
    assert [c.order for c in outcome.candidates] == ["sequence", "degree", "three_round"]
    assert outcome.candidates[0].conflicts == 1
    assert outcome.chosen == "three_round"
    assert outcome.peeled == 0


@settings(deadline=None)
@given(forests(), st.sampled_from([2, 3, 4]))
def test_forests_are_colored_without_conflicts(graph, k):
    assert evaluate_cost(graph, linear_assign(graph, k)).conflicts == 0


@settings(deadline=None)
@given(decomposition_graphs(max_n=12), st.sampled_from([3, 4, 5]))
def test_linear_assign_returns_a_total_coloring(graph, k):
    coloring = linear_assign(graph, k)
    assert len(coloring) == graph.n
    assert all(0 <= c < k for c in coloring.colors)


@given(colored_graphs(ks=(3, 4)), st.booleans())
def test_post_refinement_never_raises_the_cost(case, fixed_point):
    graph, coloring = case
    refined = post_refinement(graph, coloring, coloring.k, fixed_point=fixed_point)
    assert evaluate_cost(graph, refined).weighted <= evaluate_cost(graph, coloring).weighted + 1e-12


def test_post_refinement_fixes_an_obvious_conflict():
    graph = graph_of(2, ce=[(0, 1)])
    refined = post_refinement(graph, Coloring(colors=(0, 0), k=2), 2)
    assert evaluate_cost(graph, refined).conflicts == 0


def test_linear_assign_rejects_single_mask():
    with pytest.raises(ParameterError):
        linear_assign(graph_of(2), 1)


@settings(deadline=None)
@given(decomposition_graphs(max_n=12), st.sampled_from([2, 3, 4]))
def test_peer_selection_is_no_worse_than_any_single_order(graph, k):
    outcome = run_linear(ColoringProblem.from_graph(graph, k), peel=False)
    final = evaluate_cost(graph, Coloring(colors=tuple(outcome.colors), k=k)).weighted
    buckets = build_order_buckets(graph, k)
    singles = [
        sequence_coloring(None, graph, k),
        degree_coloring(buckets, graph, k),
        three_round_coloring(buckets, graph, k),
    ]
    assert [c.weighted for c in outcome.candidates] == [evaluate_cost(graph, s).weighted for s in singles]
    assert final <= min(c.weighted for c in outcome.candidates) + 1e-9


@settings(deadline=None)
@given(decomposition_graphs(max_n=12), st.sampled_from([2, 3, 4, 5]))
def test_linear_assign_is_no_worse_than_a_single_mask(graph, k):
    uniform = evaluate_cost(graph, Coloring.uniform(graph.n, k)).weighted
    assert evaluate_cost(graph, linear_assign(graph, k)).weighted <= uniform + 1e-9


def test_single_mask_wins_when_stitches_outweigh_one_conflict():
    """Eleven pieces stitch to both ends of one conflict; splitting them costs 1.1."""
    pieces = range(2, 13)
    graph = graph_of(13, ce=[(0, 1)], se=[(0, p) for p in pieces] + [(1, p) for p in pieces])
    coloring = linear_assign(graph, 2)
    assert evaluate_cost(graph, coloring).weighted <= 1.0 + 1e-9
