import logging

import pytest
from hypothesis import given, settings, strategies as st

from mpld.division import (
    Component,
    biconnected_split,
    independent_components,
    merge_at_articulations,
    peel_low_degree,
    reinsert_peeled,
)
from mpld.errors import InvariantError, ParameterError
from mpld.graphmodel import Coloring, evaluate_cost
from mpld.solvers.exact import solve_exact
from support import clique_edges, connected_graphs, decomposition_graphs, graph_of


def test_independent_components_are_ordered_by_smallest_vertex():
    graph = graph_of(6, ce=[(3, 5), (0, 4)], se=[(4, 1)])
    parts = independent_components(graph)
    assert [p.vertices for p in parts] == [(0, 1, 4), (2,), (3, 5)]
    assert parts[0].graph.conflict_edges == ((0, 2),)
    assert parts[0].graph.stitch_edges == ((1, 2),)


# ==========================================
# Peeling
# ==========================================

def test_k_clique_peels_completely_but_k_plus_one_does_not():
    assert peel_low_degree(graph_of(4, ce=clique_edges(range(4))), 4).reduced.size == 0
    assert peel_low_degree(graph_of(5, ce=clique_edges(range(5))), 4).reduced.size == 5


def test_peeling_cascades_from_pendant_vertices():
    """Vertex 4 only qualifies once its pendant neighbor 5 is gone."""
    graph = graph_of(6, ce=clique_edges(range(4)) + [(0, 4), (1, 4), (4, 5)])
    result = peel_low_degree(graph, 3)
    assert result.reduced.vertices == (0, 1, 2, 3)
    assert [e.vertex for e in result.stack] == [5, 4]
    assert [e.d_conf for e in result.stack] == [1, 2]


def test_peel_rules_differ_on_stitched_vertices():
    """d_conf=1, d_stit=2: kept by the strict rule, peeled by d_conf + d_stit < K."""
    graph = graph_of(6, ce=clique_edges(range(5)) + [(0, 5)], se=[(1, 5), (2, 5)])
    assert peel_low_degree(graph, 4, "strict").reduced.size == 6
    literal = peel_low_degree(graph, 4, "literal")
    assert literal.reduced.vertices == (0, 1, 2, 3, 4)
    assert literal.stack[0].d_stit == 2


def test_peel_rejects_single_mask():
    with pytest.raises(ParameterError):
        peel_low_degree(graph_of(2, ce=[(0, 1)]), 1)


@given(decomposition_graphs(max_n=12), st.sampled_from([3, 4, 5]), st.data())
def test_reinsertion_never_adds_a_conflict_at_a_peeled_vertex(graph, k, data):
    result = peel_low_degree(graph, k)
    partial = [-1] * graph.n
    for v in result.reduced.vertices:
        partial[v] = data.draw(st.integers(0, k - 1))
    coloring = reinsert_peeled(result.stack, partial, graph, k)
    peeled = {e.vertex for e in result.stack}
    for u, v in graph.conflict_edges:
        if u in peeled or v in peeled:
            assert coloring.colors[u] != coloring.colors[v]


@settings(max_examples=30, deadline=None)
@given(decomposition_graphs(max_n=9), st.sampled_from([3, 4]))
def test_peeled_core_keeps_the_minimum_conflicts(graph, k):
    """An optimal core plus reinsertion reaches the fewest conflicts of the whole graph."""
    result = peel_low_degree(graph, k)
    partial = [-1] * graph.n
    if result.reduced.size:
        core = solve_exact(result.reduced.graph, k, alpha=0.0).coloring
        for local, v in enumerate(result.reduced.vertices):
            partial[v] = core.colors[local]
    coloring = reinsert_peeled(result.stack, partial, graph, k)
    expected = solve_exact(graph, k, alpha=0.0).report.conflicts
    assert evaluate_cost(graph, coloring).conflicts == expected


def test_reinsertion_reports_an_impossible_vertex():
    """A forged stack entry for a vertex of a K+1 clique has no free color."""
    graph = graph_of(5, ce=clique_edges(range(5)))
    stack = peel_low_degree(graph_of(5), 4).stack[:1]
    with pytest.raises(InvariantError):
        reinsert_peeled(stack, [-1, 0, 1, 2, 3], graph, 4)


# ==========================================
# Biconnected blocks
# ==========================================

def test_two_triangles_share_one_articulation_vertex():
    graph = graph_of(5, ce=[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4)], se=[(2, 4)])
    blocks, links = biconnected_split(graph)
    assert [b.vertices for b in blocks] == [(0, 1, 2), (2, 3, 4)]
    assert len(links) == 1
    assert (links[0].vertex, links[0].block_a, links[0].block_b) == (2, 0, 1)


def test_path_splits_into_edge_blocks():
    blocks, links = biconnected_split(graph_of(3, ce=[(0, 1), (1, 2)]))
    assert [b.vertices for b in blocks] == [(0, 1), (1, 2)]
    assert [link.vertex for link in links] == [1]


def test_lone_vertex_is_its_own_block():
    blocks, links = biconnected_split(graph_of(1))
    assert [b.vertices for b in blocks] == [(0,)]
    assert links == []


def test_articulation_merge_rotates_blocks_onto_the_shared_vertex():
    graph = graph_of(5, ce=[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)])
    blocks, links = biconnected_split(graph)
    local = [Coloring(colors=(0, 1, 2), k=3), Coloring(colors=(0, 1, 2), k=3)]
    merged = merge_at_articulations(local, blocks, links, 3)
    assert merged.colors == (0, 1, 2, 0, 1)
    assert evaluate_cost(graph, merged).conflicts == 0


def test_articulation_merge_needs_connected_links():
    graph = graph_of(4, ce=[(0, 1), (2, 3)])
    blocks = [Component.of(graph, [0, 1]), Component.of(graph, [2, 3])]
    local = [Coloring(colors=(0, 1), k=2)] * 2
    with pytest.raises(InvariantError):
        merge_at_articulations(local, blocks, [], 2)


@st.composite
def block_chains(draw):
    """Three connected graphs glued end to start at single shared vertices."""
    parts = [draw(connected_graphs(min_n=2, max_n=5)) for _ in range(3)]
    ce, se = [], []
    offset = 0
    for part in parts:
        ce += [(u + offset, v + offset) for u, v in part.conflict_edges]
        se += [(u + offset, v + offset) for u, v in part.stitch_edges]
        offset += part.n - 1
    return draw(st.sampled_from([3, 4])), graph_of(offset + 1, ce, se)


@settings(max_examples=30, deadline=None)
@given(block_chains())
def test_articulation_merge_of_optimal_blocks_is_optimal(case):
    k, graph = case
    blocks, links = biconnected_split(graph)
    assert len(blocks) >= 3
    merged = merge_at_articulations([solve_exact(b.graph, k).coloring for b in blocks], blocks, links, k)
    assert evaluate_cost(graph, merged).weighted == pytest.approx(solve_exact(graph, k).report.weighted, abs=1e-9)


def test_reinsertion_logs_the_stitches_it_adds(caplog):
    """Mask 0 is taken by a conflict, so the peeled vertex splits from its stitch partner."""
    graph = graph_of(3, ce=[(0, 2)], se=[(1, 2)])
    stack = [e for e in peel_low_degree(graph_of(3), 2).stack if e.vertex == 2]
    with caplog.at_level(logging.DEBUG, logger="mpld.division"):
        coloring = reinsert_peeled(stack, [0, 0, -1], graph, 2)
    assert coloring.colors == (0, 0, 1)
    assert "reinserted with 1 stitches" in caplog.text
