import logging

import pytest
from hypothesis import given, settings, strategies as st
from pydantic import ValidationError

from mpld.errors import DimensionError, ParameterError, ParseError
from mpld.graphmodel import Coloring, CostReport
from mpld.layoutio import (
    PALETTE,
    Layout,
    Rect,
    build_graph,
    default_min_s,
    emit_svg,
    format_coloring,
    gap,
    parse_coloring_output,
    parse_graph_document,
    parse_graph_file,
    parse_layout_file,
    serialize_graph,
    serialize_layout,
)
from support import graph_of

GRAPH_TEXT = """dg 1
# two triangles sharing vertex 30
param k 3
v 10
v 20
v 30
v 40
ce 10 20
ce 20 30
ce 10 30
se 30 40
fe 10 40
"""


def rect(pid, x1, y1, x2, y2):
    return Rect(polygon_id=pid, x1=x1, y1=y1, x2=x2, y2=y2)


# ==========================================
# Graph files
# ==========================================

def test_graph_ids_are_remapped_and_kept_as_labels():
    document = parse_graph_document(GRAPH_TEXT)
    graph = document.graph
    assert document.k == 3
    assert graph.n == 4
    assert graph.labels == (10, 20, 30, 40)
    assert graph.conflict_edges == ((0, 1), (0, 2), (1, 2))
    assert graph.stitch_edges == ((2, 3),)
    assert graph.friendly_edges == ((0, 3),)


def test_serialized_graph_parses_back_to_the_same_graph():
    graph = parse_graph_file(GRAPH_TEXT)
    again = parse_graph_document(serialize_graph(graph, k=3))
    assert again.graph == graph
    assert again.k == 3


@pytest.mark.parametrize(
    "text, line",
    [
        ("dg 2\n", 1),
        ("dg 1\nv 1\nv 1\n", 3),
        ("dg 1\nv 1\nv 2\nce 1 7\n", 4),
        ("dg 1\nv 1\nce 1 1\n", 3),
        ("dg 1\nv 1\nv 2\nce 1 2\nse 2 1\n", 5),
        ("dg 1\nv 1\nedge 1 2\n", 3),
        ("dg 1\nv x\n", 2),
    ],
    ids=["header", "duplicate-vertex", "unknown-vertex", "self-loop", "ce-and-se", "directive", "not-an-int"],
)
def test_graph_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(ParseError) as excinfo:
        parse_graph_document(text, source="bad.dg")
    assert excinfo.value.line == line
    assert str(excinfo.value).startswith(f"bad.dg:{line}: ")


def test_duplicate_edges_are_collapsed_with_a_warning(caplog):
    with caplog.at_level(logging.WARNING):
        graph = parse_graph_file("dg 1\nv 1\nv 2\nce 1 2\nce 2 1\n")
    assert graph.conflict_edges == ((0, 1),)
    assert "duplicate ce edge" in caplog.text


# ==========================================
# Layout files and graph construction
# ==========================================

def test_default_coloring_distance_depends_on_mask_count():
    assert default_min_s(4) == 80
    assert default_min_s(5) == 110


def test_layout_parameters_prefer_the_file():
    text = "lay 1\nparam min_s 100\nrect 0 0 0 20 20\n"
    assert parse_layout_file(text, min_s=80).min_s == 100
    assert parse_layout_file("lay 1\nrect 0 0 0 20 20\n", min_s=110).min_s == 110
    plain = parse_layout_file("lay 1\nrect 0 0 0 20 20\n")
    assert (plain.min_s, plain.hp) == (80, 20)


def test_layout_without_area_is_a_parse_error():
    with pytest.raises(ParseError) as excinfo:
        parse_layout_file("lay 1\nrect 0 0 0 20 20\nrect 1 30 0 30 20\n")
    assert excinfo.value.line == 3


def test_rect_needs_positive_area():
    with pytest.raises(ValidationError):
        rect(0, 10, 0, 5, 20)


def test_layout_round_trip():
    layout = Layout(rects=(rect(0, 0, 0, 20, 20), rect(1, 40, 0, 60, 20)), min_s=80, hp=20)
    assert parse_layout_file(serialize_layout(layout)) == layout


def test_build_graph_edge_rules():
    layout = Layout(
        rects=(
            rect(0, 0, 0, 40, 20),      # 0
            rect(0, 40, 0, 80, 20),     # 1: abuts 0, same polygon
            rect(1, 100, 0, 120, 20),   # 2: 20 nm from 1
            rect(2, 210, 0, 230, 20),   # 3: 90 nm from 2, friendly band
            rect(3, 310, 0, 330, 20),   # 4: exactly 80 nm from 3
            rect(0, 80, 20, 100, 40),   # 5: touches 1 only at a corner
        ),
        min_s=80,
        hp=20,
    )
    graph = build_graph(layout)
    assert (0, 1) in graph.stitch_edges
    assert (1, 5) not in graph.stitch_edges
    assert (1, 2) in graph.conflict_edges
    assert (2, 3) in graph.friendly_edges
    assert (3, 4) not in graph.conflict_edges
    assert (3, 4) not in graph.friendly_edges


def test_metric_switch_changes_diagonal_distances():
    a, b = rect(0, 0, 0, 20, 20), rect(1, 70, 70, 90, 90)
    assert gap(a, b) == pytest.approx(70.7107, abs=1e-4)
    assert gap(a, b, "rectilinear") == 100.0
    layout = Layout(rects=(a, b), min_s=80, hp=20)
    assert build_graph(layout).conflict_edges == ((0, 1),)
    assert build_graph(layout, "rectilinear").conflict_edges == ()


def test_overlapping_polygons_are_flagged(caplog):
    layout = Layout(rects=(rect(0, 0, 0, 40, 20), rect(1, 20, 0, 60, 20)), min_s=80)
    with caplog.at_level(logging.WARNING):
        graph = build_graph(layout)
    assert graph.conflict_edges == ((0, 1),)
    assert "overlap" in caplog.text


# ==========================================
# Coloring output and SVG
# ==========================================

def test_coloring_output_uses_file_ids():
    graph = parse_graph_file(GRAPH_TEXT)
    coloring = Coloring(colors=(0, 1, 2, 2), k=3)
    text = format_coloring(graph, coloring, CostReport.of(0, 0, 0.1), time_ms=0)
    assert text.splitlines() == [
        "color 10 0",
        "color 20 1",
        "color 30 2",
        "color 40 2",
        "summary cn=0 st=0 cost=0.0000 time_ms=0",
    ]
    parsed, summary = parse_coloring_output(text, graph, 3)
    assert parsed == coloring
    assert summary["cn"] == "0"


def test_coloring_output_must_cover_every_vertex():
    graph = graph_of(2, ce=[(0, 1)])
    with pytest.raises(ParseError):
        parse_coloring_output("color 0 1\n", graph, 2)


def test_svg_fills_rects_with_their_mask_color():
    layout = Layout(rects=(rect(0, 0, 0, 20, 20), rect(1, 40, 0, 60, 20)), min_s=80)
    svg = emit_svg(layout, Coloring(colors=(0, 1), k=4))
    assert svg.count("<rect") == 2
    assert PALETTE[0] in svg and PALETTE[1] in svg
    assert "matrix(1 0 0 -1 0 40)" in svg


def test_svg_rejects_bad_colorings():
    layout = Layout(rects=(rect(0, 0, 0, 20, 20),), min_s=80)
    with pytest.raises(DimensionError):
        emit_svg(layout, Coloring(colors=(0, 1), k=4))
    with pytest.raises(ParameterError):
        emit_svg(layout, Coloring(colors=(0,), k=len(PALETTE) + 1))


# ==========================================
# Construction invariants
# ==========================================

@st.composite
def small_layouts(draw):
    """Unit-height wires on a coarse grid, a few polygons each with up to three pieces."""
    rects = []
    for pid in range(draw(st.integers(1, 6))):
        x = draw(st.integers(0, 8)) * 40
        y = draw(st.integers(0, 8)) * 40
        for _ in range(draw(st.integers(1, 3))):
            width = draw(st.integers(1, 3)) * 20
            rects.append(rect(pid, x, y, x + width, y + 20))
            x += width
    return Layout(rects=tuple(rects), min_s=80, hp=20)


def _relabelled(edges, n):
    return sorted(tuple(sorted((n - 1 - u, n - 1 - v))) for u, v in edges)


@settings(max_examples=50, deadline=None)
@given(small_layouts())
def test_reversed_rect_list_builds_the_mirrored_graph(layout):
    forward = build_graph(layout)
    backward = build_graph(layout.model_copy(update={"rects": layout.rects[::-1]}))
    n = len(layout.rects)
    assert list(backward.conflict_edges) == _relabelled(forward.conflict_edges, n)
    assert list(backward.stitch_edges) == _relabelled(forward.stitch_edges, n)
    assert list(backward.friendly_edges) == _relabelled(forward.friendly_edges, n)


@settings(max_examples=50, deadline=None)
@given(small_layouts(), st.lists(st.integers(10, 200), min_size=2, max_size=4, unique=True))
def test_conflict_sets_grow_with_the_coloring_distance(layout, distances):
    edge_sets = [
        set(build_graph(layout.model_copy(update={"min_s": d})).conflict_edges) for d in sorted(distances)
    ]
    for smaller, larger in zip(edge_sets, edge_sets[1:]):
        assert smaller <= larger
