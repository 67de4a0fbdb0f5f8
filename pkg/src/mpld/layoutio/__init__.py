from mpld.layoutio.formats import (
    GraphDocument,
    format_coloring,
    parse_coloring_output,
    parse_graph_document,
    parse_graph_file,
    parse_layout_file,
    serialize_graph,
    serialize_layout,
)
from mpld.layoutio.geometry import Layout, Metric, Rect, build_graph, default_min_s, gap
from mpld.layoutio.svg import PALETTE, emit_svg

__all__ = [
    "GraphDocument",
    "Layout",
    "Metric",
    "PALETTE",
    "Rect",
    "build_graph",
    "default_min_s",
    "emit_svg",
    "format_coloring",
    "gap",
    "parse_coloring_output",
    "parse_graph_document",
    "parse_graph_file",
    "parse_layout_file",
    "serialize_graph",
    "serialize_layout",
]
