"""Line-based text formats.

``.dg`` decomposition graph::

    dg 1
    param k 4
    v <id>
    ce <id> <id>
    se <id> <id>
    fe <id> <id>

``.lay`` layout::

    lay 1
    param min_s <nm>
    param hp <nm>
    rect <polygon_id> <x1> <y1> <x2> <y2>

``#`` starts a comment in both. Coloring results are written as
``color <id> <c>`` lines followed by one ``summary`` line.
"""
import logging

from pydantic import BaseModel, ConfigDict, ValidationError

from mpld.errors import ParseError
from mpld.graphmodel import Coloring, CostReport, DecompositionGraph, EdgeKind, canonical_edge
from mpld.layoutio.geometry import DEFAULT_HP_NM, Layout, Rect, default_min_s

log = logging.getLogger(__name__)

GRAPH_HEADER = "dg 1"
LAYOUT_HEADER = "lay 1"


class GraphDocument(BaseModel):
    model_config = ConfigDict(frozen=True)

    graph: DecompositionGraph
    k: int | None = None


def _lines(text: str):
    """Yield (line number, tokens) for every non-blank, non-comment line."""
    for number, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].strip()
        if content:
            yield number, content.split()


def _int(token: str, line: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"expected integer {what}, got {token!r}", line) from None


def _expect_header(lines, header: str):
    first = next(lines, None)
    if first is None:
        raise ParseError(f"empty document, expected header {header!r}", 1)
    number, tokens = first
    if " ".join(tokens) != header:
        raise ParseError(f"expected header {header!r}, got {' '.join(tokens)!r}", number)


def parse_graph_document(text: str, source: str | None = None) -> GraphDocument:
    """Parse a ``.dg`` file into a graph plus its optional ``param k``.

    Input ids are remapped to dense 0..n-1 in declaration order; the original
    ids are kept as graph labels.
    """
    try:
        return _parse_graph_document(text)
    except ParseError as e:
        raise e.with_source(source) if source else e


def _parse_graph_document(text: str) -> GraphDocument:
    lines = _lines(text)
    _expect_header(lines, GRAPH_HEADER)

    k: int | None = None
    index: dict[int, int] = {}
    labels: list[int] = []
    edges: dict[EdgeKind, list[tuple[int, int, int]]] = {"ce": [], "se": [], "fe": []}

    for number, tokens in lines:
        directive, args = tokens[0], tokens[1:]
        if directive == "param":
            if len(args) != 2 or args[0] != "k":
                raise ParseError(f"unknown parameter line {' '.join(tokens)!r}", number)
            k = _int(args[1], number, "k")
            if k < 2:
                raise ParseError(f"k must be at least 2, got {k}", number)
        elif directive == "v":
            if len(args) != 1:
                raise ParseError("vertex line takes exactly one id", number)
            vid = _int(args[0], number, "vertex id")
            if vid < 0:
                raise ParseError(f"vertex id must be non-negative, got {vid}", number)
            if vid in index:
                raise ParseError(f"duplicate vertex id {vid}", number)
            index[vid] = len(labels)
            labels.append(vid)
        elif directive in edges:
            if len(args) != 2:
                raise ParseError(f"{directive} line takes exactly two ids", number)
            edges[directive].append((_int(args[0], number, "vertex id"), _int(args[1], number, "vertex id"), number))
        else:
            raise ParseError(f"unknown directive {directive!r}", number)

    resolved: dict[EdgeKind, list[tuple[int, int]]] = {"ce": [], "se": [], "fe": []}
    seen: dict[tuple[int, int], EdgeKind] = {}
    for kind, listed in edges.items():
        own: set[tuple[int, int]] = set()
        for a, b, number in listed:
            for vid in (a, b):
                if vid not in index:
                    raise ParseError(f"{kind} references unknown vertex {vid}", number)
            if a == b:
                raise ParseError(f"self-loop on vertex {a}", number)
            pair = canonical_edge(index[a], index[b])
            if pair in own:
                log.warning(f"line {number}: duplicate {kind} edge {a} {b} ignored")
                continue
            own.add(pair)
            if kind != "fe":
                if pair in seen:
                    raise ParseError(f"edge {a} {b} is both {seen[pair]} and {kind}", number)
                seen[pair] = kind
            resolved[kind].append(pair)

    graph = DecompositionGraph.from_edges(
        len(labels), resolved["ce"], resolved["se"], resolved["fe"], labels=labels,
    )
    log.debug(
        f"Parsed graph: {graph.n} vertices, {len(graph.conflict_edges)} CE, "
        f"{len(graph.stitch_edges)} SE, {len(graph.friendly_edges)} FE"
    )
    return GraphDocument(graph=graph, k=k)


def parse_graph_file(text: str, source: str | None = None) -> DecompositionGraph:
    return parse_graph_document(text, source).graph


def serialize_graph(graph: DecompositionGraph, k: int | None = None) -> str:
    """Canonical ``.dg`` text: vertices in id order, then sorted CE, SE, FE."""
    out = [GRAPH_HEADER]
    if k is not None:
        out.append(f"param k {k}")
    out.extend(f"v {graph.label(v)}" for v in graph.vertices)
    for kind, edges in (("ce", graph.conflict_edges), ("se", graph.stitch_edges), ("fe", graph.friendly_edges)):
        out.extend(f"{kind} {graph.label(u)} {graph.label(v)}" for u, v in edges)
    return "\n".join(out) + "\n"


def parse_layout_file(
        text: str,
        min_s: int | None = None,
        hp: int | None = None,
        source: str | None = None,
) -> Layout:
    """Parse a ``.lay`` file. ``min_s``/``hp`` are used when the file sets none."""
    try:
        return _parse_layout_file(text, min_s, hp)
    except ParseError as e:
        raise e.with_source(source) if source else e


def _parse_layout_file(text: str, min_s: int | None, hp: int | None) -> Layout:
    lines = _lines(text)
    _expect_header(lines, LAYOUT_HEADER)

    params: dict[str, int] = {}
    rects: list[Rect] = []
    for number, tokens in lines:
        directive, args = tokens[0], tokens[1:]
        if directive == "param":
            if len(args) != 2 or args[0] not in ("min_s", "hp"):
                raise ParseError(f"unknown parameter line {' '.join(tokens)!r}", number)
            value = _int(args[1], number, args[0])
            if value <= 0:
                raise ParseError(f"{args[0]} must be positive, got {value}", number)
            params[args[0]] = value
        elif directive == "rect":
            if len(args) != 5:
                raise ParseError("rect line takes polygon id and four coordinates", number)
            pid, x1, y1, x2, y2 = (_int(a, number, "coordinate") for a in args)
            try:
                rects.append(Rect(polygon_id=pid, x1=x1, y1=y1, x2=x2, y2=y2))
            except ValidationError:
                raise ParseError(f"rect ({x1},{y1})-({x2},{y2}) must have x1 < x2 and y1 < y2", number) from None
        else:
            raise ParseError(f"unknown directive {directive!r}", number)

    return Layout(
        rects=tuple(rects),
        min_s=params.get("min_s", min_s if min_s is not None else default_min_s(4)),
        hp=params.get("hp", hp if hp is not None else DEFAULT_HP_NM),
    )


def serialize_layout(layout: Layout) -> str:
    out = [LAYOUT_HEADER, f"param min_s {layout.min_s}", f"param hp {layout.hp}"]
    out.extend(f"rect {r.polygon_id} {r.x1} {r.y1} {r.x2} {r.y2}" for r in layout.rects)
    return "\n".join(out) + "\n"


def format_coloring(graph: DecompositionGraph, coloring: Coloring, report: CostReport, time_ms: int) -> str:
    out = [f"color {graph.label(v)} {c}" for v, c in enumerate(coloring.colors)]
    out.append(f"summary cn={report.conflicts} st={report.stitches} cost={report.weighted:.4f} time_ms={time_ms}")
    return "\n".join(out) + "\n"


def parse_coloring_output(text: str, graph: DecompositionGraph, k: int) -> tuple[Coloring, dict[str, str]]:
    """Read back a coloring written by :func:`format_coloring`."""
    index = {graph.label(v): v for v in graph.vertices}
    colors = [-1] * graph.n
    summary: dict[str, str] = {}
    for number, tokens in _lines(text):
        if tokens[0] == "color" and len(tokens) == 3:
            label = _int(tokens[1], number, "vertex id")
            if label not in index:
                raise ParseError(f"color for unknown vertex {label}", number)
            colors[index[label]] = _int(tokens[2], number, "color")
        elif tokens[0] == "summary":
            summary = dict(t.split("=", 1) for t in tokens[1:])
        else:
            raise ParseError(f"unexpected line {' '.join(tokens)!r}", number)
    missing = [graph.label(v) for v, c in enumerate(colors) if c < 0]
    if missing:
        raise ParseError(f"no color for vertices {missing[:5]}")
    return Coloring(colors=tuple(colors), k=k), summary
