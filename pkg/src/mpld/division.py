"""Graph division: independent components, low-degree peeling, biconnected
blocks, and the matching merge steps that rebuild a global coloring.
"""
import logging
from collections import deque
from typing import Literal, Sequence

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field

from mpld.errors import InvariantError, ParameterError
from mpld.graphmodel import DEFAULT_ALPHA, Coloring, ColoringProblem, DecompositionGraph

log = logging.getLogger(__name__)

PeelRule = Literal["strict", "literal"]


class Component(BaseModel):
    """A vertex subset of a parent graph with its induced subgraph.

    Local vertex ``i`` of ``graph`` is parent vertex ``vertices[i]``.
    """
    model_config = ConfigDict(frozen=True)

    vertices: tuple[int, ...]
    graph: DecompositionGraph

    @classmethod
    def of(cls, parent: DecompositionGraph, vertices: Sequence[int]) -> "Component":
        ordered = tuple(sorted(vertices))
        return cls(vertices=ordered, graph=parent.induced_subgraph(ordered))

    @property
    def size(self) -> int:
        return len(self.vertices)


class PeelEntry(BaseModel):
    """A peeled vertex and the degrees that qualified it, measured at removal."""
    model_config = ConfigDict(frozen=True)

    vertex: int
    d_conf: int
    d_stit: int


class PeelResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    reduced: Component
    stack: tuple[PeelEntry, ...] = Field(description="Removal order; reinsert from the end.")


class ArticulationLink(BaseModel):
    """Two blocks sharing a cut vertex."""
    model_config = ConfigDict(frozen=True)

    vertex: int
    block_a: int
    block_b: int


class DivisionPlan(BaseModel):
    """What the division stages did to one input graph, for reporting."""
    model_config = ConfigDict(frozen=True)

    components: tuple[tuple[int, ...], ...] = ()
    peel_stack: tuple[PeelEntry, ...] = ()
    articulation_links: tuple[ArticulationLink, ...] = ()
    cut_links: tuple = ()

    def covered(self) -> set[int]:
        vertices = {v for comp in self.components for v in comp}
        vertices.update(entry.vertex for entry in self.peel_stack)
        return vertices


def independent_components(graph: DecompositionGraph) -> list[Component]:
    """Connected components of CE u SE, ordered by their smallest vertex."""
    parts = sorted((sorted(c) for c in nx.connected_components(graph.to_networkx())), key=lambda c: c[0])
    return [Component.of(graph, part) for part in parts]


def _qualifies(d_conf: int, d_stit: int, k: int, rule: PeelRule) -> bool:
    if rule == "literal":
        return d_conf + d_stit < k
    return d_conf < k and d_stit < 2


def peel_problem(problem: ColoringProblem, rule: PeelRule = "strict") -> tuple[list[int], list[PeelEntry]]:
    """Queue-based peeling on a weighted problem; degrees count multiplicity.

    Returns the remaining vertices (ascending) and the removal stack.
    """
    k = problem.k
    d_conf = [problem.conflict_degree(v) for v in range(problem.n)]
    d_stit = [problem.stitch_degree(v) for v in range(problem.n)]
    removed = [False] * problem.n
    queued = [False] * problem.n
    queue: deque[int] = deque()
    for v in range(problem.n):
        if _qualifies(d_conf[v], d_stit[v], k, rule):
            queue.append(v)
            queued[v] = True

    stack: list[PeelEntry] = []
    while queue:
        v = queue.popleft()
        stack.append(PeelEntry(vertex=v, d_conf=d_conf[v], d_stit=d_stit[v]))
        removed[v] = True
        for degree, adj in ((d_conf, problem.ce_adj), (d_stit, problem.se_adj)):
            for u, w in adj[v]:
                if removed[u]:
                    continue
                degree[u] -= w
                if not queued[u] and _qualifies(d_conf[u], d_stit[u], k, rule):
                    queue.append(u)
                    queued[u] = True

    remaining = [v for v in range(problem.n) if not removed[v]]
    return remaining, stack


def peel_low_degree(graph: DecompositionGraph, k: int, rule: PeelRule = "strict") -> PeelResult:
    """Repeatedly remove vertices with d_conf < K and d_stit < 2.

    ``rule="literal"`` switches to the looser d_conf + d_stit < K test.
    """
    if k < 2:
        raise ParameterError(f"K must be at least 2, got {k}")
    remaining, stack = peel_problem(ColoringProblem.from_graph(graph, k), rule)
    log.debug(f"Peeled {len(stack)} of {graph.n} vertices (K={k}, rule={rule})")
    return PeelResult(reduced=Component.of(graph, remaining), stack=tuple(stack))


def reinsert_into(problem: ColoringProblem, stack: Sequence[PeelEntry], colors: list[int]) -> None:
    """Color the peeled vertices in place, last removed first.

    ``colors`` holds -1 for every peeled vertex. Each vertex takes a color
    with no conflict to colored neighbors, fewest stitches, lowest index.
    """
    for entry in reversed(stack):
        v = entry.vertex
        best: tuple[int, int] | None = None
        for c in range(problem.k):
            conflicts, stitches = problem.increment(v, c, colors)
            if conflicts:
                continue
            if best is None or stitches < best[0]:
                best = (stitches, c)
        if best is None:
            raise InvariantError(
                f"No conflict-free color for peeled vertex {v} (d_conf={entry.d_conf} at removal, K={problem.k})."
            )
        if best[0]:
            log.debug(f"Peeled vertex {v} reinserted with {best[0]} stitches to colored neighbors")
        colors[v] = best[1]


def reinsert_peeled(
        stack: Sequence[PeelEntry],
        partial: Sequence[int],
        graph: DecompositionGraph,
        k: int,
        alpha: float = DEFAULT_ALPHA,
) -> Coloring:
    """Complete ``partial`` (length n, -1 on peeled vertices) into a total coloring."""
    colors = list(partial)
    reinsert_into(ColoringProblem.from_graph(graph, k, alpha), stack, colors)
    return Coloring(colors=tuple(colors), k=k)


def biconnected_split(graph: DecompositionGraph) -> tuple[list[Component], list[ArticulationLink]]:
    """Biconnected blocks of CE u SE for a connected graph.

    Cut vertices belong to every incident block. For each cut vertex the
    blocks containing it are chained in index order, so the links form a
    spanning tree over the blocks.
    """
    if graph.n == 0:
        return [], []
    union = graph.to_networkx()
    blocks = sorted((tuple(sorted(b)) for b in nx.biconnected_components(union)), key=lambda b: (b[0], b))
    if not blocks:
        # A single vertex without edges.
        return [Component.of(graph, [0])], []

    containing: dict[int, list[int]] = {}
    for index, block in enumerate(blocks):
        for v in block:
            containing.setdefault(v, []).append(index)

    links = []
    for v in sorted(nx.articulation_points(union)):
        incident = containing[v]
        for a, b in zip(incident, incident[1:]):
            links.append(ArticulationLink(vertex=v, block_a=a, block_b=b))

    return [Component.of(graph, block) for block in blocks], links


def merge_at_articulations(
        colorings: Sequence[Coloring],
        blocks: Sequence[Component],
        links: Sequence[ArticulationLink],
        k: int,
) -> Coloring:
    """Glue block colorings by rotating each block onto its fixed neighbor.

    Blocks are attached in DFS order from the largest block; whole-block
    rotation leaves every internal conflict and stitch unchanged.
    """
    if not blocks:
        return Coloring(colors=(), k=k)
    n = len({v for block in blocks for v in block.vertices})
    colors = [-1] * n

    adjacency: dict[int, list[tuple[int, int]]] = {i: [] for i in range(len(blocks))}
    for link in links:
        adjacency[link.block_a].append((link.block_b, link.vertex))
        adjacency[link.block_b].append((link.block_a, link.vertex))

    def place(index: int, rotation: int) -> None:
        block = blocks[index]
        for local, v in enumerate(block.vertices):
            colors[v] = (colorings[index].colors[local] + rotation) % k

    root = max(range(len(blocks)), key=lambda i: (blocks[i].size, -i))
    visited = {root}
    place(root, 0)
    stack = [root]
    while stack:
        current = stack.pop()
        for neighbor, vertex in sorted(adjacency[current], reverse=True):
            if neighbor in visited:
                continue
            block = blocks[neighbor]
            local_color = colorings[neighbor].colors[block.vertices.index(vertex)]
            rotation = (colors[vertex] - local_color) % k
            place(neighbor, rotation)
            visited.add(neighbor)
            stack.append(neighbor)

    if len(visited) != len(blocks):
        raise InvariantError("Articulation links do not connect all blocks.")
    return Coloring(colors=tuple(colors), k=k)
