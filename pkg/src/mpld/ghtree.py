"""Gomory-Hu cut tree, (K-1)-cut removal and rotation-based reconnection.

A tree edge of weight below K separates the graph by fewer than K conflict
edges, so the two sides can be colored apart and reconnected by rotating one
side's colors: each crossing conflict edge rules out exactly one of the K
rotations, leaving at least one conflict-free choice.
"""
import logging
from collections import deque
from typing import Literal, Sequence

from pydantic import BaseModel, ConfigDict, Field

from mpld.errors import GraphError, InvariantError
from mpld.flow import FlowNetwork, max_flow
from mpld.graphmodel import DEFAULT_ALPHA, Coloring, DecompositionGraph

log = logging.getLogger(__name__)


class TreeEdge(BaseModel):
    model_config = ConfigDict(frozen=True)

    u: int
    v: int
    weight: float
    scaled: int = Field(description="Weight in network capacity units.")


class GomoryHuTree(BaseModel):
    """n-1 weighted edges; the lightest edge on the s-t path is the s-t min cut."""
    model_config = ConfigDict(frozen=True)

    n: int
    edges: tuple[TreeEdge, ...] = ()
    scale: int = 10

    def neighbors(self) -> list[list[tuple[int, int]]]:
        """Per vertex: (neighbor, edge index)."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        for index, e in enumerate(self.edges):
            adj[e.u].append((e.v, index))
            adj[e.v].append((e.u, index))
        return adj

    def path_min(self, s: int, t: int) -> float:
        """Smallest edge weight on the tree path from s to t."""
        adj = self.neighbors()
        best: dict[int, float] = {s: float("inf")}
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y, index in adj[x]:
                if y not in best:
                    best[y] = min(best[x], self.edges[index].weight)
                    queue.append(y)
        return best[t]

    def side_of(self, edge_index: int) -> frozenset[int]:
        """Vertices on the ``u`` side once tree edge ``edge_index`` is cut."""
        edge = self.edges[edge_index]
        adj = self.neighbors()
        seen = {edge.u}
        queue = deque([edge.u])
        while queue:
            x = queue.popleft()
            for y, index in adj[x]:
                if index != edge_index and y not in seen:
                    seen.add(y)
                    queue.append(y)
        return frozenset(seen)


class CrossingEdge(BaseModel):
    model_config = ConfigDict(frozen=True)

    u: int
    v: int
    kind: Literal["ce", "se"]


class CutRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    tree_edge: TreeEdge
    crossing: tuple[CrossingEdge, ...]
    component_a: int
    component_b: int

    @property
    def stitch_count(self) -> int:
        return sum(1 for e in self.crossing if e.kind == "se")

    @property
    def conflict_count(self) -> int:
        return sum(1 for e in self.crossing if e.kind == "ce")


def build_gomory_hu(network: FlowNetwork) -> GomoryHuTree:
    """Gusfield's cut-tree construction: n-1 max-flows on the original network.

    Vertex 0 is the root; every vertex starts as its child. After the flow
    between ``s`` and its parent, siblings on ``s``'s side of the cut are
    re-hung below ``s``, and ``s`` swaps with its parent when the
    grandparent also falls on ``s``'s side.
    """
    n = network.n
    if n <= 1:
        return GomoryHuTree(n=n, scale=network.scale)
    if not network.is_connected():
        raise GraphError("Gomory-Hu tree needs a connected network; split components first.")

    parent: list[int | None] = [0] * n
    parent[0] = None
    weight = [0] * n

    for s in range(1, n):
        t = parent[s]
        result = max_flow(network, s, t)
        side = result.source_side
        weight[s] = result.scaled_value
        for x in range(n):
            if x != s and x in side and parent[x] == t:
                parent[x] = s
        grand = parent[t]
        if grand is not None and grand in side:
            parent[s] = grand
            parent[t] = s
            weight[s] = weight[t]
            weight[t] = result.scaled_value

    edges = tuple(
        TreeEdge(u=x, v=p, weight=network.to_real(weight[x]), scaled=weight[x])
        for x, p in enumerate(parent) if p is not None
    )
    log.debug(f"Gomory-Hu tree on {n} vertices, min edge {min(e.weight for e in edges)}")
    return GomoryHuTree(n=n, edges=edges, scale=network.scale)


def round_weight(weight: float) -> int:
    """Snap to one decimal, then round half away from zero (3.4 -> 3, 3.5 -> 4)."""
    tenths = round(weight * 10)
    if tenths >= 0:
        return (tenths + 5) // 10
    return -((-tenths + 5) // 10)


def refine_and_round(tree: GomoryHuTree) -> GomoryHuTree:
    edges = tuple(
        TreeEdge(u=e.u, v=e.v, weight=float(round_weight(e.weight)), scaled=e.scaled)
        for e in tree.edges
    )
    return tree.model_copy(update={"edges": edges})


def _forest_components(tree: GomoryHuTree, removed: set[int]) -> list[list[int]]:
    adj = tree.neighbors()
    label = [-1] * tree.n
    parts: list[list[int]] = []
    for start in range(tree.n):
        if label[start] >= 0:
            continue
        label[start] = len(parts)
        members = [start]
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for y, index in adj[x]:
                if index not in removed and label[y] < 0:
                    label[y] = len(parts)
                    members.append(y)
                    queue.append(y)
        parts.append(sorted(members))
    return parts


def _crossing_edges(side: frozenset[int], graph: DecompositionGraph) -> tuple[CrossingEdge, ...]:
    return tuple(
        CrossingEdge(u=u, v=v, kind=kind)
        for kind, edges in (("ce", graph.conflict_edges), ("se", graph.stitch_edges))
        for u, v in edges
        if (u in side) != (v in side)
    )


def remove_kcuts(tree: GomoryHuTree, k: int, graph: DecompositionGraph) -> tuple[list[list[int]], list[CutRecord]]:
    """Drop every tree edge lighter than K whose cut crosses at most one SE edge.

    Returns the vertex sets of the remaining forest (ordered by smallest
    vertex) and one record per removed edge, holding the graph edges that
    cross the bipartition that edge induces on the full tree. A cut with two
    or more SE edges stays, whatever its rounded weight.
    """
    crossings: dict[int, tuple[CrossingEdge, ...]] = {}
    for index, edge in enumerate(tree.edges):
        if edge.weight >= k:
            continue
        crossing = _crossing_edges(tree.side_of(index), graph)
        stitches = sum(1 for e in crossing if e.kind == "se")
        if stitches > 1:
            log.debug(f"Keeping cut {edge.u}-{edge.v} of weight {edge.weight:g}: it crosses {stitches} stitch edges")
            continue
        crossings[index] = crossing

    pieces = _forest_components(tree, set(crossings))
    piece_of = [0] * tree.n
    for index, piece in enumerate(pieces):
        for v in piece:
            piece_of[v] = index

    cuts = []
    for index in sorted(crossings):
        edge = tree.edges[index]
        cuts.append(CutRecord(
            tree_edge=edge,
            crossing=crossings[index],
            component_a=piece_of[edge.u],
            component_b=piece_of[edge.v],
        ))
    if cuts:
        log.debug(f"Removed {len(cuts)} cuts below {k}: {len(pieces)} pieces")
    return pieces, cuts


def merge_with_rotation(
        colorings: Sequence[Coloring],
        pieces: Sequence[Sequence[int]],
        cuts: Sequence[CutRecord],
        graph: DecompositionGraph,
        k: int,
        alpha: float = DEFAULT_ALPHA,
) -> Coloring:
    """Reconnect independently colored pieces along the removed cuts.

    Pieces join one at a time in DFS order over the cut tree, rooted at the
    largest piece. Each joining piece takes the rotation with the fewest
    conflicts, then fewest stitches, then smallest index, counted over its
    edges to pieces already placed.
    """
    if not pieces:
        return Coloring(colors=(), k=k)
    colors = [-1] * graph.n
    adjacency: dict[int, list[int]] = {i: [] for i in range(len(pieces))}
    for cut in cuts:
        adjacency[cut.component_a].append(cut.component_b)
        adjacency[cut.component_b].append(cut.component_a)

    def place(index: int, rotation: int) -> None:
        for local, v in enumerate(pieces[index]):
            colors[v] = (colorings[index].colors[local] + rotation) % k

    root = max(range(len(pieces)), key=lambda i: (len(pieces[i]), -i))
    place(root, 0)
    visited = {root}
    stack = [root]
    while stack:
        current = stack.pop()
        for neighbor in sorted(adjacency[current], reverse=True):
            if neighbor in visited:
                continue
            rotation = _best_rotation(colorings[neighbor], pieces[neighbor], colors, graph, k)
            place(neighbor, rotation)
            visited.add(neighbor)
            stack.append(neighbor)

    if len(visited) != len(pieces):
        raise InvariantError("Cut records do not connect all pieces.")
    return Coloring(colors=tuple(colors), k=k)


def _best_rotation(
        coloring: Coloring,
        piece: Sequence[int],
        colors: list[int],
        graph: DecompositionGraph,
        k: int,
) -> int:
    local_color = {v: coloring.colors[i] for i, v in enumerate(piece)}
    conflicts = [0] * k
    stitches = [0] * k
    for v, c in local_color.items():
        for u in graph.conflict_adj[v]:
            if colors[u] >= 0 and u not in local_color:
                # Rotation r puts v on (c + r) % k; it clashes for exactly one r.
                conflicts[(colors[u] - c) % k] += 1
        for u in graph.stitch_adj[v]:
            if colors[u] >= 0 and u not in local_color:
                for r in range(k):
                    if (c + r) % k != colors[u]:
                        stitches[r] += 1
    return min(range(k), key=lambda r: (conflicts[r], stitches[r], r))


def format_tree_dump(tree: GomoryHuTree, graph: DecompositionGraph | None = None) -> str:
    def name(v: int) -> int:
        return graph.label(v) if graph is not None else v

    return "".join(f"ghtree {name(e.u)} {name(e.v)} {e.weight:g}\n" for e in tree.edges)
