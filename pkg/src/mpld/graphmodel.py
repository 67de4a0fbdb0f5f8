"""Decomposition graph, coloring and cost model.

A decomposition graph has one vertex per layout feature and three edge
relations: conflict edges (CE) between features that must not share a mask,
stitch edges (SE) between touching pieces of one polygon that would rather
share one, and optional color-friendly edges (FE) used as a tie-break hint.
"""
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Literal, Sequence

import networkx as nx
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from mpld.errors import DimensionError, GraphError, ParameterError

log = logging.getLogger(__name__)

Edge = tuple[int, int]
EdgeKind = Literal["ce", "se", "fe"]
ViolationKind = Literal["self_loop", "overlap", "dangling", "duplicate"]

DEFAULT_ALPHA = 0.1


def canonical_edge(u: int, v: int) -> Edge:
    return (u, v) if u <= v else (v, u)


class GraphViolation(BaseModel):
    """One broken graph invariant, reported as data."""
    model_config = ConfigDict(frozen=True)

    kind: ViolationKind = Field(description="Which invariant is broken.")
    edge_set: EdgeKind | None = Field(None, description="Edge relation the offending pair was found in.")
    edge: Edge = Field(description="The offending vertex pair as stored.")

    def __str__(self) -> str:
        where = f" in {self.edge_set}" if self.edge_set else ""
        return f"{self.kind}{where}: {self.edge[0]} {self.edge[1]}"


class DecompositionGraph(BaseModel):
    """Immutable decomposition graph on dense vertex ids ``0..n-1``.

    Constructing the model directly stores the edge tuples as given; use
    :meth:`from_edges` to canonicalize, de-duplicate and check invariants.
    ``labels`` keeps the input ids of vertices when they were remapped on
    ingestion (``labels[i]`` is the file id of vertex ``i``).
    """
    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=0, description="Vertex count; vertices are 0..n-1.")
    conflict_edges: tuple[Edge, ...] = Field(default=(), description="CE pairs, smaller id first.")
    stitch_edges: tuple[Edge, ...] = Field(default=(), description="SE pairs, smaller id first.")
    friendly_edges: tuple[Edge, ...] = Field(default=(), description="FE pairs, smaller id first.")
    labels: tuple[int, ...] | None = Field(None, description="Original ids, one per vertex.")

    @model_validator(mode="after")
    def _labels_cover_vertices(self) -> "DecompositionGraph":
        if self.labels is not None and len(self.labels) != self.n:
            raise ValueError(f"labels has {len(self.labels)} entries for {self.n} vertices")
        return self

    @classmethod
    def from_edges(
            cls,
            n: int,
            conflict_edges: Iterable[Edge] = (),
            stitch_edges: Iterable[Edge] = (),
            friendly_edges: Iterable[Edge] = (),
            labels: Sequence[int] | None = None,
    ) -> "DecompositionGraph":
        """Canonicalize and de-duplicate the edge sets, then check the graph.

        Raises GraphError listing every self-loop, dangling endpoint and CE/SE
        overlap. Repeated pairs are collapsed silently.
        """
        ce = sorted({canonical_edge(u, v) for u, v in conflict_edges})
        se = sorted({canonical_edge(u, v) for u, v in stitch_edges})
        fe = sorted({canonical_edge(u, v) for u, v in friendly_edges})
        graph = cls(
            n=n,
            conflict_edges=tuple(ce),
            stitch_edges=tuple(se),
            friendly_edges=tuple(fe),
            labels=tuple(labels) if labels is not None else None,
        )
        violations = validate(graph)
        if violations:
            listed = "; ".join(str(v) for v in violations[:5])
            more = f" (+{len(violations) - 5} more)" if len(violations) > 5 else ""
            raise GraphError(f"Invalid decomposition graph: {listed}{more}")
        return graph

    @property
    def vertices(self) -> range:
        return range(self.n)

    def label(self, v: int) -> int:
        return self.labels[v] if self.labels is not None else v

    @cached_property
    def conflict_adj(self) -> list[list[int]]:
        return _adjacency(self.n, self.conflict_edges)

    @cached_property
    def stitch_adj(self) -> list[list[int]]:
        return _adjacency(self.n, self.stitch_edges)

    @cached_property
    def friendly_adj(self) -> list[list[int]]:
        return _adjacency(self.n, self.friendly_edges)

    def induced_subgraph(self, vertices: Sequence[int]) -> "DecompositionGraph":
        """Subgraph on ``vertices``; local vertex ``i`` is ``vertices[i]``."""
        local = {v: i for i, v in enumerate(vertices)}

        def project(edges: tuple[Edge, ...]) -> tuple[Edge, ...]:
            kept = []
            for u, v in edges:
                if u in local and v in local:
                    kept.append(canonical_edge(local[u], local[v]))
            return tuple(sorted(kept))

        return DecompositionGraph(
            n=len(local),
            conflict_edges=project(self.conflict_edges),
            stitch_edges=project(self.stitch_edges),
            friendly_edges=project(self.friendly_edges),
        )

    def to_networkx(self) -> nx.Graph:
        """Union graph CE u SE with a ``kind`` attribute on every edge."""
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.conflict_edges, kind="ce")
        g.add_edges_from(self.stitch_edges, kind="se")
        return g


def _adjacency(n: int, edges: Iterable[Edge]) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        if 0 <= u < n and 0 <= v < n and u != v:
            adj[u].append(v)
            adj[v].append(u)
    return adj


class Coloring(BaseModel):
    """A total assignment of one of ``k`` masks to every vertex."""
    model_config = ConfigDict(frozen=True)

    colors: tuple[int, ...] = Field(description="Mask index per vertex.")
    k: int = Field(ge=2, description="Number of masks.")

    @field_validator("colors", mode="before")
    @classmethod
    def _coerce_sequence(cls, value):
        if isinstance(value, np.ndarray):
            return tuple(int(c) for c in value.tolist())
        return value

    @model_validator(mode="after")
    def _colors_in_range(self) -> "Coloring":
        for i, c in enumerate(self.colors):
            if not 0 <= c < self.k:
                raise ValueError(f"color {c} of vertex {i} outside [0, {self.k})")
        return self

    @classmethod
    def uniform(cls, n: int, k: int, color: int = 0) -> "Coloring":
        return cls(colors=(color,) * n, k=k)

    def __len__(self) -> int:
        return len(self.colors)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.colors, dtype=np.int64)


class CostReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    conflicts: int = Field(ge=0, description="cn#: CE edges with equal endpoint colors.")
    stitches: int = Field(ge=0, description="st#: SE edges with different endpoint colors.")
    weighted: float = Field(description="conflicts + alpha * stitches.")
    alpha: float = Field(ge=0.0)

    @classmethod
    def of(cls, conflicts: int, stitches: int, alpha: float) -> "CostReport":
        return cls(conflicts=conflicts, stitches=stitches, weighted=conflicts + alpha * stitches, alpha=alpha)

    def key(self) -> tuple[float, int]:
        return self.weighted, self.stitches

    def __add__(self, other: "CostReport") -> "CostReport":
        return CostReport.of(self.conflicts + other.conflicts, self.stitches + other.stitches, self.alpha)


def _count(edges: tuple[Edge, ...], colors: np.ndarray, equal: bool) -> int:
    if not edges:
        return 0
    pairs = np.asarray(edges, dtype=np.int64)
    same = colors[pairs[:, 0]] == colors[pairs[:, 1]]
    return int(np.count_nonzero(same if equal else ~same))


def evaluate_cost(graph: DecompositionGraph, coloring: Coloring, alpha: float = DEFAULT_ALPHA) -> CostReport:
    """Count conflicts (CE, equal colors) and stitches (SE, different colors)."""
    if len(coloring) != graph.n:
        raise DimensionError(f"Coloring has {len(coloring)} entries for a graph with {graph.n} vertices.")
    if alpha < 0:
        raise ParameterError(f"alpha must be non-negative, got {alpha}")
    colors = coloring.as_array()
    conflicts = _count(graph.conflict_edges, colors, equal=True)
    stitches = _count(graph.stitch_edges, colors, equal=False)
    return CostReport.of(conflicts, stitches, alpha)


def rotate_colors(coloring: Coloring, vertices: Iterable[int], i: int) -> Coloring:
    """Shift the colors of ``vertices`` by ``i`` modulo ``k``."""
    if not 0 <= i < coloring.k:
        raise ParameterError(f"Rotation {i} outside [0, {coloring.k}).")
    if i == 0:
        return coloring
    colors = list(coloring.colors)
    for v in vertices:
        colors[v] = (colors[v] + i) % coloring.k
    return Coloring(colors=tuple(colors), k=coloring.k)


def degrees(graph: DecompositionGraph, v: int) -> tuple[int, int]:
    if not 0 <= v < graph.n:
        raise ParameterError(f"Vertex {v} not in graph with {graph.n} vertices.")
    return len(graph.conflict_adj[v]), len(graph.stitch_adj[v])


def validate(graph: DecompositionGraph) -> list[GraphViolation]:
    """Every invariant violation of ``graph``; an empty list means ok."""
    violations: list[GraphViolation] = []
    seen: dict[Edge, EdgeKind] = {}
    for kind, edges in (("ce", graph.conflict_edges), ("se", graph.stitch_edges), ("fe", graph.friendly_edges)):
        own: set[Edge] = set()
        for edge in edges:
            u, v = edge
            if u == v:
                violations.append(GraphViolation(kind="self_loop", edge_set=kind, edge=edge))
                continue
            if not (0 <= u < graph.n and 0 <= v < graph.n):
                violations.append(GraphViolation(kind="dangling", edge_set=kind, edge=edge))
                continue
            key = canonical_edge(u, v)
            if key in own:
                violations.append(GraphViolation(kind="duplicate", edge_set=kind, edge=edge))
                continue
            own.add(key)
            if kind == "fe":
                continue
            if key in seen:
                violations.append(GraphViolation(kind="overlap", edge_set=kind, edge=edge))
            seen[key] = kind
    return violations


@dataclass(slots=True)
class ColoringProblem:
    """Weighted adjacency view shared by the color-assignment solvers.

    Unlike :class:`DecompositionGraph`, edges carry multiplicities and a pair
    may be both a conflict and a stitch relation. That is what a graph looks
    like after vertices are merged into groups. ``forced_conflicts`` and
    ``forced_stitches`` are costs no assignment can change.
    """
    n: int
    k: int
    alpha: float
    ce_edges: list[tuple[int, int, int]]
    se_edges: list[tuple[int, int, int]]
    friendly_adj: list[list[int]] = field(default_factory=list)
    forced_conflicts: int = 0
    forced_stitches: int = 0
    ce_adj: list[list[tuple[int, int]]] = field(init=False)
    se_adj: list[list[tuple[int, int]]] = field(init=False)

    def __post_init__(self) -> None:
        if self.k < 2:
            raise ParameterError(f"K must be at least 2, got {self.k}")
        self.ce_adj = [[] for _ in range(self.n)]
        self.se_adj = [[] for _ in range(self.n)]
        for u, v, w in self.ce_edges:
            self.ce_adj[u].append((v, w))
            self.ce_adj[v].append((u, w))
        for u, v, w in self.se_edges:
            self.se_adj[u].append((v, w))
            self.se_adj[v].append((u, w))
        if not self.friendly_adj:
            self.friendly_adj = [[] for _ in range(self.n)]

    @classmethod
    def from_graph(cls, graph: DecompositionGraph, k: int, alpha: float = DEFAULT_ALPHA) -> "ColoringProblem":
        return cls(
            n=graph.n,
            k=k,
            alpha=alpha,
            ce_edges=[(u, v, 1) for u, v in graph.conflict_edges],
            se_edges=[(u, v, 1) for u, v in graph.stitch_edges],
            friendly_adj=[list(a) for a in graph.friendly_adj],
        )

    def conflict_degree(self, v: int) -> int:
        return sum(w for _, w in self.ce_adj[v])

    def stitch_degree(self, v: int) -> int:
        return sum(w for _, w in self.se_adj[v])

    def counts(self, colors: Sequence[int]) -> tuple[int, int]:
        conflicts = self.forced_conflicts
        stitches = self.forced_stitches
        for u, v, w in self.ce_edges:
            if colors[u] == colors[v]:
                conflicts += w
        for u, v, w in self.se_edges:
            if colors[u] != colors[v]:
                stitches += w
        return conflicts, stitches

    def weighted(self, colors: Sequence[int]) -> float:
        conflicts, stitches = self.counts(colors)
        return conflicts + self.alpha * stitches

    def increment(self, v: int, c: int, colors: Sequence[int]) -> tuple[int, int]:
        """(new conflicts, new stitches) of giving ``v`` color ``c``.

        Only neighbors with a color (``colors[u] >= 0``) are counted.
        """
        conflicts = 0
        stitches = 0
        for u, w in self.ce_adj[v]:
            if colors[u] == c:
                conflicts += w
        for u, w in self.se_adj[v]:
            cu = colors[u]
            if cu >= 0 and cu != c:
                stitches += w
        return conflicts, stitches

    def increment_cost(self, v: int, c: int, colors: Sequence[int]) -> float:
        conflicts, stitches = self.increment(v, c, colors)
        return conflicts + self.alpha * stitches
