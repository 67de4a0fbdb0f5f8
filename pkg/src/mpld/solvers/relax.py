"""Vector relaxation of K-coloring and its two roundings.

Each vertex gets a unit vector in K-1 dimensions. On the K simplex vectors
(pairwise product -1/(K-1)) the objective

    (K-1)/K * [ sum_CE (v_i.v_j + 1/(K-1)) + alpha * sum_SE (1 - v_i.v_j) ]

is exactly conflicts + alpha * stitches. Relaxing the vectors to the whole
sphere gives a continuous problem whose pairwise products ``x_ij`` say how
strongly two vertices want the same mask. The relaxed problem is solved by
low-rank coordinate descent with restarts instead of an interior-point
solver; the CE lower bound x_ij >= -1/(K-1) is a squared-hinge penalty.

Two roundings follow: a greedy mapping of high-affinity pairs into K groups,
and a threshold merge followed by exhaustive search on the merged graph.
"""
import logging
import time
from typing import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from mpld.errors import InvariantError, ParameterError, SolverSizeError
from mpld.graphmodel import DEFAULT_ALPHA, Coloring, ColoringProblem, DecompositionGraph
from mpld.solvers.exact import SearchLimits, canonical_colors, solve_problem
from mpld.solvers.linear import linear_problem

log = logging.getLogger(__name__)

MAX_K = 16
MIN_STEP = 2.0 ** -30


class RelaxParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    iterations: int = Field(500, ge=1, description="Coordinate sweeps per restart.")
    restarts: int = Field(5, ge=1)
    seed: int = 1
    penalty: float = Field(10.0, ge=0.0, description="Weight of the CE lower-bound hinge.")
    t_th: float = Field(0.9, gt=0.0, le=1.0, description="Affinity threshold for merging.")
    tolerance: float = Field(1e-9, gt=0.0, description="Stop a restart when a sweep gains less.")
    max_vertices: int = Field(2000, ge=1, description="Larger components go to the linear solver.")


class SimplexVectors(BaseModel):
    """K unit vectors in K-1 dimensions with pairwise product -1/(K-1)."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    k: int
    vectors: np.ndarray


class AffinityMatrix(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    k: int
    vectors: np.ndarray = Field(description="n x (K-1) unit vectors.")
    x: np.ndarray = Field(description="n x n products v_i . v_j, unit diagonal.")
    objective: float = Field(description="Relaxed objective including the hinge penalty.")
    restart: int = Field(description="Index of the restart that won; 0 is the warm start when given.")
    sweeps: int

    def dump(self, labels: Sequence[int] | None = None) -> str:
        n = self.x.shape[0]
        names = list(labels) if labels is not None else list(range(n))
        rows = [f"affinity n={n} k={self.k} objective={self.objective:.6f}"]
        for i in range(n):
            rows.append(f"{names[i]} " + " ".join(f"{v:.4f}" for v in self.x[i]))
        return "\n".join(rows) + "\n"


def _simplex(k: int) -> np.ndarray:
    if k == 2:
        return np.array([[1.0], [-1.0]])
    inner = _simplex(k - 1)
    low = -1.0 / (k - 1)
    scale = np.sqrt(1.0 - low * low)
    top = np.zeros((1, k - 1))
    top[0, -1] = 1.0
    rest = np.hstack([scale * inner, np.full((k - 1, 1), low)])
    return np.vstack([top, rest])


def simplex_vectors(k: int) -> SimplexVectors:
    """Built recursively: e_last, then the (K-1)-simplex scaled and lowered to -1/(K-1)."""
    if not 2 <= k <= MAX_K:
        raise ParameterError(f"K must be in [2, {MAX_K}], got {k}")
    return SimplexVectors(k=k, vectors=_simplex(k))


def embed_coloring(coloring: Coloring) -> np.ndarray:
    return simplex_vectors(coloring.k).vectors[coloring.as_array()]


def _edge_products(vectors: np.ndarray, edges: Sequence[tuple[int, int]]) -> np.ndarray:
    if not edges:
        return np.zeros(0)
    pairs = np.asarray(edges, dtype=np.int64)
    return np.einsum("ij,ij->i", vectors[pairs[:, 0]], vectors[pairs[:, 1]])


def relaxation_objective(
        graph: DecompositionGraph, vectors: np.ndarray, k: int, alpha: float, penalty: float,
) -> float:
    """sum_CE x - alpha * sum_SE x + penalty * sum_CE max(0, -1/(K-1) - x)^2."""
    x_ce = _edge_products(vectors, graph.conflict_edges)
    x_se = _edge_products(vectors, graph.stitch_edges)
    hinge = np.maximum(0.0, -1.0 / (k - 1) - x_ce)
    return float(x_ce.sum() - alpha * x_se.sum() + penalty * np.dot(hinge, hinge))


def vector_objective(graph: DecompositionGraph, vectors: np.ndarray, k: int, alpha: float) -> float:
    """The scaled vector form that equals conflicts + alpha * stitches on simplex vectors."""
    x_ce = _edge_products(vectors, graph.conflict_edges)
    x_se = _edge_products(vectors, graph.stitch_edges)
    low = 1.0 / (k - 1)
    return float((k - 1) / k * ((x_ce + low).sum() + alpha * (1.0 - x_se).sum()))


def discrete_equivalent(objective: float, graph: DecompositionGraph, k: int, alpha: float) -> float:
    """Map a relaxed objective onto the conflicts + alpha * stitches scale."""
    constant = len(graph.conflict_edges) / (k - 1) + alpha * len(graph.stitch_edges)
    return (k - 1) / k * (objective + constant)


class _Descent:
    """Coordinate descent state for one graph."""

    def __init__(self, graph: DecompositionGraph, k: int, alpha: float, penalty: float):
        self.graph = graph
        self.k = k
        self.alpha = alpha
        self.penalty = penalty
        self.low = -1.0 / (k - 1)
        self.ce = [np.asarray(a, dtype=np.int64) for a in graph.conflict_adj]
        self.se = [np.asarray(a, dtype=np.int64) for a in graph.stitch_adj]

    def local(self, vectors: np.ndarray, i: int, v: np.ndarray) -> float:
        x_ce = vectors[self.ce[i]] @ v
        x_se = vectors[self.se[i]] @ v
        hinge = np.maximum(0.0, self.low - x_ce)
        return float(x_ce.sum() - self.alpha * x_se.sum() + self.penalty * np.dot(hinge, hinge))

    def gradient(self, vectors: np.ndarray, i: int) -> np.ndarray:
        v = vectors[i]
        nb_ce = vectors[self.ce[i]]
        x_ce = nb_ce @ v
        coef = 1.0 - 2.0 * self.penalty * np.maximum(0.0, self.low - x_ce)
        return coef @ nb_ce - self.alpha * vectors[self.se[i]].sum(axis=0)

    def update(self, vectors: np.ndarray, i: int) -> float:
        """Move v_i to a strictly better unit vector if one is found; return the gain."""
        g = self.gradient(vectors, i)
        if not np.any(g):
            return 0.0
        v = vectors[i]
        current = self.local(vectors, i, v)
        candidates = [-g]
        step = 1.0
        while step >= MIN_STEP:
            candidates.append(v - step * g)
            step *= 0.5
        for cand in candidates:
            norm = np.linalg.norm(cand)
            if norm < 1e-12:
                continue
            cand = cand / norm
            value = self.local(vectors, i, cand)
            if value < current - 1e-15:
                vectors[i] = cand
                return current - value
        return 0.0

    def run(self, vectors: np.ndarray, params: RelaxParams) -> tuple[np.ndarray, float, int]:
        objective = relaxation_objective(self.graph, vectors, self.k, self.alpha, self.penalty)
        sweeps = 0
        for sweeps in range(1, params.iterations + 1):
            gained = 0.0
            for i in range(self.graph.n):
                if len(self.ce[i]) or len(self.se[i]):
                    gained += self.update(vectors, i)
            after = relaxation_objective(self.graph, vectors, self.k, self.alpha, self.penalty)
            if after > objective + 1e-9 * (1.0 + abs(objective)):
                raise InvariantError(f"Relaxed objective rose from {objective} to {after} in sweep {sweeps}")
            objective = after
            log.debug(f"sweep {sweeps}: objective {objective:.9f} (gain {gained:.3e})")
            if gained < params.tolerance * (1.0 + abs(objective)):
                break
        return vectors, objective, sweeps


def _random_unit(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    raw = rng.standard_normal((n, dim))
    norms = np.linalg.norm(raw, axis=1, keepdims=True)
    norms[norms < 1e-12] = 1.0
    return raw / norms


def solve_relaxation(
        graph: DecompositionGraph,
        k: int,
        alpha: float = DEFAULT_ALPHA,
        params: RelaxParams = RelaxParams(),
        warm_start: Coloring | None = None,
) -> AffinityMatrix:
    """Best of ``params.restarts`` descents; restart 0 starts from ``warm_start`` when given."""
    if not 2 <= k <= MAX_K:
        raise ParameterError(f"K must be in [2, {MAX_K}], got {k}")
    if warm_start is not None and (len(warm_start) != graph.n or warm_start.k != k):
        raise ParameterError("warm_start must be a total coloring of the graph with the same K")

    started = time.perf_counter()
    descent = _Descent(graph, k, alpha, params.penalty)
    best: tuple[float, int, np.ndarray, int] | None = None
    for restart in range(params.restarts):
        if restart == 0 and warm_start is not None:
            start = embed_coloring(warm_start).astype(float)
        else:
            rng = np.random.default_rng([params.seed, restart])
            start = _random_unit(rng, graph.n, k - 1)
        vectors, objective, sweeps = descent.run(start, params)
        if best is None or objective < best[0]:
            best = (objective, restart, vectors, sweeps)

    objective, restart, vectors, sweeps = best
    x = np.clip(vectors @ vectors.T, -1.0, 1.0)
    np.fill_diagonal(x, 1.0)
    log.debug(
        f"Relaxation on {graph.n} vertices: objective {objective:.6f} from restart {restart} "
        f"in {(time.perf_counter() - started) * 1000:.0f} ms"
    )
    return AffinityMatrix(k=k, vectors=vectors, x=x, objective=objective, restart=restart, sweeps=sweeps)


def _affinities(x: AffinityMatrix | np.ndarray) -> np.ndarray:
    return x.x if isinstance(x, AffinityMatrix) else np.asarray(x, dtype=float)


def _pairs_by_affinity(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    rows, cols = np.triu_indices(x.shape[0], k=1)
    # Stable sort keeps (i, j) order among equal affinities.
    order = np.argsort(-x[rows, cols], kind="stable")
    return rows[order], cols[order]


class _Groups:
    """Union-find over vertices that also tracks CE adjacency between groups."""

    def __init__(self, graph: DecompositionGraph):
        self.parent = list(range(graph.n))
        self.size = [1] * graph.n
        self.count = graph.n
        self.ce: list[dict[int, int]] = [dict.fromkeys(a, 1) for a in graph.conflict_adj]

    def find(self, v: int) -> int:
        while self.parent[v] != v:
            self.parent[v] = self.parent[self.parent[v]]
            v = self.parent[v]
        return v

    def in_conflict(self, a: int, b: int) -> bool:
        return b in self.ce[a]

    def union(self, a: int, b: int) -> None:
        if self.size[a] < self.size[b]:
            a, b = b, a
        self.parent[b] = a
        self.size[a] += self.size[b]
        self.count -= 1
        for g, cnt in self.ce[b].items():
            del self.ce[g][b]
            if g == a:
                continue
            self.ce[a][g] = self.ce[a].get(g, 0) + cnt
            self.ce[g][a] = self.ce[g].get(a, 0) + cnt
        self.ce[b] = {}
        self.ce[a].pop(a, None)


def greedy_mapping(
        x: AffinityMatrix | np.ndarray,
        graph: DecompositionGraph,
        k: int,
        alpha: float = DEFAULT_ALPHA,
) -> Coloring:
    """Round affinities to K groups, then color the groups greedily.

    One pass over the pairs in descending affinity merges a pair while more
    than K groups remain, and afterwards only when the two groups share no
    CE edge. Groups are then colored largest first, each with the color of
    least incremental cost (lowest index on ties).
    """
    n = graph.n
    if n == 0:
        return Coloring(colors=(), k=k)
    rows, cols = _pairs_by_affinity(_affinities(x))
    groups = _Groups(graph)
    for i, j in zip(rows.tolist(), cols.tolist()):
        a, b = groups.find(i), groups.find(j)
        if a != b and (groups.count > k or not groups.in_conflict(a, b)):
            groups.union(a, b)

    members: dict[int, list[int]] = {}
    for v in range(n):
        members.setdefault(groups.find(v), []).append(v)
    ordered = sorted(members.values(), key=lambda m: (-len(m), m[0]))

    problem = ColoringProblem.from_graph(graph, k, alpha)
    colors = [-1] * n
    for group in ordered:
        inside = set(group)
        conflicts = [0] * k
        stitches = [0] * k
        for v in group:
            for u, w in problem.ce_adj[v]:
                if u not in inside and colors[u] >= 0:
                    conflicts[colors[u]] += w
            for u, w in problem.se_adj[v]:
                if u not in inside and colors[u] >= 0:
                    for c in range(k):
                        if c != colors[u]:
                            stitches[c] += w
        best = min(range(k), key=lambda c: (conflicts[c] + alpha * stitches[c], c))
        for v in group:
            colors[v] = best
    return Coloring(colors=tuple(colors), k=k)


class MergedGraph(BaseModel):
    """Vertices contracted into groups; parallel edges kept as multiplicities."""
    model_config = ConfigDict(frozen=True)

    group_of: tuple[int, ...] = Field(description="Group index per original vertex.")
    groups: tuple[tuple[int, ...], ...]
    conflict_edges: tuple[tuple[int, int, int], ...] = Field(description="(g, h, multiplicity), g < h.")
    stitch_edges: tuple[tuple[int, int, int], ...]
    forced_conflicts: int = Field(description="CE edges inside a group; paid by every coloring.")
    friendly: tuple[tuple[int, ...], ...] = ()

    @property
    def n(self) -> int:
        return len(self.groups)

    def to_problem(self, k: int, alpha: float) -> ColoringProblem:
        return ColoringProblem(
            n=self.n,
            k=k,
            alpha=alpha,
            ce_edges=list(self.conflict_edges),
            se_edges=list(self.stitch_edges),
            friendly_adj=[list(f) for f in self.friendly] if self.friendly else [],
            forced_conflicts=self.forced_conflicts,
        )

    def expand(self, group_colors: Sequence[int], k: int) -> Coloring:
        return Coloring(colors=tuple(group_colors[g] for g in self.group_of), k=k)


def threshold_merge(x: AffinityMatrix | np.ndarray, graph: DecompositionGraph, t_th: float = 0.9) -> MergedGraph:
    """Union every pair with x_ij >= t_th; groups are numbered by smallest member."""
    if not 0.0 < t_th <= 1.0:
        raise ParameterError(f"t_th must be in (0, 1], got {t_th}")
    n = graph.n
    affinities = _affinities(x)
    parent = list(range(n))

    def find(v: int) -> int:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    if n:
        rows, cols = np.nonzero(np.triu(affinities >= t_th - 1e-12, k=1))
        for i, j in zip(rows.tolist(), cols.tolist()):
            a, b = find(i), find(j)
            if a != b:
                parent[max(a, b)] = min(a, b)

    index: dict[int, int] = {}
    group_of = []
    for v in range(n):
        root = find(v)
        if root not in index:
            index[root] = len(index)
        group_of.append(index[root])
    groups: list[list[int]] = [[] for _ in index]
    for v, g in enumerate(group_of):
        groups[g].append(v)

    def project(edges) -> tuple[dict[tuple[int, int], int], int]:
        weights: dict[tuple[int, int], int] = {}
        internal = 0
        for u, v in edges:
            g, h = group_of[u], group_of[v]
            if g == h:
                internal += 1
                continue
            key = (g, h) if g < h else (h, g)
            weights[key] = weights.get(key, 0) + 1
        return weights, internal

    ce, forced = project(graph.conflict_edges)
    se, _ = project(graph.stitch_edges)
    friendly: list[set[int]] = [set() for _ in groups]
    for u, v in graph.friendly_edges:
        g, h = group_of[u], group_of[v]
        if g != h:
            friendly[g].add(h)
            friendly[h].add(g)

    merged = MergedGraph(
        group_of=tuple(group_of),
        groups=tuple(tuple(g) for g in groups),
        conflict_edges=tuple((g, h, w) for (g, h), w in sorted(ce.items())),
        stitch_edges=tuple((g, h, w) for (g, h), w in sorted(se.items())),
        forced_conflicts=forced,
        friendly=tuple(tuple(sorted(f)) for f in friendly),
    )
    log.debug(f"Merged {n} vertices into {merged.n} groups at t_th={t_th} ({forced} forced conflicts)")
    return merged


class BacktrackOutcome(BaseModel):
    model_config = ConfigDict(frozen=True)

    coloring: Coloring
    proof: str
    fell_back: bool = Field(False, description="Merged graph was too large; linear solver used.")


def backtrack_color(
        merged: MergedGraph,
        k: int,
        alpha: float = DEFAULT_ALPHA,
        limits: SearchLimits = SearchLimits(),
) -> BacktrackOutcome:
    """Exhaustive search over group colorings, expanded to the original vertices."""
    problem = merged.to_problem(k, alpha)
    incumbent = linear_problem(problem)
    try:
        result = solve_problem(problem, limits, incumbent=incumbent)
    except SolverSizeError as e:
        log.warning(f"Merged graph too large for backtracking ({e}); using the linear solver.")
        return BacktrackOutcome(
            coloring=merged.expand(canonical_colors(incumbent), k), proof="heuristic", fell_back=True,
        )
    return BacktrackOutcome(coloring=merged.expand(result.colors, k), proof=result.proof)
