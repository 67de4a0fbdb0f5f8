"""Linear-time color assignment.

Stages: peel non-critical vertices, color the rest in three vertex orders
and keep the cheapest (peer selection), refine vertex by vertex, then
reinsert the peeled vertices. Color-friendly neighbors break ties between
colors of equal cost.
"""
import logging
from typing import Literal, Sequence

from pydantic import BaseModel, ConfigDict, Field

from mpld.division import PeelRule, peel_problem, reinsert_into
from mpld.errors import ParameterError
from mpld.graphmodel import DEFAULT_ALPHA, Coloring, ColoringProblem, DecompositionGraph

log = logging.getLogger(__name__)

OrderName = Literal["sequence", "degree", "three_round"]
ORDER_NAMES: tuple[OrderName, ...] = ("sequence", "degree", "three_round")


class OrderBuckets(BaseModel):
    """Vertices in nearly descending conflict degree, built in one pass."""
    model_config = ConfigDict(frozen=True)

    vec1: tuple[int, ...] = Field(description="d_conf > K + 2")
    vec2: tuple[int, ...] = Field(description="K < d_conf <= K + 2")
    vec3: tuple[int, ...] = Field(description="d_conf <= K")

    def ordered(self) -> list[int]:
        return [*self.vec1, *self.vec2, *self.vec3]


class CandidateCost(BaseModel):
    model_config = ConfigDict(frozen=True)

    order: OrderName
    conflicts: int
    stitches: int
    weighted: float


class LinearOutcome(BaseModel):
    colors: list[int]
    candidates: list[CandidateCost]
    chosen: OrderName | None
    peeled: int
    refined_moves: int


def _buckets(problem: ColoringProblem, vertices: Sequence[int]) -> OrderBuckets:
    inside = set(vertices)
    high, low = problem.k + 2, problem.k
    vec1, vec2, vec3 = [], [], []
    for v in vertices:
        d = sum(w for u, w in problem.ce_adj[v] if u in inside)
        if d > high:
            vec1.append(v)
        elif d > low:
            vec2.append(v)
        else:
            vec3.append(v)
    return OrderBuckets(vec1=tuple(vec1), vec2=tuple(vec2), vec3=tuple(vec3))


def build_order_buckets(graph: DecompositionGraph, k: int) -> OrderBuckets:
    return _buckets(ColoringProblem.from_graph(graph, k), list(graph.vertices))


def _choose(problem: ColoringProblem, colors: Sequence[int], v: int, unused: set[int] | None = None) -> int:
    """Cheapest color for ``v``; ties go to friendly majority, then ``unused``, then index."""
    k = problem.k
    conflicts = [0] * k
    same = [0] * k
    total = 0
    for u, w in problem.ce_adj[v]:
        cu = colors[u]
        if cu >= 0:
            conflicts[cu] += w
    for u, w in problem.se_adj[v]:
        cu = colors[u]
        if cu >= 0:
            total += w
            same[cu] += w
    friendly = [0] * k
    for u in problem.friendly_adj[v]:
        cu = colors[u]
        if cu >= 0:
            friendly[cu] += 1
    alpha = problem.alpha
    return min(
        range(k),
        key=lambda c: (
            conflicts[c] + alpha * (total - same[c]),
            -friendly[c],
            0 if unused is None or c in unused else 1,
            c,
        ),
    )


def min_cost_color(
        graph: DecompositionGraph, partial: Sequence[int], v: int, k: int, alpha: float = DEFAULT_ALPHA,
) -> int:
    """Color for uncolored ``v`` (``partial[u] == -1`` marks uncolored vertices)."""
    if partial[v] >= 0:
        raise ParameterError(f"Vertex {v} is already colored.")
    return _choose(ColoringProblem.from_graph(graph, k, alpha), partial, v)


def _color_in_order(problem: ColoringProblem, order: Sequence[int], colors: list[int]) -> list[int]:
    for v in order:
        colors[v] = _choose(problem, colors, v)
    return colors


def _three_round(problem: ColoringProblem, order: Sequence[int], colors: list[int]) -> list[int]:
    k = problem.k
    solved = [False] * len(order)
    unused = set(range(k))
    # Round 1: greedy until every color has been applied once.
    for index, v in enumerate(order):
        if not unused:
            break
        c = _choose(problem, colors, v, unused)
        colors[v] = c
        unused.discard(c)
        solved[index] = True
    # Round 2: vertices with exactly one conflict-free color.
    for index, v in enumerate(order):
        if solved[index]:
            continue
        blocked = {colors[u] for u, _ in problem.ce_adj[v] if colors[u] >= 0}
        if len(blocked) == k - 1:
            colors[v] = next(c for c in range(k) if c not in blocked)
            solved[index] = True
    # Round 3: greedy for the rest.
    for index, v in enumerate(order):
        if not solved[index]:
            colors[v] = _choose(problem, colors, v)
    return colors


def _refine(problem: ColoringProblem, colors: list[int], vertices: Sequence[int], fixed_point: bool) -> int:
    """Move each vertex to a strictly cheaper color; returns the number of moves."""
    moves = 0
    while True:
        moved = False
        for v in vertices:
            current = colors[v]
            colors[v] = -1
            best = _choose(problem, colors, v)
            if best != current and problem.increment_cost(v, best, colors) < problem.increment_cost(v, current, colors) - 1e-12:
                colors[v] = best
                moves += 1
                moved = True
            else:
                colors[v] = current
        if not (fixed_point and moved):
            return moves


def _partial_cost(problem: ColoringProblem, colors: Sequence[int]) -> tuple[int, int]:
    conflicts = stitches = 0
    for u, v, w in problem.ce_edges:
        if colors[u] >= 0 and colors[u] == colors[v]:
            conflicts += w
    for u, v, w in problem.se_edges:
        if colors[u] >= 0 and colors[v] >= 0 and colors[u] != colors[v]:
            stitches += w
    return conflicts, stitches


def run_linear(
        problem: ColoringProblem,
        peel: bool = True,
        rule: PeelRule = "strict",
        fixed_point: bool = False,
) -> LinearOutcome:
    if peel:
        remaining, stack = peel_problem(problem, rule)
    else:
        remaining, stack = list(range(problem.n)), []

    buckets = _buckets(problem, remaining)
    orders: dict[OrderName, list[int]] = {
        "sequence": _color_in_order(problem, remaining, [-1] * problem.n),
        "degree": _color_in_order(problem, buckets.ordered(), [-1] * problem.n),
        "three_round": _three_round(problem, buckets.ordered(), [-1] * problem.n),
    }
    candidates = []
    for name in ORDER_NAMES:
        conflicts, stitches = _partial_cost(problem, orders[name])
        candidates.append(CandidateCost(
            order=name, conflicts=conflicts, stitches=stitches, weighted=conflicts + problem.alpha * stitches,
        ))

    chosen: OrderName | None = None
    colors = [-1] * problem.n
    if remaining:
        best = min(range(len(ORDER_NAMES)), key=lambda i: (candidates[i].weighted, candidates[i].stitches, i))
        chosen = ORDER_NAMES[best]
        colors = orders[chosen]

    moves = _refine(problem, colors, remaining, fixed_point)
    reinsert_into(problem, stack, colors)
    uniform = [0] * problem.n
    if problem.weighted(uniform) < problem.weighted(colors) - 1e-12:
        log.debug("Single-mask coloring beats the assignment; using it")
        colors = uniform
    log.debug(
        f"Linear assignment on {problem.n} vertices: peeled {len(stack)}, "
        f"candidates {[round(c.weighted, 4) for c in candidates]}, chose {chosen}, {moves} refinement moves"
    )
    return LinearOutcome(colors=colors, candidates=candidates, chosen=chosen, peeled=len(stack), refined_moves=moves)


def linear_problem(problem: ColoringProblem) -> list[int]:
    return run_linear(problem).colors


def linear_assign(
        graph: DecompositionGraph,
        k: int,
        alpha: float = DEFAULT_ALPHA,
        rule: PeelRule = "strict",
        fixed_point: bool = False,
) -> Coloring:
    if k < 2:
        raise ParameterError(f"K must be at least 2, got {k}")
    outcome = run_linear(ColoringProblem.from_graph(graph, k, alpha), rule=rule, fixed_point=fixed_point)
    return Coloring(colors=tuple(outcome.colors), k=k)


def _total(graph: DecompositionGraph, order: Sequence[int]) -> list[int]:
    if sorted(order) != list(graph.vertices):
        raise ParameterError("Vertex order must list every vertex exactly once.")
    return list(order)


def sequence_coloring(
        order: Sequence[int] | None, graph: DecompositionGraph, k: int, alpha: float = DEFAULT_ALPHA,
) -> Coloring:
    """Greedy min-cost coloring in ``order`` (vertex-id order when None)."""
    problem = ColoringProblem.from_graph(graph, k, alpha)
    vertices = list(graph.vertices) if order is None else _total(graph, order)
    return Coloring(colors=tuple(_color_in_order(problem, vertices, [-1] * graph.n)), k=k)


def degree_coloring(
        buckets: OrderBuckets, graph: DecompositionGraph, k: int, alpha: float = DEFAULT_ALPHA,
) -> Coloring:
    problem = ColoringProblem.from_graph(graph, k, alpha)
    vertices = _total(graph, buckets.ordered())
    return Coloring(colors=tuple(_color_in_order(problem, vertices, [-1] * graph.n)), k=k)


def three_round_coloring(
        buckets: OrderBuckets, graph: DecompositionGraph, k: int, alpha: float = DEFAULT_ALPHA,
) -> Coloring:
    problem = ColoringProblem.from_graph(graph, k, alpha)
    vertices = _total(graph, buckets.ordered())
    return Coloring(colors=tuple(_three_round(problem, vertices, [-1] * graph.n)), k=k)


def post_refinement(
        graph: DecompositionGraph,
        coloring: Coloring,
        k: int,
        alpha: float = DEFAULT_ALPHA,
        fixed_point: bool = False,
) -> Coloring:
    """One pass in vertex-id order; a vertex moves only if that lowers the cost."""
    problem = ColoringProblem.from_graph(graph, k, alpha)
    colors = list(coloring.colors)
    _refine(problem, colors, list(graph.vertices), fixed_point)
    return Coloring(colors=tuple(colors), k=k)
