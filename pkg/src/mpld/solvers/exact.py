"""Exact color assignment by depth-first branch and bound.

Minimizes conflicts + alpha * stitches directly over color assignments; no
integer program is built. Two standard devices keep the tree small: color
symmetry breaking (a vertex may only open the next unused color) and an
admissible lower bound from per-vertex incremental cost tables.
"""
import logging
import time
from typing import Literal, Sequence

from pydantic import BaseModel, ConfigDict, Field

from mpld.errors import ParameterError, SolverSizeError
from mpld.graphmodel import DEFAULT_ALPHA, Coloring, ColoringProblem, CostReport, DecompositionGraph, evaluate_cost

log = logging.getLogger(__name__)

Proof = Literal["optimal", "budget_exhausted"]

EPS = 1e-9
CLOCK_CHECK_EVERY = 1024


class SearchLimits(BaseModel):
    model_config = ConfigDict(frozen=True)

    max_vertices: int = Field(24, gt=0, description="Largest problem the search accepts.")
    max_nodes: int = Field(5_000_000, gt=0, description="Search-tree node budget.")
    time_budget_ms: int = Field(60_000, gt=0, description="Wall-clock budget.")


class SearchResult(BaseModel):
    colors: list[int]
    proof: Proof
    nodes: int


class ExactOutcome(BaseModel):
    model_config = ConfigDict(frozen=True)

    coloring: Coloring
    report: CostReport
    proof: Proof
    nodes: int


def canonical_colors(colors: Sequence[int]) -> list[int]:
    """Renumber colors by first appearance in vertex-id order."""
    mapping: dict[int, int] = {}
    for c in colors:
        if c not in mapping:
            mapping[c] = len(mapping)
    return [mapping[c] for c in colors]


def search_order(problem: ColoringProblem) -> list[int]:
    return sorted(range(problem.n), key=lambda v: (-problem.conflict_degree(v), v))


def greedy_colors(problem: ColoringProblem, order: Sequence[int]) -> list[int]:
    colors = [-1] * problem.n
    for v in order:
        colors[v] = min(range(problem.k), key=lambda c: (problem.increment_cost(v, c, colors), c))
    return colors


class _Search:
    """Incremental cost tables and the shared node/time budget of one solve."""

    def __init__(self, problem: ColoringProblem, limits: SearchLimits):
        self.problem = problem
        self.limits = limits
        self.conf_inc = [[0] * problem.k for _ in range(problem.n)]
        self.st_inc = [[0] * problem.k for _ in range(problem.n)]
        self.colors = [-1] * problem.n
        self.nodes = 0
        self.exhausted = False
        self.deadline = time.perf_counter() + limits.time_budget_ms / 1000

    def tick(self) -> bool:
        self.nodes += 1
        if self.nodes > self.limits.max_nodes or (
                self.nodes % CLOCK_CHECK_EVERY == 0 and time.perf_counter() > self.deadline):
            self.exhausted = True
        return not self.exhausted

    def assign(self, v: int, c: int) -> None:
        self._shift(v, c, 1)
        self.colors[v] = c

    def unassign(self, v: int, c: int) -> None:
        self.colors[v] = -1
        self._shift(v, c, -1)

    def _shift(self, v: int, c: int, sign: int) -> None:
        k, colors = self.problem.k, self.colors
        for u, w in self.problem.ce_adj[v]:
            if colors[u] < 0:
                self.conf_inc[u][c] += sign * w
        for u, w in self.problem.se_adj[v]:
            if colors[u] < 0:
                row = self.st_inc[u]
                for other in range(k):
                    if other != c:
                        row[other] += sign * w

    def step_cost(self, v: int, c: int) -> tuple[int, int]:
        return self.conf_inc[v][c], self.st_inc[v][c]

    def bound(self, remaining: Sequence[int]) -> float:
        k, alpha = self.problem.k, self.problem.alpha
        total = 0.0
        for v in remaining:
            ci, si = self.conf_inc[v], self.st_inc[v]
            total += min(ci[c] + alpha * si[c] for c in range(k))
        return total

    def minimize(self, order: Sequence[int], best_colors: list[int]) -> tuple[list[int], float]:
        """Best coloring over ``order``, strictly improving on ``best_colors``."""
        problem = self.problem
        n, k, alpha = problem.n, problem.k, problem.alpha
        best_cost = problem.weighted(best_colors)

        def search(depth: int, used: int, conflicts: int, stitches: int) -> None:
            nonlocal best_cost, best_colors
            if not self.tick():
                return
            if depth == n:
                cost = conflicts + alpha * stitches
                if cost < best_cost - EPS:
                    best_cost = cost
                    best_colors = list(self.colors)
                return
            v = order[depth]
            candidates = sorted(range(min(used + 1, k)), key=lambda c: (self._weighted_step(v, c), c))
            for c in candidates:
                dc, ds = self.step_cost(v, c)
                self.assign(v, c)
                if conflicts + dc + alpha * (stitches + ds) + self.bound(order[depth + 1:]) < best_cost - EPS:
                    search(depth + 1, max(used, c + 1), conflicts + dc, stitches + ds)
                self.unassign(v, c)
                if self.exhausted:
                    return

        search(0, 0, problem.forced_conflicts, problem.forced_stitches)
        return best_colors, best_cost

    def first_within(self, cutoff: float) -> list[int] | None:
        """Lexicographically first canonical coloring costing at most ``cutoff``.

        Vertices go in id order and colors in increasing order, with a new
        color only opened next, so leaves arrive in lexicographic order.
        """
        problem = self.problem
        n, k, alpha = problem.n, problem.k, problem.alpha
        order = list(range(n))

        def search(depth: int, used: int, conflicts: int, stitches: int) -> list[int] | None:
            if not self.tick():
                return None
            if depth == n:
                return list(self.colors)
            for c in range(min(used + 1, k)):
                dc, ds = self.step_cost(depth, c)
                self.assign(depth, c)
                found = None
                if conflicts + dc + alpha * (stitches + ds) + self.bound(order[depth + 1:]) <= cutoff + EPS:
                    found = search(depth + 1, max(used, c + 1), conflicts + dc, stitches + ds)
                self.unassign(depth, c)
                if found is not None or self.exhausted:
                    return found
            return None

        return search(0, 0, problem.forced_conflicts, problem.forced_stitches)

    def _weighted_step(self, v: int, c: int) -> float:
        return self.conf_inc[v][c] + self.problem.alpha * self.st_inc[v][c]


def solve_problem(
        problem: ColoringProblem,
        limits: SearchLimits = SearchLimits(),
        incumbent: Sequence[int] | None = None,
) -> SearchResult:
    """Branch and bound on a weighted problem (edge multiplicities, forced costs).

    The first search proves the optimum cost; a second one, in vertex-id
    order and bounded by that cost, picks the lexicographically smallest
    optimal coloring.
    """
    n = problem.n
    if n > limits.max_vertices:
        raise SolverSizeError(n, limits.max_vertices)
    if n == 0:
        return SearchResult(colors=[], proof="optimal", nodes=0)

    order = search_order(problem)
    start = list(incumbent) if incumbent is not None else greedy_colors(problem, order)
    search = _Search(problem, limits)
    best_colors, best_cost = search.minimize(order, start)
    if search.exhausted:
        log.warning(f"Exact search stopped after {search.nodes} nodes on {n} vertices; returning best incumbent.")
        return SearchResult(colors=canonical_colors(best_colors), proof="budget_exhausted", nodes=search.nodes)

    smallest = search.first_within(best_cost)
    if smallest is None:
        log.debug(f"Tie-break search ran out of budget on {n} vertices; keeping the first optimum found")
        smallest = canonical_colors(best_colors)
    log.debug(f"Exact search proved optimum {best_cost:.4f} on {n} vertices in {search.nodes} nodes")
    return SearchResult(colors=smallest, proof="optimal", nodes=search.nodes)



def solve_exact(
        graph: DecompositionGraph,
        k: int,
        alpha: float = DEFAULT_ALPHA,
        limits: SearchLimits = SearchLimits(),
) -> ExactOutcome:
    """Minimum conflicts + alpha * stitches coloring of ``graph``.

    Raises SolverSizeError above ``limits.max_vertices``. When the node or
    time budget runs out the best coloring found so far is returned with
    ``proof == "budget_exhausted"``.
    """
    if k < 2:
        raise ParameterError(f"K must be at least 2, got {k}")
    result = solve_problem(ColoringProblem.from_graph(graph, k, alpha), limits)
    coloring = Coloring(colors=tuple(result.colors), k=k)
    return ExactOutcome(
        coloring=coloring,
        report=evaluate_cost(graph, coloring, alpha),
        proof=result.proof,
        nodes=result.nodes,
    )
