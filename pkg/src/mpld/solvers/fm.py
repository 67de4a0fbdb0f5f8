"""K-way move-based improvement in the style of Fiduccia-Mattheyses.

Seen as a partition problem, a coloring is a K-way partition whose cut
value counts CE edges with weight +1 and SE edges with weight -alpha; the
best partition maximizes it. A move recolors one vertex. Each pass moves
every vertex once, always taking the best available move even when its gain
is negative, then keeps only the best prefix of the pass.
"""
import heapq
import logging
from typing import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from mpld.errors import InvariantError, ParameterError
from mpld.graphmodel import DEFAULT_ALPHA, Coloring, ColoringProblem, DecompositionGraph

log = logging.getLogger(__name__)

GAIN_EPS = 1e-12


class MoveRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    vertex: int
    from_color: int
    to_color: int
    gain: float = Field(description="Weighted cost decrease of this move at its position in the pass.")
    index: int


class PassRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    moves: int = Field(description="Moves tried in the pass.")
    kept: int = Field(description="Length of the best prefix kept.")
    gain: float = Field(description="Cumulative gain of the kept prefix.")


class FmOutcome(BaseModel):
    colors: list[int]
    passes: list[PassRecord]
    initial_cost: float
    final_cost: float


def gain_components(graph: DecompositionGraph, coloring: Coloring, v: int, to_color: int) -> tuple[int, int]:
    """(conflicts removed, stitches removed) by recoloring ``v`` to ``to_color``."""
    if not 0 <= v < graph.n:
        raise ParameterError(f"Vertex {v} not in graph with {graph.n} vertices.")
    if not 0 <= to_color < coloring.k:
        raise ParameterError(f"Color {to_color} outside [0, {coloring.k}).")
    current = coloring.colors[v]
    if to_color == current:
        raise ParameterError(f"Vertex {v} already has color {to_color}.")
    colors = coloring.colors
    conflicts = sum(1 for u in graph.conflict_adj[v] if colors[u] == current) \
        - sum(1 for u in graph.conflict_adj[v] if colors[u] == to_color)
    stitches = sum(1 for u in graph.stitch_adj[v] if colors[u] == to_color) \
        - sum(1 for u in graph.stitch_adj[v] if colors[u] == current)
    return conflicts, stitches


def compute_gain(
        graph: DecompositionGraph, coloring: Coloring, v: int, to_color: int, alpha: float = DEFAULT_ALPHA,
) -> float:
    """Weighted cost before minus after moving only ``v``."""
    conflicts, stitches = gain_components(graph, coloring, v, to_color)
    return conflicts + alpha * stitches


class _PassState:
    """Per-vertex color counts of CE and SE neighbors."""

    def __init__(self, problem: ColoringProblem, colors: list[int]):
        self.problem = problem
        self.colors = colors
        k = problem.k
        self.ce = [[0] * k for _ in range(problem.n)]
        self.se = [[0] * k for _ in range(problem.n)]
        for v in range(problem.n):
            for u, w in problem.ce_adj[v]:
                self.ce[v][colors[u]] += w
            for u, w in problem.se_adj[v]:
                self.se[v][colors[u]] += w

    def gain(self, v: int, c: int) -> tuple[float, int, int]:
        cur = self.colors[v]
        conflicts = self.ce[v][cur] - self.ce[v][c]
        stitches = self.se[v][c] - self.se[v][cur]
        return conflicts + self.problem.alpha * stitches, conflicts, stitches

    def cut_gain(self, v: int, c: int) -> float:
        """Change of the partition cut value, counted edge by edge."""
        cur = self.colors[v]
        delta = 0.0
        for u, w in self.problem.ce_adj[v]:
            delta += w * ((self.colors[u] != c) - (self.colors[u] != cur))
        for u, w in self.problem.se_adj[v]:
            delta -= self.problem.alpha * w * ((self.colors[u] != c) - (self.colors[u] != cur))
        return delta

    def move(self, v: int, c: int) -> None:
        old = self.colors[v]
        for u, w in self.problem.ce_adj[v]:
            self.ce[u][old] -= w
            self.ce[u][c] += w
        for u, w in self.problem.se_adj[v]:
            self.se[u][old] -= w
            self.se[u][c] += w
        self.colors[v] = c


def _run_pass(problem: ColoringProblem, colors: list[int]) -> tuple[list[int], PassRecord]:
    k = problem.k
    state = _PassState(problem, list(colors))
    locked = [False] * problem.n
    version = [0] * problem.n
    heap: list[tuple[float, int, int, int]] = []

    def push(v: int) -> None:
        for c in range(k):
            if c != state.colors[v]:
                heapq.heappush(heap, (-state.gain(v, c)[0], v, c, version[v]))

    for v in range(problem.n):
        push(v)

    moves: list[MoveRecord] = []
    total = 0.0
    best_total, best_len = 0.0, 0
    while heap:
        neg_gain, v, c, stamp = heapq.heappop(heap)
        if locked[v] or stamp != version[v]:
            continue
        gain, _, _ = state.gain(v, c)
        cut = state.cut_gain(v, c)
        if abs(cut - gain) > 1e-9:
            raise InvariantError(f"Cost gain {gain} and cut gain {cut} disagree for move {v}->{c}")
        moves.append(MoveRecord(vertex=v, from_color=state.colors[v], to_color=c, gain=gain, index=len(moves)))
        state.move(v, c)
        locked[v] = True
        total += gain
        if total > best_total + GAIN_EPS:
            best_total, best_len = total, len(moves)
        for adj in (problem.ce_adj[v], problem.se_adj[v]):
            for u, _ in adj:
                if not locked[u]:
                    version[u] += 1
                    push(u)

    result = list(colors)
    for move in moves[:best_len]:
        result[move.vertex] = move.to_color
    return result, PassRecord(moves=len(moves), kept=best_len, gain=best_total)


def run_fm(problem: ColoringProblem, initial: Sequence[int], max_passes: int = 10) -> FmOutcome:
    if max_passes < 1:
        raise ParameterError(f"max_passes must be at least 1, got {max_passes}")
    colors = list(initial)
    initial_cost = problem.weighted(colors)
    passes: list[PassRecord] = []
    for index in range(max_passes):
        candidate, record = _run_pass(problem, colors)
        passes.append(record)
        if record.gain <= GAIN_EPS:
            log.debug(f"FM pass {index + 1}: no improving prefix, stopping")
            break
        before = problem.weighted(colors)
        after = problem.weighted(candidate)
        if not after < before:
            raise InvariantError(f"FM pass with gain {record.gain} did not lower the cost ({before} -> {after})")
        colors = candidate
        log.debug(f"FM pass {index + 1}: kept {record.kept}/{record.moves} moves, gain {record.gain:.4f}")
    return FmOutcome(colors=colors, passes=passes, initial_cost=initial_cost, final_cost=problem.weighted(colors))


def random_coloring(n: int, k: int, seed: int) -> list[int]:
    rng = np.random.default_rng(seed)
    return rng.integers(0, k, size=n).tolist()


def fm_color(
        graph: DecompositionGraph,
        k: int,
        alpha: float = DEFAULT_ALPHA,
        seed: int = 1,
        max_passes: int = 10,
        initial: Coloring | None = None,
) -> Coloring:
    """FM improvement from a seeded uniform random coloring (or ``initial``)."""
    if k < 2:
        raise ParameterError(f"K must be at least 2, got {k}")
    start = list(initial.colors) if initial is not None else random_coloring(graph.n, k, seed)
    outcome = run_fm(ColoringProblem.from_graph(graph, k, alpha), start, max_passes)
    return Coloring(colors=tuple(outcome.colors), k=k)


def fm_best_of(
        graph: DecompositionGraph,
        k: int,
        alpha: float = DEFAULT_ALPHA,
        seed: int = 1,
        max_passes: int = 10,
        seeds: int = 1,
) -> Coloring:
    """Best of FM runs seeded ``seed, seed + 1, ...``; ties keep the earlier seed."""
    if seeds < 1:
        raise ParameterError(f"seeds must be at least 1, got {seeds}")
    problem = ColoringProblem.from_graph(graph, k, alpha)
    best: tuple[float, int, list[int]] | None = None
    for offset in range(seeds):
        outcome = run_fm(problem, random_coloring(graph.n, k, seed + offset), max_passes)
        conflicts, stitches = problem.counts(outcome.colors)
        key = (conflicts + alpha * stitches, stitches)
        if best is None or key < best[:2]:
            best = (key[0], key[1], outcome.colors)
    return Coloring(colors=tuple(best[2]), k=k)
