"""Dinic max-flow on an arc-array network with integer capacities.

Capacities are fixed-point integers: a real capacity ``c`` is stored as
``round(c * scale)``. With ``scale = 10`` the 1.0 / 1.4 weights of the
decomposition graph and every flow value are exact.
"""
import logging
from collections import deque
from dataclasses import dataclass, field

from pydantic import BaseModel, ConfigDict

from mpld.errors import ParameterError
from mpld.graphmodel import DecompositionGraph

log = logging.getLogger(__name__)

CAPACITY_SCALE = 10
CONFLICT_WEIGHT = 1.0
DEFAULT_STITCH_WEIGHT = 1.4


@dataclass(slots=True)
class FlowNetwork:
    """Arc ``a`` and its reverse ``a ^ 1`` are always stored as a pair."""
    n: int
    scale: int = CAPACITY_SCALE
    head: list[int] = field(default_factory=list)
    capacity: list[int] = field(default_factory=list)
    adj: list[list[int]] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.adj:
            self.adj = [[] for _ in range(self.n)]

    def add_arc(self, u: int, v: int, cap: int, reverse_cap: int = 0) -> int:
        if cap < 0 or reverse_cap < 0:
            raise ParameterError(f"Negative capacity on arc {u}->{v}")
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise ParameterError(f"Arc {u}->{v} outside network with {self.n} vertices")
        index = len(self.head)
        self.head.extend((v, u))
        self.capacity.extend((cap, reverse_cap))
        self.adj[u].append(index)
        self.adj[v].append(index + 1)
        return index

    def add_edge(self, u: int, v: int, cap: int) -> int:
        """Undirected edge: one arc pair with capacity ``cap`` both ways."""
        return self.add_arc(u, v, cap, cap)

    def tail(self, arc: int) -> int:
        return self.head[arc ^ 1]

    def arcs(self):
        for a in range(0, len(self.head), 2):
            yield self.tail(a), self.head[a], self.capacity[a], self.capacity[a + 1]

    def to_real(self, value: int) -> float:
        return value / self.scale

    def is_connected(self) -> bool:
        if self.n <= 1:
            return True
        seen = [False] * self.n
        seen[0] = True
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for a in self.adj[u]:
                v = self.head[a]
                if not seen[v]:
                    seen[v] = True
                    queue.append(v)
        return all(seen)


class FlowResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    scaled_value: int
    value: float
    source_side: frozenset[int]


def _scaled(weight: float, scale: int) -> int:
    scaled = round(weight * scale)
    if abs(weight * scale - scaled) > 1e-9:
        raise ParameterError(f"Weight {weight} is not representable at capacity scale {scale}")
    return scaled


def weighted_network(graph: DecompositionGraph, stitch_weight: float = DEFAULT_STITCH_WEIGHT) -> FlowNetwork:
    """CE edges get capacity 1, SE edges ``stitch_weight``."""
    network = FlowNetwork(graph.n)
    ce_cap = _scaled(CONFLICT_WEIGHT, network.scale)
    se_cap = _scaled(stitch_weight, network.scale)
    for u, v in graph.conflict_edges:
        network.add_edge(u, v, ce_cap)
    for u, v in graph.stitch_edges:
        network.add_edge(u, v, se_cap)
    return network


def _bfs_levels(network: FlowNetwork, residual: list[int], s: int) -> list[int]:
    level = [-1] * network.n
    level[s] = 0
    queue = deque([s])
    head = network.head
    while queue:
        u = queue.popleft()
        for a in network.adj[u]:
            v = head[a]
            if residual[a] > 0 and level[v] < 0:
                level[v] = level[u] + 1
                queue.append(v)
    return level


def _augment(network: FlowNetwork, residual: list[int], level: list[int], it: list[int], s: int, t: int) -> int:
    """Push one shortest augmenting path in the level graph; 0 when blocked."""
    head = network.head
    adj = network.adj
    path: list[int] = []
    u = s
    while True:
        if u == t:
            pushed = min(residual[a] for a in path)
            for a in path:
                residual[a] -= pushed
                residual[a ^ 1] += pushed
            return pushed
        arcs = adj[u]
        while it[u] < len(arcs):
            a = arcs[it[u]]
            v = head[a]
            if residual[a] > 0 and level[v] == level[u] + 1:
                path.append(a)
                u = v
                break
            it[u] += 1
        else:
            if u == s:
                return 0
            # Dead end: drop it from the level graph and retreat.
            level[u] = -1
            a = path.pop()
            u = head[a ^ 1]
            it[u] += 1


def max_flow(network: FlowNetwork, s: int, t: int) -> FlowResult:
    """Maximum s-t flow and the residual-reachable source side of a minimum cut.

    The network itself is not modified.
    """
    if s == t:
        raise ParameterError("Source and sink must differ.")
    if not (0 <= s < network.n and 0 <= t < network.n):
        raise ParameterError(f"Terminals {s}, {t} outside network with {network.n} vertices")

    residual = list(network.capacity)
    total = 0
    phases = 0
    while True:
        level = _bfs_levels(network, residual, s)
        if level[t] < 0:
            break
        phases += 1
        it = [0] * network.n
        while pushed := _augment(network, residual, level, it, s, t):
            total += pushed

    reach = _bfs_levels(network, residual, s)
    side = frozenset(v for v in range(network.n) if reach[v] >= 0)
    log.debug(f"max_flow({s}, {t}) = {total}/{network.scale} in {phases} phases")
    return FlowResult(scaled_value=total, value=network.to_real(total), source_side=side)
