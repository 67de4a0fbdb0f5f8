"""Shared strategies, small graph builders and brute-force oracles for the test suite."""
import itertools

import numpy as np
from hypothesis import strategies as st

from mpld.graphmodel import Coloring, DecompositionGraph

# Largest instance per K that the canonical-coloring enumeration handles quickly.
ORACLE_MAX_N = {3: 10, 4: 10, 5: 10}


def graph_of(n, ce=(), se=(), fe=()):
    return DecompositionGraph.from_edges(n, ce, se, fe)


def clique_edges(vertices):
    return list(itertools.combinations(vertices, 2))


def clique(n):
    return graph_of(n, ce=clique_edges(range(n)))


@st.composite
def decomposition_graphs(draw, min_n=1, max_n=8, stitches=True):
    """Every vertex pair is independently nothing, a CE edge or an SE edge."""
    n = draw(st.integers(min_n, max_n))
    kinds = ("none", "ce", "ce", "se") if stitches else ("none", "ce")
    pairs = list(itertools.combinations(range(n), 2))
    drawn = draw(st.lists(st.sampled_from(kinds), min_size=len(pairs), max_size=len(pairs)))
    ce = [p for p, kind in zip(pairs, drawn) if kind == "ce"]
    se = [p for p, kind in zip(pairs, drawn) if kind == "se"]
    return graph_of(n, ce, se)


@st.composite
def connected_graphs(draw, min_n=2, max_n=12, stitches=True):
    """A random spanning tree plus extra edges, each edge CE or SE."""
    n = draw(st.integers(min_n, max_n))
    kind = st.sampled_from(("ce", "ce", "se") if stitches else ("ce",))
    edges = {}
    for v in range(1, n):
        u = draw(st.integers(0, v - 1))
        edges[(u, v)] = draw(kind)
    extra = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=2 * n))
    for a, b in extra:
        if a != b:
            edges.setdefault((min(a, b), max(a, b)), draw(kind))
    ce = [e for e, k in edges.items() if k == "ce"]
    se = [e for e, k in edges.items() if k == "se"]
    return graph_of(n, ce, se)


def colorings(n, k):
    return st.lists(st.integers(0, k - 1), min_size=n, max_size=n).map(lambda c: Coloring(colors=tuple(c), k=k))


@st.composite
def colored_graphs(draw, ks=(2, 3, 4, 5), max_n=10):
    k = draw(st.sampled_from(ks))
    graph = draw(decomposition_graphs(max_n=max_n))
    return graph, draw(colorings(graph.n, k))


def random_graph(rng, n, ce_density, se_rate):
    """Seeded graph for loops over many instances: each pair CE with ``ce_density``,
    otherwise SE with ``se_rate``."""
    ce, se = [], []
    for pair in itertools.combinations(range(n), 2):
        if rng.random() < ce_density:
            ce.append(pair)
        elif rng.random() < se_rate:
            se.append(pair)
    return graph_of(n, ce, se)


def canonical_colorings(n, k):
    """Every coloring that opens colors in order (0 first, then the next unused one), sorted
    lexicographically. Costs are invariant under color permutation, so these cover all K^n."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    table = np.zeros((1, 1), dtype=np.int64)
    top = np.zeros(1, dtype=np.int64)
    for _ in range(1, n):
        blocks, tops = [], []
        for c in range(k):
            keep = top + 1 >= c
            blocks.append(np.hstack([table[keep], np.full((int(keep.sum()), 1), c, dtype=np.int64)]))
            tops.append(np.maximum(top[keep], c))
        table = np.vstack(blocks)
        top = np.concatenate(tops)
    return table[np.lexsort(table.T[::-1])]


def _enumerated_costs(graph, k, alpha):
    table = canonical_colorings(graph.n, k)
    conflicts = np.zeros(len(table), dtype=np.int64)
    stitches = np.zeros(len(table), dtype=np.int64)
    for u, v in graph.conflict_edges:
        conflicts += table[:, u] == table[:, v]
    for u, v in graph.stitch_edges:
        stitches += table[:, u] != table[:, v]
    return table, conflicts + alpha * stitches


def brute_force_cost(graph, k, alpha):
    """Minimum conflicts + alpha * stitches by full enumeration."""
    return float(_enumerated_costs(graph, k, alpha)[1].min())


def brute_force_smallest_optimum(graph, k, alpha):
    """Lexicographically smallest coloring of minimum cost."""
    table, costs = _enumerated_costs(graph, k, alpha)
    first = np.flatnonzero(costs <= costs.min() + 1e-9)[0]
    return tuple(int(c) for c in table[first])
