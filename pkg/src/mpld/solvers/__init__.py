from mpld.solvers.exact import SearchLimits, solve_exact
from mpld.solvers.fm import compute_gain, fm_color
from mpld.solvers.linear import linear_assign
from mpld.solvers.relax import (
    RelaxParams,
    backtrack_color,
    greedy_mapping,
    simplex_vectors,
    solve_relaxation,
    threshold_merge,
)

__all__ = [
    "RelaxParams",
    "SearchLimits",
    "backtrack_color",
    "compute_gain",
    "fm_color",
    "greedy_mapping",
    "linear_assign",
    "simplex_vectors",
    "solve_exact",
    "solve_relaxation",
    "threshold_merge",
]
