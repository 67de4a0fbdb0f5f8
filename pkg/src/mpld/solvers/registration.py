"""Adapters that expose every color-assignment solver under its CLI name."""
import logging

from mpld.config import PipelineConfig
from mpld.errors import BudgetExhaustedError, SolverSizeError
from mpld.graphmodel import Coloring, ColoringProblem, DecompositionGraph
from mpld.solvers.exact import solve_exact
from mpld.solvers.fm import fm_best_of
from mpld.solvers.linear import run_linear
from mpld.solvers.registry import SOLVER_REGISTRY, SolverOutcome, register_solver
from mpld.solvers.relax import (
    AffinityMatrix,
    backtrack_color,
    greedy_mapping,
    solve_relaxation,
    threshold_merge,
)

log = logging.getLogger(__name__)


def _linear(graph: DecompositionGraph, config: PipelineConfig) -> SolverOutcome:
    problem = ColoringProblem.from_graph(graph, config.masks, config.alpha)
    outcome = run_linear(problem, rule=config.peel_rule, fixed_point=config.refine_to_fixed_point)
    dumps = {}
    if config.dump_orders is not None:
        dumps["orders"] = "".join(
            f"order {c.order} cn={c.conflicts} st={c.stitches} cost={c.weighted:.4f}"
            f"{' chosen' if c.order == outcome.chosen else ''}\n"
            for c in outcome.candidates
        )
    return SolverOutcome(colors=outcome.colors, dumps=dumps)


def _fallback(graph: DecompositionGraph, config: PipelineConfig, reason: str) -> SolverOutcome:
    log.warning(f"{reason}; using the linear solver on {graph.n} vertices.")
    outcome = _linear(graph, config)
    outcome.fallbacks.append(reason)
    return outcome


def _check_budget(proof: str, graph: DecompositionGraph, config: PipelineConfig) -> None:
    if proof == "budget_exhausted" and config.fail_on_budget:
        raise BudgetExhaustedError(f"Exact search budget exhausted on a component of {graph.n} vertices.")


def solve_with_exact(graph: DecompositionGraph, config: PipelineConfig) -> SolverOutcome:
    try:
        outcome = solve_exact(graph, config.masks, config.alpha, config.exact_limits)
    except SolverSizeError as e:
        return _fallback(graph, config, f"exact->linear: {e}")
    _check_budget(outcome.proof, graph, config)
    return SolverOutcome(colors=list(outcome.coloring.colors), proof=outcome.proof)


def _relax(graph: DecompositionGraph, config: PipelineConfig) -> tuple[AffinityMatrix, dict[str, str]]:
    warm = Coloring(colors=tuple(_linear(graph, config).colors), k=config.masks)
    affinity = solve_relaxation(graph, config.masks, config.alpha, config.relax_params(), warm_start=warm)
    dumps = {"affinity": affinity.dump()} if config.dump_affinity is not None else {}
    return affinity, dumps


def solve_with_sdp_backtrack(graph: DecompositionGraph, config: PipelineConfig) -> SolverOutcome:
    if graph.n > config.relax.max_vertices:
        return _fallback(graph, config, f"sdp-backtrack->linear: {graph.n} vertices over relaxation limit")
    affinity, dumps = _relax(graph, config)
    merged = threshold_merge(affinity, graph, config.t_th)
    outcome = backtrack_color(merged, config.masks, config.alpha, config.exact_limits)
    fallbacks = []
    if outcome.fell_back:
        fallbacks.append(f"backtrack->linear: merged graph of {merged.n} groups over exact limit")
    _check_budget(outcome.proof, graph, config)
    proof = "budget_exhausted" if outcome.proof == "budget_exhausted" else "heuristic"
    return SolverOutcome(colors=list(outcome.coloring.colors), proof=proof, fallbacks=fallbacks, dumps=dumps)


def solve_with_sdp_greedy(graph: DecompositionGraph, config: PipelineConfig) -> SolverOutcome:
    if graph.n > config.relax.max_vertices:
        return _fallback(graph, config, f"sdp-greedy->linear: {graph.n} vertices over relaxation limit")
    affinity, dumps = _relax(graph, config)
    coloring = greedy_mapping(affinity, graph, config.masks, config.alpha)
    return SolverOutcome(colors=list(coloring.colors), dumps=dumps)


def solve_with_linear(graph: DecompositionGraph, config: PipelineConfig) -> SolverOutcome:
    return _linear(graph, config)


def solve_with_fm(graph: DecompositionGraph, config: PipelineConfig) -> SolverOutcome:
    coloring = fm_best_of(graph, config.masks, config.alpha, config.seed, config.fm_passes, config.fm_seeds)
    return SolverOutcome(colors=list(coloring.colors))


def register_all_solvers() -> None:
    """Populate the solver registry; safe to call more than once."""
    if SOLVER_REGISTRY:
        return
    register_solver(solve_with_exact, "exact", "Branch and bound",
                    "Optimal assignment for small components; falls back to linear above the size limit.")
    register_solver(solve_with_sdp_backtrack, "sdp-backtrack", "Relaxation + backtrack",
                    "Vector relaxation, threshold merge, exhaustive search on the merged graph.")
    register_solver(solve_with_sdp_greedy, "sdp-greedy", "Relaxation + greedy mapping",
                    "Vector relaxation rounded by greedy affinity grouping.")
    register_solver(solve_with_linear, "linear", "Linear assignment",
                    "Peel, three vertex orders with peer selection, refinement, reinsertion.")
    register_solver(solve_with_fm, "fm", "FM partition",
                    "K-way move-based improvement from seeded random colorings.")
