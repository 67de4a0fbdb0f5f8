"""Statistical acceptance checks on seeded synthetic layouts.

Solver quality ordering, linear-time scaling of the linear solver, and the
effect of Gomory-Hu cut removal. These are trends, not guarantees, so they
run here instead of in the test suite. Exit code 1 when any check fails.
"""
import argparse
import json
import logging
import sys
import time
from dataclasses import asdict, dataclass

import numpy as np

from acceptance_config import FULL_CONFIG, QUICK_CONFIG, TrendConfig
from mpld.config import PipelineConfig
from mpld.graphmodel import DecompositionGraph
from mpld.pipeline import decompose
from mpld.solvers.linear import linear_assign
from mpld.solvers.relax import RelaxParams
from mpld.synthetic import generate_synthetic

log = logging.getLogger()

QUALITY_ALGORITHMS = ("sdp-backtrack", "linear", "sdp-greedy")


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    values: dict


def _instances(config: TrendConfig, count: int, sizes: tuple[int, int], seed_offset: int):
    rng = np.random.default_rng(config.seed + seed_offset)
    for index in range(count):
        n = int(rng.integers(sizes[0], sizes[1] + 1))
        graph = generate_synthetic(
            n, config.quality_density, config.quality_stitch_rate, seed=config.seed + seed_offset + index, as_graph=True,
        )
        yield index, graph


def _pipeline(config: TrendConfig, algorithm: str, **overrides) -> PipelineConfig:
    relax = RelaxParams(iterations=config.relax_iterations, restarts=config.relax_restarts)
    return PipelineConfig(k=4, algorithm=algorithm, relax=relax, seed=config.seed, **overrides)


def check_solver_quality(config: TrendConfig) -> CheckResult:
    costs = {algorithm: [] for algorithm in QUALITY_ALGORITHMS}
    for index, graph in _instances(config, config.quality_instances, config.quality_sizes, 0):
        for algorithm in QUALITY_ALGORITHMS:
            costs[algorithm].append(decompose(graph, _pipeline(config, algorithm)).report.total.weighted)
        log.info(
            f"quality {index}: n={graph.n} "
            + " ".join(f"{a}={costs[a][-1]:.1f}" for a in QUALITY_ALGORITHMS)
        )
    means = {algorithm: float(np.mean(values)) for algorithm, values in costs.items()}
    wins = float(np.mean([b <= lin for b, lin in zip(costs["sdp-backtrack"], costs["linear"])]))
    ordered = means["sdp-backtrack"] <= means["linear"] <= means["sdp-greedy"]
    passed = ordered and wins >= config.min_backtrack_win_rate
    detail = (
        f"mean cost backtrack {means['sdp-backtrack']:.2f} / linear {means['linear']:.2f} / "
        f"greedy {means['sdp-greedy']:.2f}; backtrack <= linear on {wins:.0%}"
    )
    return CheckResult("solver quality", passed, detail, {"means": means, "backtrack_win_rate": wins})


def _time_linear(graph: DecompositionGraph, trials: int) -> float:
    elapsed = []
    for _ in range(trials):
        started = time.perf_counter()
        linear_assign(graph, 4)
        elapsed.append(time.perf_counter() - started)
    return float(np.mean(elapsed))


def check_linear_scaling(config: TrendConfig) -> CheckResult:
    ratios = {}
    for n in config.scaling_sizes:
        small = generate_synthetic(n, 0.5, 0.2, seed=config.seed, as_graph=True)
        large = generate_synthetic(2 * n, 0.5, 0.2, seed=config.seed, as_graph=True)
        t_small = _time_linear(small, config.scaling_trials)
        t_large = _time_linear(large, config.scaling_trials)
        ratios[n] = t_large / t_small
        log.info(f"scaling n={n}: {t_small * 1000:.0f} ms, 2n: {t_large * 1000:.0f} ms, ratio {ratios[n]:.2f}")
    passed = all(r < config.max_scaling_ratio for r in ratios.values())
    detail = ", ".join(f"t(2n)/t(n) at n={n}: {r:.2f}" for n, r in ratios.items())
    return CheckResult("linear scaling", passed, detail, {str(n): r for n, r in ratios.items()})


def check_ghtree_effect(config: TrendConfig) -> CheckResult:
    failures = []
    diffs = []
    for index, graph in _instances(config, config.ghtree_instances, config.ghtree_sizes, 10_000):
        with_tree = decompose(graph, _pipeline(config, "sdp-backtrack")).report
        without = decompose(graph, _pipeline(config, "sdp-backtrack", ghtree=False)).report
        diff = with_tree.total.stitches - without.total.stitches
        diffs.append(diff)
        if with_tree.total.conflicts != without.total.conflicts or diff > with_tree.removed_cuts:
            failures.append(index)
        log.info(
            f"ghtree {index}: n={graph.n} cn {with_tree.total.conflicts}/{without.total.conflicts} "
            f"st {with_tree.total.stitches}/{without.total.stitches} cuts {with_tree.removed_cuts}"
        )
    detail = f"{len(failures)} of {config.ghtree_instances} instances differ; stitch diffs {diffs}"
    return CheckResult("ghtree A/B", not failures, detail, {"failures": failures, "stitch_diffs": diffs})


def print_table(results: list[CheckResult]) -> None:
    width = max(len(r.name) for r in results)
    for result in results:
        print(f"{result.name:<{width}}  {'PASS' if result.passed else 'FAIL'}  {result.detail}")


def main() -> int:
    parser = argparse.ArgumentParser(description="Run the statistical acceptance checks.")
    parser.add_argument("--quick", action="store_true", help="Small sizes for a smoke run.")
    parser.add_argument("--skip-scaling", action="store_true")
    args = parser.parse_args()
    config = QUICK_CONFIG if args.quick else FULL_CONFIG

    log.info(f"--- Acceptance trend checks ({config.name}) ---")
    results = [check_solver_quality(config)]
    if not args.skip_scaling:
        results.append(check_linear_scaling(config))
    results.append(check_ghtree_effect(config))

    print_table(results)
    config.results_file.write_text(
        json.dumps({"config": config.name, "checks": [asdict(r) for r in results]}, indent=2) + "\n",
        encoding="utf-8",
    )
    log.info(f"Results written to {config.results_file}")
    return 0 if all(r.passed for r in results) else 1


if __name__ == "__main__":
    logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
    sys.exit(main())
