import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Sequence

from pydantic import ValidationError

from mpld.config import ALGORITHMS, DEFAULT_ALGORITHM, PipelineConfig
from mpld.errors import ConfigError, MpldError
from mpld.logging_config import setup_logging
from mpld.pipeline import run_pipeline
from mpld.solvers.exact import SearchLimits
from mpld.solvers.relax import RelaxParams
from mpld.synthetic import render_synthetic
from mpld.validation import as_config_error

log = logging.getLogger(__name__)

CONFIG_EXIT_CODE = ConfigError.exit_code


class _Parser(argparse.ArgumentParser):
    """Usage errors are configuration errors, not parse errors of an input file."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(CONFIG_EXIT_CODE, f"{self.prog}: error: {message}\n")


def _add_decompose(subparsers) -> None:
    parser = subparsers.add_parser("decompose", help="Assign K masks to a layout or decomposition graph.")
    parser.add_argument("--input", type=Path, required=True, help="Layout (.lay) or graph (.dg) file.")
    parser.add_argument("--format", choices=("dg", "lay"), default=None,
                        help="Input format. Inferred from the file suffix when omitted.")
    parser.add_argument("--k", type=int, default=None,
                        help="Number of masks. Defaults to the file's 'param k', then 4.")
    parser.add_argument("--alpha", type=float, default=0.1, help="Stitch weight in the cost.")
    parser.add_argument("--min-s", type=int, default=None,
                        help="Minimum coloring distance in nm. Overrides the layout file.")
    parser.add_argument("--hp", type=int, default=None, help="Half pitch in nm. Overrides the layout file.")
    parser.add_argument("--metric", choices=("euclidean", "rectilinear"), default="euclidean",
                        help="Distance between rectangles.")
    parser.add_argument(
        "--algo",
        choices=ALGORITHMS,
        default=os.getenv("MPLD_ALGO", DEFAULT_ALGORITHM),
        help=f"Color-assignment solver. Defaults to {DEFAULT_ALGORITHM}.",
    )
    parser.add_argument("--t-th", type=float, default=0.9, help="Affinity threshold for the merged graph.")
    parser.add_argument("--seed", type=int, default=os.getenv("MPLD_SEED", "1"), help="Seed for every RNG.")
    parser.add_argument("--no-peel", action="store_true", help="Skip low-degree peeling.")
    parser.add_argument("--no-bcc", action="store_true", help="Skip the biconnected split.")
    parser.add_argument("--no-ghtree", action="store_true", help="Skip Gomory-Hu cut removal.")
    parser.add_argument("--peel-rule", choices=("strict", "literal"), default="strict",
                        help="strict: d_conf < K and d_stit < 2. literal: d_conf + d_stit < K.")
    parser.add_argument("--stitch-weight", type=float, default=1.4, help="SE capacity in the cut network.")
    parser.add_argument("--workers", type=int, default=os.getenv("MPLD_WORKERS", "1"),
                        help="Threads solving leaf components.")
    parser.add_argument("--exact-max-vertices", type=int, default=24)
    parser.add_argument("--exact-max-nodes", type=int, default=5_000_000)
    parser.add_argument("--exact-time-ms", type=int, default=60_000)
    parser.add_argument("--fail-on-budget", action="store_true",
                        help="Exit with code 4 instead of keeping the best coloring when the exact budget runs out.")
    parser.add_argument("--relax-iterations", type=int, default=500)
    parser.add_argument("--relax-restarts", type=int, default=5)
    parser.add_argument("--fm-passes", type=int, default=10)
    parser.add_argument("--fm-seeds", type=int, default=1, help="Best of N seeded FM runs.")
    parser.add_argument("--refine-to-fixed-point", action="store_true",
                        help="Repeat linear post-refinement until no vertex moves.")
    parser.add_argument("--out", type=Path, default=None, help="Coloring output. Defaults to stdout.")
    parser.add_argument("--svg", type=Path, default=None, help="SVG rendering (layout input only).")
    parser.add_argument("--stats", type=Path, default=None, help="Run report; JSON when the name ends in .json.")
    parser.add_argument("--omit-timing", action="store_true", help="Write time_ms=0 in the coloring summary.")
    parser.add_argument("--dump-ghtree", type=Path, default=None)
    parser.add_argument("--dump-affinity", type=Path, default=None)
    parser.add_argument("--dump-orders", type=Path, default=None)


def _add_gen(subparsers) -> None:
    parser = subparsers.add_parser("gen", help="Write a seeded synthetic instance.")
    parser.add_argument("--polygons", type=int, required=True)
    parser.add_argument("--density", type=float, required=True, help="Fraction of grid cells starting a wire, in (0, 1].")
    parser.add_argument("--stitch-rate", type=float, default=0.2, help="Probability a multi-cell wire is pre-split.")
    parser.add_argument("--k", type=int, default=4)
    parser.add_argument("--seed", type=int, default=os.getenv("MPLD_SEED", "1"))
    parser.add_argument("--out", type=Path, default=None, help="Output file. Defaults to stdout.")
    parser.add_argument("--as-graph", action="store_true", help="Write the decomposition graph (.dg).")


def parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    parser = _Parser(prog="mpld", description="Multiple-patterning layout decomposition.")
    parser.add_argument("--verbose", action="store_true", help="Debug logging, including per-sweep detail.")
    parser.add_argument("--log-dir", type=Path, default=None, help="Directory of the rotating log file.")
    subparsers = parser.add_subparsers(dest="command", required=True)
    _add_decompose(subparsers)
    _add_gen(subparsers)
    return parser.parse_args(argv)


def build_config(args: argparse.Namespace) -> PipelineConfig:
    try:
        return PipelineConfig(
            input=args.input,
            format=args.format,
            k=args.k,
            alpha=args.alpha,
            min_s=args.min_s,
            hp=args.hp,
            metric=args.metric,
            algorithm=args.algo,
            t_th=args.t_th,
            seed=args.seed,
            peel=not args.no_peel,
            bcc=not args.no_bcc,
            ghtree=not args.no_ghtree,
            peel_rule=args.peel_rule,
            stitch_weight=args.stitch_weight,
            exact_limits=SearchLimits(
                max_vertices=args.exact_max_vertices,
                max_nodes=args.exact_max_nodes,
                time_budget_ms=args.exact_time_ms,
            ),
            relax=RelaxParams(iterations=args.relax_iterations, restarts=args.relax_restarts),
            fm_passes=args.fm_passes,
            fm_seeds=args.fm_seeds,
            refine_to_fixed_point=args.refine_to_fixed_point,
            fail_on_budget=args.fail_on_budget,
            workers=args.workers,
            output=args.out,
            svg=args.svg,
            stats=args.stats,
            omit_timing=args.omit_timing,
            dump_ghtree=args.dump_ghtree,
            dump_affinity=args.dump_affinity,
            dump_orders=args.dump_orders,
        )
    except ValidationError as e:
        raise as_config_error(e) from None


def _decompose(args: argparse.Namespace) -> None:
    config = build_config(args)
    log.info(f"Decomposing {config.input} with algo={config.algorithm} K={config.k or 'auto'} workers={config.workers}")
    result = run_pipeline(config)
    if config.output is None:
        sys.stdout.write(result.text)


def _gen(args: argparse.Namespace) -> None:
    text = render_synthetic(args.polygons, args.density, args.stitch_rate, args.k, args.seed, args.as_graph)
    if args.out is None:
        sys.stdout.write(text)
        return
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(text, encoding="utf-8")
    log.info(f"Wrote synthetic instance to {args.out}")


def main(argv: Sequence[str] | None = None) -> int:
    args = parse_args(argv)
    setup_logging(verbose=args.verbose, log_dir=args.log_dir)
    try:
        if args.command == "decompose":
            _decompose(args)
        else:
            _gen(args)
    except MpldError as e:
        log.error(str(e))
        return e.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
