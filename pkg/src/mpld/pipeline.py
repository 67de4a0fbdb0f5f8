"""Decomposition flow: ingest, divide, solve every leaf, merge back, verify.

Division nests four ways. An independent component is peeled; what remains
splits again into connected parts, each part into biconnected blocks, and
each block into pieces along Gomory-Hu cuts lighter than K. Pieces are the
units handed to a solver. Merging runs the same nesting in reverse.
"""
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from pydantic import BaseModel, ConfigDict, Field

from mpld.config import PipelineConfig
from mpld.division import (
    ArticulationLink,
    Component,
    DivisionPlan,
    PeelEntry,
    biconnected_split,
    independent_components,
    merge_at_articulations,
    peel_low_degree,
    reinsert_into,
)
from mpld.errors import ConfigError
from mpld.flow import weighted_network
from mpld.ghtree import CutRecord, build_gomory_hu, format_tree_dump, merge_with_rotation, refine_and_round, remove_kcuts
from mpld.graphmodel import Coloring, ColoringProblem, CostReport, DecompositionGraph, evaluate_cost
from mpld.layoutio import (
    Layout,
    build_graph,
    emit_svg,
    format_coloring,
    parse_graph_document,
    parse_layout_file,
)
from mpld.solvers.registration import register_all_solvers
from mpld.solvers.registry import SolverOutcome, get_solver_entry

log = logging.getLogger(__name__)


class ComponentStats(BaseModel):
    model_config = ConfigDict(frozen=True)

    index: int
    size: int
    peeled: int
    leaves: int
    largest_leaf: int
    conflicts: int
    stitches: int


class RunReport(BaseModel):
    algorithm: str
    k: int
    alpha: float
    metric: str
    vertices: int
    conflict_edges: int
    stitch_edges: int
    total: CostReport
    components: list[ComponentStats] = Field(default_factory=list)
    peeled: int = 0
    removed_cuts: int = 0
    cut_stitch_edges: int = 0
    peel_stitch_edges: int = Field(0, description="SE edges at peeled vertices left with different colors.")
    stage_ms: dict[str, float] = Field(default_factory=dict)
    budget_exhausted: bool = False
    fallbacks: list[str] = Field(default_factory=list)
    config: dict = Field(default_factory=dict)

    def to_text(self) -> str:
        lines = [
            f"algorithm={self.algorithm}",
            f"k={self.k}",
            f"alpha={self.alpha}",
            f"metric={self.metric}",
            f"vertices={self.vertices}",
            f"conflict_edges={self.conflict_edges}",
            f"stitch_edges={self.stitch_edges}",
            f"conflicts={self.total.conflicts}",
            f"stitches={self.total.stitches}",
            f"cost={self.total.weighted:.4f}",
            f"components={len(self.components)}",
            f"largest_component={max((c.size for c in self.components), default=0)}",
            f"leaves={sum(c.leaves for c in self.components)}",
            f"largest_leaf={max((c.largest_leaf for c in self.components), default=0)}",
            f"peeled={self.peeled}",
            f"removed_cuts={self.removed_cuts}",
            f"cut_stitch_edges={self.cut_stitch_edges}",
            f"peel_stitch_edges={self.peel_stitch_edges}",
            f"budget_exhausted={str(self.budget_exhausted).lower()}",
            f"fallbacks={len(self.fallbacks)}",
        ]
        lines.extend(f"time_ms.{stage}={ms:.0f}" for stage, ms in self.stage_ms.items())
        return "\n".join(lines) + "\n"


@dataclass
class _BlockPlan:
    block: Component
    pieces: list[list[int]]
    cuts: list[CutRecord]
    dump: str = ""


@dataclass
class _PartPlan:
    part: Component
    blocks: list[_BlockPlan]
    links: list[ArticulationLink]


@dataclass
class _ComponentPlan:
    component: Component
    reduced: Component
    stack: tuple[PeelEntry, ...]
    parts: list[_PartPlan] = field(default_factory=list)


@dataclass
class Decomposition:
    coloring: Coloring
    report: RunReport
    plan: DivisionPlan
    dumps: dict[str, str] = field(default_factory=dict)


def _lift(vertices: Sequence[int], inner: Sequence[int]) -> list[int]:
    return [vertices[i] for i in inner]


def _plan_block(block: Component, ids: list[int], graph: DecompositionGraph, config: PipelineConfig) -> _BlockPlan:
    if not config.ghtree or block.size < 2:
        return _BlockPlan(block=block, pieces=[list(range(block.size))], cuts=[])
    tree = refine_and_round(build_gomory_hu(weighted_network(block.graph, config.stitch_weight)))
    pieces, cuts = remove_kcuts(tree, config.masks, block.graph)
    dump = ""
    if config.dump_ghtree is not None:
        labelled = tree.model_copy(update={"edges": tuple(
            e.model_copy(update={"u": ids[e.u], "v": ids[e.v]}) for e in tree.edges
        )})
        dump = format_tree_dump(labelled, graph)
    return _BlockPlan(block=block, pieces=pieces, cuts=cuts, dump=dump)


def _plan(graph: DecompositionGraph, config: PipelineConfig) -> list[_ComponentPlan]:
    plans = []
    for component in independent_components(graph):
        if config.peel:
            peeled = peel_low_degree(component.graph, config.masks, config.peel_rule)
            reduced, stack = peeled.reduced, peeled.stack
        else:
            reduced = Component.of(component.graph, range(component.size))
            stack = ()
        plan = _ComponentPlan(component=component, reduced=reduced, stack=stack)
        reduced_ids = _lift(component.vertices, reduced.vertices)
        for part in independent_components(reduced.graph):
            part_ids = _lift(reduced_ids, part.vertices)
            if config.bcc:
                blocks, links = biconnected_split(part.graph)
            else:
                blocks, links = [Component.of(part.graph, range(part.size))], []
            plan.parts.append(_PartPlan(
                part=part,
                blocks=[_plan_block(b, _lift(part_ids, b.vertices), graph, config) for b in blocks],
                links=links,
            ))
        plans.append(plan)
    return plans


def _leaves(plans: list[_ComponentPlan]) -> list[DecompositionGraph]:
    return [
        block.block.graph.induced_subgraph(piece)
        for plan in plans for part in plan.parts for block in part.blocks for piece in block.pieces
    ]


def _merge(plans: list[_ComponentPlan], outcomes: list[SolverOutcome], graph: DecompositionGraph, config: PipelineConfig) -> list[int]:
    k, alpha = config.masks, config.alpha
    colors = [-1] * graph.n
    cursor = iter(outcomes)
    for plan in plans:
        component_colors = [-1] * plan.component.size
        for part in plan.parts:
            block_colorings = []
            for block in part.blocks:
                piece_colorings = [Coloring(colors=tuple(next(cursor).colors), k=k) for _ in block.pieces]
                block_colorings.append(
                    merge_with_rotation(piece_colorings, block.pieces, block.cuts, block.block.graph, k, alpha)
                )
            part_coloring = merge_at_articulations(block_colorings, [b.block for b in part.blocks], part.links, k)
            for local, c in zip(part.part.vertices, part_coloring.colors):
                component_colors[plan.reduced.vertices[local]] = c
        problem = ColoringProblem.from_graph(plan.component.graph, k, alpha)
        reinsert_into(problem, plan.stack, component_colors)
        for local, c in zip(plan.component.vertices, component_colors):
            colors[local] = c
    return colors


def _solve(leaf: DecompositionGraph, config: PipelineConfig) -> SolverOutcome:
    if leaf.n == 0:
        return SolverOutcome(colors=[])
    return get_solver_entry(config.algorithm).callable(leaf, config)


def decompose(graph: DecompositionGraph, config: PipelineConfig) -> Decomposition:
    """Color ``graph`` through division, per-leaf solving and merging.

    The reported totals are re-evaluated on the undivided graph.
    """
    register_all_solvers()
    get_solver_entry(config.algorithm)
    stage_ms: dict[str, float] = {}

    started = time.perf_counter()
    plans = _plan(graph, config)
    leaves = _leaves(plans)
    stage_ms["divide"] = (time.perf_counter() - started) * 1000
    log.info(f"Divided {graph.n} vertices into {len(plans)} components and {len(leaves)} leaves")

    started = time.perf_counter()
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        outcomes = list(pool.map(lambda leaf: _solve(leaf, config), leaves))
    stage_ms["solve"] = (time.perf_counter() - started) * 1000

    started = time.perf_counter()
    colors = _merge(plans, outcomes, graph, config)
    coloring = Coloring(colors=tuple(colors), k=config.masks)
    stage_ms["merge"] = (time.perf_counter() - started) * 1000

    started = time.perf_counter()
    total = evaluate_cost(graph, coloring, config.alpha)
    components = []
    leaf_sizes = iter(leaf.n for leaf in leaves)
    for index, plan in enumerate(plans):
        sizes = [next(leaf_sizes) for part in plan.parts for block in part.blocks for _ in block.pieces]
        sub = Coloring(colors=tuple(colors[v] for v in plan.component.vertices), k=config.masks)
        cost = evaluate_cost(plan.component.graph, sub, config.alpha)
        components.append(ComponentStats(
            index=index, size=plan.component.size, peeled=len(plan.stack), leaves=len(sizes),
            largest_leaf=max(sizes, default=0), conflicts=cost.conflicts, stitches=cost.stitches,
        ))
    stage_ms["evaluate"] = (time.perf_counter() - started) * 1000

    cuts = [cut for plan in plans for part in plan.parts for block in part.blocks for cut in block.cuts]
    fallbacks = [f for outcome in outcomes for f in outcome.fallbacks]
    peeled_ids = {plan.component.vertices[e.vertex] for plan in plans for e in plan.stack}
    peel_stitches = sum(
        1 for u, v in graph.stitch_edges if (u in peeled_ids or v in peeled_ids) and colors[u] != colors[v]
    )
    report = RunReport(
        algorithm=config.algorithm,
        k=config.masks,
        alpha=config.alpha,
        metric=config.metric,
        vertices=graph.n,
        conflict_edges=len(graph.conflict_edges),
        stitch_edges=len(graph.stitch_edges),
        total=total,
        components=components,
        peeled=sum(len(plan.stack) for plan in plans),
        removed_cuts=len(cuts),
        cut_stitch_edges=sum(cut.stitch_count for cut in cuts),
        peel_stitch_edges=peel_stitches,
        stage_ms=stage_ms,
        budget_exhausted=any(outcome.proof == "budget_exhausted" for outcome in outcomes),
        fallbacks=fallbacks,
        config=config.model_dump(mode="json"),
    )
    for reason in fallbacks:
        log.info(f"fallback: {reason}")

    plan_record = DivisionPlan(
        components=tuple(plan.component.vertices for plan in plans),
        peel_stack=tuple(
            PeelEntry(vertex=plan.component.vertices[e.vertex], d_conf=e.d_conf, d_stit=e.d_stit)
            for plan in plans for e in plan.stack
        ),
        articulation_links=tuple(link for plan in plans for part in plan.parts for link in part.links),
        cut_links=tuple(cuts),
    )
    dumps: dict[str, str] = {}
    tree_dump = "".join(block.dump for plan in plans for part in plan.parts for block in part.blocks)
    if tree_dump:
        dumps["ghtree"] = tree_dump
    for kind in ("affinity", "orders"):
        text = "".join(
            f"# leaf {index}\n{outcome.dumps[kind]}" for index, outcome in enumerate(outcomes) if kind in outcome.dumps
        )
        if text:
            dumps[kind] = text
    log.info(
        f"{config.algorithm}: cn={total.conflicts} st={total.stitches} cost={total.weighted:.4f} "
        f"({len(cuts)} cuts removed, {report.peeled} peeled)"
    )
    return Decomposition(coloring=coloring, report=report, plan=plan_record, dumps=dumps)


class PipelineResult(BaseModel):
    report: RunReport
    coloring: Coloring
    graph: DecompositionGraph
    layout: Layout | None = None
    text: str = Field(description="Coloring output document.")


def load_input(config: PipelineConfig) -> tuple[DecompositionGraph, Layout | None, PipelineConfig]:
    """Read the input file; resolves K from the file when the config leaves it unset."""
    if config.input is None:
        raise ConfigError("No input file given.")
    fmt = config.input_format()
    if fmt is None:
        raise ConfigError(f"Cannot infer the format of {config.input}; pass --format dg|lay.")
    try:
        text = config.input.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"Cannot read {config.input}: {e}") from e

    source = str(config.input)
    if fmt == "dg":
        document = parse_graph_document(text, source)
        if config.k is None and document.k is not None:
            config = config.model_copy(update={"k": document.k})
        return document.graph, None, config

    min_s, hp = config.layout_defaults()
    layout = parse_layout_file(text, min_s=min_s, hp=hp, source=source)
    overrides = {}
    if config.min_s is not None:
        overrides["min_s"] = config.min_s
    if config.hp is not None:
        overrides["hp"] = config.hp
    if overrides:
        layout = layout.model_copy(update=overrides)
    return build_graph(layout, config.metric), layout, config


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    log.info(f"Wrote {path}")


def run_pipeline(config: PipelineConfig) -> PipelineResult:
    """Ingest, decompose and write every requested output."""
    started = time.perf_counter()
    graph, layout, config = load_input(config)
    ingest_ms = (time.perf_counter() - started) * 1000

    result = decompose(graph, config)
    report = result.report
    report.stage_ms = {"ingest": ingest_ms, **report.stage_ms}
    total_ms = (time.perf_counter() - started) * 1000
    report.stage_ms["total"] = total_ms

    time_ms = 0 if config.omit_timing else int(round(total_ms))
    text = format_coloring(graph, result.coloring, report.total, time_ms)
    if config.output is not None:
        _write(config.output, text)
    if config.svg is not None:
        if layout is None:
            log.warning("SVG output needs a layout input; skipped for a graph file.")
        else:
            _write(config.svg, emit_svg(layout, result.coloring))
    if config.stats is not None:
        if config.stats.suffix == ".json":
            _write(config.stats, report.model_dump_json(indent=2) + "\n")
        else:
            _write(config.stats, report.to_text())
    for kind, path in (("ghtree", config.dump_ghtree), ("affinity", config.dump_affinity), ("orders", config.dump_orders)):
        if path is not None:
            _write(path, result.dumps.get(kind, ""))

    return PipelineResult(report=report, coloring=result.coloring, graph=graph, layout=layout, text=text)
