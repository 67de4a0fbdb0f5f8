"""Seeded synthetic layouts of horizontal wires at 20 nm half pitch.

Wires sit on tracks 40 nm apart. Each track is a row of 40 nm cells; a wire
covers 1-3 consecutive cells and stops 20 nm short of the next cell, so
neighbors on one track and on adjacent tracks are 20 nm apart. Rows are
filled cell by cell: a free cell starts a wire with probability ``density``.
The row width is chosen so that the polygons fill about ``density`` of a
square grid, which makes the expected conflict degree grow with density.
"""
import logging
import math

import numpy as np

from mpld.errors import ParameterError
from mpld.graphmodel import DecompositionGraph
from mpld.layoutio import Layout, Rect, build_graph, serialize_graph, serialize_layout
from mpld.layoutio.geometry import DEFAULT_HP_NM, WIRE_SPACING_NM, WIRE_WIDTH_NM, default_min_s

log = logging.getLogger(__name__)

PITCH_NM = WIRE_WIDTH_NM + WIRE_SPACING_NM
MAX_WIRE_CELLS = 3


def _check(n_polygons: int, density: float, stitch_rate: float, k: int) -> None:
    if n_polygons < 1:
        raise ParameterError(f"n_polygons must be positive, got {n_polygons}")
    if not 0.0 < density <= 1.0:
        raise ParameterError(f"density must be in (0, 1], got {density}")
    if not 0.0 <= stitch_rate <= 1.0:
        raise ParameterError(f"stitch_rate must be in [0, 1], got {stitch_rate}")
    if k < 2:
        raise ParameterError(f"K must be at least 2, got {k}")


def row_width(n_polygons: int, density: float) -> int:
    """Cells per row: a square grid with room for ``n_polygons`` two-cell wires at ``density``."""
    return max(MAX_WIRE_CELLS, math.ceil(math.sqrt(2 * n_polygons / density)))


def generate_layout(n_polygons: int, density: float, stitch_rate: float, k: int = 4, seed: int = 1) -> Layout:
    _check(n_polygons, density, stitch_rate, k)
    rng = np.random.default_rng(seed)
    width = row_width(n_polygons, density)
    rects: list[Rect] = []
    polygon = 0
    row = 0
    while polygon < n_polygons:
        y1 = row * PITCH_NM
        cell = 0
        while cell < width and polygon < n_polygons:
            if rng.random() >= density:
                cell += 1
                continue
            length = min(int(rng.integers(1, MAX_WIRE_CELLS + 1)), width - cell)
            split = length > 1 and rng.random() < stitch_rate
            x_end = (cell + length) * PITCH_NM - WIRE_SPACING_NM
            if split:
                for i in range(length):
                    x1 = (cell + i) * PITCH_NM
                    x2 = x_end if i == length - 1 else x1 + PITCH_NM
                    rects.append(Rect(polygon_id=polygon, x1=x1, y1=y1, x2=x2, y2=y1 + WIRE_WIDTH_NM))
            else:
                rects.append(Rect(polygon_id=polygon, x1=cell * PITCH_NM, y1=y1, x2=x_end, y2=y1 + WIRE_WIDTH_NM))
            polygon += 1
            cell += length
        row += 1
    log.debug(f"Synthetic layout: {n_polygons} polygons, {len(rects)} rects on {row} rows of {width} cells")
    return Layout(rects=tuple(rects), min_s=default_min_s(k), hp=DEFAULT_HP_NM)


def generate_synthetic(
        n_polygons: int,
        density: float,
        stitch_rate: float,
        k: int = 4,
        seed: int = 1,
        as_graph: bool = False,
) -> Layout | DecompositionGraph:
    """A layout, or its decomposition graph when ``as_graph`` is set."""
    layout = generate_layout(n_polygons, density, stitch_rate, k, seed)
    if as_graph:
        return build_graph(layout)
    return layout


def render_synthetic(
        n_polygons: int,
        density: float,
        stitch_rate: float,
        k: int = 4,
        seed: int = 1,
        as_graph: bool = False,
) -> str:
    """File text for :func:`generate_synthetic`: ``.lay``, or ``.dg`` with ``param k``."""
    result = generate_synthetic(n_polygons, density, stitch_rate, k, seed, as_graph)
    if isinstance(result, DecompositionGraph):
        return serialize_graph(result, k)
    return serialize_layout(result)
