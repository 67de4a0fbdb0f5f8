import logging
import math
from collections import defaultdict
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from mpld.graphmodel import DecompositionGraph, Edge

log = logging.getLogger(__name__)

Metric = Literal["euclidean", "rectilinear"]

# Wire width and spacing of the 20 nm half-pitch node.
WIRE_WIDTH_NM = 20
WIRE_SPACING_NM = 20
DEFAULT_HP_NM = 20


def default_min_s(k: int) -> int:
    """Minimum coloring distance for K masks at the 20 nm node.

    2*s + 2*w for quadruple patterning, 3*s + 2.5*w for five masks and up.
    """
    if k >= 5:
        return int(3 * WIRE_SPACING_NM + 2.5 * WIRE_WIDTH_NM)
    return 2 * WIRE_SPACING_NM + 2 * WIRE_WIDTH_NM


class Rect(BaseModel):
    """Axis-aligned rectangle in integer nm, one piece of polygon ``polygon_id``."""
    model_config = ConfigDict(frozen=True)

    polygon_id: int
    x1: int
    y1: int
    x2: int
    y2: int

    @model_validator(mode="after")
    def _positive_area(self) -> "Rect":
        if self.x1 >= self.x2 or self.y1 >= self.y2:
            raise ValueError(f"rect ({self.x1},{self.y1})-({self.x2},{self.y2}) has no area")
        return self


class Layout(BaseModel):
    model_config = ConfigDict(frozen=True)

    rects: tuple[Rect, ...] = ()
    min_s: int = Field(gt=0, description="Minimum coloring distance in nm.")
    hp: int = Field(DEFAULT_HP_NM, gt=0, description="Half pitch in nm.")


def axis_gaps(a: Rect, b: Rect) -> tuple[int, int]:
    dx = max(0, b.x1 - a.x2, a.x1 - b.x2)
    dy = max(0, b.y1 - a.y2, a.y1 - b.y2)
    return dx, dy


def gap(a: Rect, b: Rect, metric: Metric = "euclidean") -> float:
    """Distance between two closed rectangles; 0 when they touch or overlap."""
    dx, dy = axis_gaps(a, b)
    if metric == "rectilinear":
        return float(dx + dy)
    return math.hypot(dx, dy)


def _abut(a: Rect, b: Rect) -> bool:
    # Closed intersection is a segment or area of positive length; corners do not count.
    ix = min(a.x2, b.x2) - max(a.x1, b.x1)
    iy = min(a.y2, b.y2) - max(a.y1, b.y1)
    return ix >= 0 and iy >= 0 and (ix > 0 or iy > 0)


def _overlap(a: Rect, b: Rect) -> bool:
    return min(a.x2, b.x2) > max(a.x1, b.x1) and min(a.y2, b.y2) > max(a.y1, b.y1)


def _cells(x1: float, y1: float, x2: float, y2: float, size: float):
    for cx in range(math.floor(x1 / size), math.floor(x2 / size) + 1):
        for cy in range(math.floor(y1 / size), math.floor(y2 / size) + 1):
            yield cx, cy


def candidate_pairs(rects: tuple[Rect, ...], reach: float) -> list[Edge]:
    """Pairs whose bounding boxes come within ``reach`` of each other.

    Uses a uniform grid of cell size ``reach``; every pair closer than
    ``reach`` under either metric is returned, sorted.
    """
    grid: dict[tuple[int, int], list[int]] = defaultdict(list)
    for i, r in enumerate(rects):
        for cell in _cells(r.x1, r.y1, r.x2, r.y2, reach):
            grid[cell].append(i)

    pairs: set[Edge] = set()
    for i, r in enumerate(rects):
        for cell in _cells(r.x1 - reach, r.y1 - reach, r.x2 + reach, r.y2 + reach, reach):
            for j in grid.get(cell, ()):
                if j > i:
                    pairs.add((i, j))
    return sorted(pairs)


def build_graph(layout: Layout, metric: Metric = "euclidean") -> DecompositionGraph:
    """One vertex per rect, in layout order.

    CE: different polygons closer than min_s. SE: same polygon, abutting.
    FE: different polygons with min_s < gap < min_s + hp.
    """
    rects = layout.rects
    reach = float(layout.min_s + layout.hp)
    ce: list[Edge] = []
    se: list[Edge] = []
    fe: list[Edge] = []
    overlaps = 0
    for i, j in candidate_pairs(rects, reach):
        a, b = rects[i], rects[j]
        if a.polygon_id == b.polygon_id:
            if _abut(a, b):
                se.append((i, j))
            continue
        d = gap(a, b, metric)
        if d < layout.min_s:
            ce.append((i, j))
            if _overlap(a, b):
                overlaps += 1
                log.warning(f"Rects {i} and {j} of polygons {a.polygon_id} and {b.polygon_id} overlap.")
        elif layout.min_s < d < layout.min_s + layout.hp:
            fe.append((i, j))

    log.info(
        f"Built decomposition graph from {len(rects)} rects ({metric}, min_s={layout.min_s}, hp={layout.hp}): "
        f"{len(ce)} CE, {len(se)} SE, {len(fe)} FE edges"
        + (f", {overlaps} overlapping pairs" if overlaps else "")
    )
    return DecompositionGraph.from_edges(len(rects), ce, se, fe)
