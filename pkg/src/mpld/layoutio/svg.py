import svgwrite

from mpld.errors import DimensionError, ParameterError
from mpld.graphmodel import Coloring
from mpld.layoutio.geometry import Layout

PALETTE = (
    "#e6194b", "#3cb44b", "#4363d8", "#f58231",
    "#911eb4", "#42d4f4", "#f032e6", "#bfef45",
    "#fabed4", "#469990", "#dcbeff", "#9a6324",
    "#fffac8", "#800000", "#aaffc3", "#000075",
)

MARGIN_NM = 20


def emit_svg(layout: Layout, coloring: Coloring) -> str:
    """Render every rect filled with the palette entry of its mask.

    Layout y grows upwards, so the drawing is flipped inside one group.
    """
    if coloring.k > len(PALETTE):
        raise ParameterError(f"SVG palette holds {len(PALETTE)} masks, K={coloring.k}")
    if len(coloring) != len(layout.rects):
        raise DimensionError(f"Coloring has {len(coloring)} entries for {len(layout.rects)} rects.")

    if layout.rects:
        x_min = min(r.x1 for r in layout.rects) - MARGIN_NM
        y_min = min(r.y1 for r in layout.rects) - MARGIN_NM
        x_max = max(r.x2 for r in layout.rects) + MARGIN_NM
        y_max = max(r.y2 for r in layout.rects) + MARGIN_NM
    else:
        x_min, y_min, x_max, y_max = 0, 0, 1, 1
    width, height = x_max - x_min, y_max - y_min

    dwg = svgwrite.Drawing(size=(f"{width}", f"{height}"), profile="tiny", debug=False)
    dwg.viewbox(x_min, 0, width, height)
    flipped = dwg.g(transform=f"matrix(1 0 0 -1 0 {y_max})")
    for rect, color in zip(layout.rects, coloring.colors):
        flipped.add(dwg.rect(
            insert=(rect.x1, rect.y1),
            size=(rect.x2 - rect.x1, rect.y2 - rect.y1),
            fill=PALETTE[color],
            stroke="black",
            stroke_width=1,
        ))
    dwg.add(flipped)
    return dwg.tostring()
