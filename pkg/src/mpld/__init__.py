"""K-patterning layout decomposition."""
from mpld.graphmodel import (
    Coloring,
    CostReport,
    DecompositionGraph,
    degrees,
    evaluate_cost,
    rotate_colors,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "Coloring",
    "CostReport",
    "DecompositionGraph",
    "degrees",
    "evaluate_cost",
    "rotate_colors",
    "validate",
]
