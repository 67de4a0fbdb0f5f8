import logging
from typing import Callable, Dict, List, Literal

from pydantic import BaseModel, ConfigDict, Field

from mpld.config import PipelineConfig
from mpld.graphmodel import DecompositionGraph

log = logging.getLogger(__name__)

Proof = Literal["optimal", "budget_exhausted", "heuristic"]


class SolverOutcome(BaseModel):
    """Colors for one leaf component plus what the pipeline must report."""
    colors: list[int]
    proof: Proof = "heuristic"
    fallbacks: list[str] = Field(default_factory=list, description="Documented solver substitutions.")
    dumps: Dict[str, str] = Field(default_factory=dict, description="Debug text keyed by dump kind.")


SolverFn = Callable[[DecompositionGraph, PipelineConfig], SolverOutcome]


class SolverRegistryEntry(BaseModel):
    """Internal metadata for solver dispatch."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    callable: Callable
    name: str
    title: str
    description: str


SOLVER_REGISTRY: Dict[str, SolverRegistryEntry] = {}


def register_solver(func: SolverFn, name: str, title: str, description: str) -> None:
    if name in SOLVER_REGISTRY:
        log.warning(f"Solver {name} already registered. Overwriting.")
    SOLVER_REGISTRY[name] = SolverRegistryEntry(callable=func, name=name, title=title, description=description)
    log.debug(f"Registered solver: {name}")


def get_solver_entry(name: str) -> SolverRegistryEntry:
    """Retrieves the registered solver."""
    if name not in SOLVER_REGISTRY:
        raise ValueError(f"Solver '{name}' not found in registry.")
    return SOLVER_REGISTRY[name]


def list_solvers() -> List[SolverRegistryEntry]:
    return [SOLVER_REGISTRY[name] for name in sorted(SOLVER_REGISTRY)]
