from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

from mpld.division import PeelRule
from mpld.layoutio.geometry import DEFAULT_HP_NM, Metric, default_min_s
from mpld.solvers.exact import SearchLimits
from mpld.solvers.relax import RelaxParams

Algorithm = Literal["exact", "sdp-backtrack", "sdp-greedy", "linear", "fm"]
InputFormat = Literal["dg", "lay"]

ALGORITHMS: tuple[Algorithm, ...] = ("exact", "sdp-backtrack", "sdp-greedy", "linear", "fm")
DEFAULT_K = 4
DEFAULT_ALGORITHM: Algorithm = "sdp-backtrack"


class PipelineConfig(BaseModel):
    """Every tunable of one decomposition run."""
    model_config = ConfigDict(frozen=True)

    input: Path | None = Field(None, description="Layout (.lay) or graph (.dg) file.")
    format: InputFormat | None = Field(None, description="Input format; inferred from the suffix when unset.")
    k: int | None = Field(None, ge=2, description="Mask count; falls back to the file's 'param k', then 4.")
    alpha: float = Field(0.1, ge=0.0, description="Stitch weight in the objective.")
    min_s: int | None = Field(None, gt=0, description="Minimum coloring distance in nm; overrides the file.")
    hp: int | None = Field(None, gt=0, description="Half pitch in nm; overrides the file.")
    metric: Metric = "euclidean"
    algorithm: Algorithm = DEFAULT_ALGORITHM
    t_th: float = Field(0.9, gt=0.0, le=1.0, description="Affinity threshold of the merged graph.")
    seed: int = 1

    peel: bool = True
    bcc: bool = True
    ghtree: bool = True
    peel_rule: PeelRule = "strict"
    stitch_weight: float = Field(1.4, gt=0.0, description="SE capacity in the cut network.")

    exact_limits: SearchLimits = SearchLimits()
    relax: RelaxParams = RelaxParams()
    fm_passes: int = Field(10, ge=1)
    fm_seeds: int = Field(1, ge=1)
    refine_to_fixed_point: bool = False
    fail_on_budget: bool = False
    workers: int = Field(1, ge=1)

    output: Path | None = None
    svg: Path | None = None
    stats: Path | None = None
    omit_timing: bool = Field(False, description="Write time_ms=0 so repeated runs are byte-identical.")
    dump_ghtree: Path | None = None
    dump_affinity: Path | None = None
    dump_orders: Path | None = None

    @property
    def masks(self) -> int:
        return self.k if self.k is not None else DEFAULT_K

    def relax_params(self) -> RelaxParams:
        return self.relax.model_copy(update={"seed": self.seed, "t_th": self.t_th})

    def layout_defaults(self) -> tuple[int, int]:
        """(min_s, hp) used when a layout file does not set them."""
        return default_min_s(self.masks), DEFAULT_HP_NM

    def input_format(self) -> InputFormat | None:
        if self.format is not None:
            return self.format
        if self.input is not None and self.input.suffix in (".dg", ".lay"):
            return self.input.suffix[1:]
        return None
