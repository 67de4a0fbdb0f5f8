# scripts/acceptance_config.py

from dataclasses import dataclass, field
from pathlib import Path

ROOT_DIR = Path(__file__).parent.parent


@dataclass
class TrendConfig:
    """Sizes and seeds of the statistical acceptance checks."""
    name: str
    quality_instances: int
    quality_sizes: tuple[int, int]
    quality_density: float
    quality_stitch_rate: float
    min_backtrack_win_rate: float
    scaling_sizes: tuple[int, ...]
    scaling_trials: int
    max_scaling_ratio: float
    ghtree_instances: int
    ghtree_sizes: tuple[int, int]
    relax_iterations: int = 200
    relax_restarts: int = 3
    seed: int = 1
    results_file: Path = field(default_factory=lambda: ROOT_DIR / "acceptance_results.json")


FULL_CONFIG = TrendConfig(
    name="full",
    quality_instances=50,
    quality_sizes=(100, 300),
    quality_density=0.8,
    quality_stitch_rate=0.2,
    min_backtrack_win_rate=0.7,
    scaling_sizes=(10_000, 20_000, 40_000),
    scaling_trials=5,
    max_scaling_ratio=3.0,
    ghtree_instances=30,
    ghtree_sizes=(100, 300),
)


QUICK_CONFIG = TrendConfig(
    name="quick",
    quality_instances=8,
    quality_sizes=(60, 120),
    quality_density=0.8,
    quality_stitch_rate=0.2,
    min_backtrack_win_rate=0.7,
    scaling_sizes=(2_000, 4_000),
    scaling_trials=3,
    max_scaling_ratio=3.0,
    ghtree_instances=6,
    ghtree_sizes=(60, 120),
    relax_iterations=100,
    relax_restarts=2,
)
