"""
Result records written into experiment bundles.
"""

from datetime import datetime
from typing import Any, Literal

from pydantic import BaseModel, Field

CellStatus = Literal["completed", "diverged", "failed", "skipped"]

#: Column name -> fraction of asymptotic performance
THRESHOLD_FRACTIONS: dict[str, float] = {"frac80": 0.8, "frac90": 0.9, "frac95": 0.95}


class RunResult(BaseModel):
    """Per-episode outcome of one (variant, seed) cell."""

    variant: str = Field(..., description="Variant name")
    seed_index: int = Field(..., ge=0, description="Seed position within the variant")
    seed: int = Field(..., ge=0, description="Derived cell seed")
    rewards: list[float] = Field(default_factory=list, description="Total reward per episode")
    smoothed: list[float] = Field(default_factory=list, description="Trailing-mean rewards")
    thresholds: dict[str, int | None] = Field(
        default_factory=dict,
        description="Episodes to 80/90/95% of the seed's own asymptote",
    )
    steps: int = Field(default=0, ge=0, description="Environment steps taken")
    visited_pairs: int = Field(default=0, ge=0, description="Distinct state-action pairs visited")
    diverged: bool = Field(default=False, description="Aborted by a non-finite update")
    divergence: dict[str, Any] | None = Field(default=None, description="Divergence diagnostic")

    @property
    def episodes(self) -> int:
        return len(self.rewards)


class AggregateResult(BaseModel):
    """Percentile bands and threshold distribution of one variant."""

    variant: str
    p25: list[float]
    p50: list[float]
    p75: list[float]
    #: seed_index -> column -> episode (None if never reached)
    thresholds: dict[int, dict[str, int | None]]
    median_thresholds: dict[str, float | None]
    median_asymptote: float


class CellOutcome(BaseModel):
    """Execution record of one cell for the manifest."""

    variant: str
    seed_index: int = Field(..., ge=0)
    seed: int = Field(..., ge=0)
    status: CellStatus
    duration_seconds: float = Field(default=0.0, ge=0)
    episodes: int = Field(default=0, ge=0)
    steps: int = Field(default=0, ge=0)
    error: dict[str, Any] | None = None


class StatisticsMetadata(BaseModel):
    """Definitions used to derive smoothed curves and thresholds."""

    smoothing_window: int
    asymptote_fraction: float
    percentile_method: str
    aggregated_series: str = "smoothed_reward"
    threshold_fractions: dict[str, float] = Field(default_factory=lambda: dict(THRESHOLD_FRACTIONS))
    threshold_floor: float | None = None
    threshold_reference: float | None = None


class Manifest(BaseModel):
    """Run record written as ``manifest.json``."""

    schema_version: int = 1
    experiment: str
    environment: str
    dry_run: bool = False
    started_at: datetime
    finished_at: datetime | None = None
    wall_time_seconds: float | None = None
    versions: dict[str, str] = Field(default_factory=dict)
    settings: dict[str, Any] = Field(default_factory=dict)
    config: dict[str, Any] = Field(default_factory=dict, description="Resolved base config")
    variants: dict[str, dict[str, Any]] = Field(
        default_factory=dict,
        description="Effective config per variant",
    )
    cells: list[CellOutcome] = Field(default_factory=list)
    divergence_log: list[dict[str, Any]] = Field(default_factory=list)
    statistics: StatisticsMetadata | None = None

    @property
    def diverged(self) -> bool:
        return any(c.status == "diverged" for c in self.cells)

    @property
    def failed(self) -> bool:
        return any(c.status in ("diverged", "failed") for c in self.cells)
