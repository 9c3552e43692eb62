"""Pydantic models for configuration and results."""

from teql.schemas.learner import LearnerConfig
from teql.schemas.policy import PolicyConfig, PolicyKind
from teql.schemas.results import (
    THRESHOLD_FRACTIONS,
    AggregateResult,
    CellOutcome,
    Manifest,
    RunResult,
    StatisticsMetadata,
)
from teql.schemas.run import (
    DiscretizationConfig,
    ExperimentKind,
    RegretConfig,
    RunConfig,
    load_run_config,
)

__all__ = [
    "THRESHOLD_FRACTIONS",
    "AggregateResult",
    "CellOutcome",
    "DiscretizationConfig",
    "ExperimentKind",
    "LearnerConfig",
    "Manifest",
    "PolicyConfig",
    "PolicyKind",
    "RegretConfig",
    "RunConfig",
    "RunResult",
    "StatisticsMetadata",
    "load_run_config",
]
