"""Training loop, learning-curve statistics and experiment orchestration."""

from teql.harness.experiment import build_variants, derive_seed, run_experiment
from teql.harness.results import report
from teql.harness.statistics import aggregate_seeds, episodes_to_threshold, smooth
from teql.harness.training import run_training

__all__ = [
    "aggregate_seeds",
    "build_variants",
    "derive_seed",
    "episodes_to_threshold",
    "report",
    "run_experiment",
    "run_training",
    "smooth",
]
