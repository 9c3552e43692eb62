"""Verification machinery: dense reconstruction, finite differences, regret."""

from teql.oracle.dense import DENSE_SIZE_CAP, dense_reconstruct
from teql.oracle.gradients import factor_entry_closure, finite_diff_grad
from teql.oracle.regret import RegretTrace, run_regret_experiment

__all__ = [
    "DENSE_SIZE_CAP",
    "RegretTrace",
    "dense_reconstruct",
    "factor_entry_closure",
    "finite_diff_grad",
    "run_regret_experiment",
]
