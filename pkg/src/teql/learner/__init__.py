"""Low-rank tensor Q-update and its visit/error bookkeeping."""

from teql.learner.tables import StatTables
from teql.learner.update import (
    Transition,
    UpdateReport,
    bcd_update,
    compute_target,
    grad_factor_entry,
    grad_row,
    loss,
)

__all__ = [
    "StatTables",
    "Transition",
    "UpdateReport",
    "bcd_update",
    "compute_target",
    "grad_factor_entry",
    "grad_row",
    "loss",
]
