"""CP tensor storage and state-action discretization."""

from teql.core.discretization import (
    DimensionSpec,
    DiscretizationSpec,
    action_value_of_index,
    discretize_component,
    discretize_state_action,
)
from teql.core.tensor import (
    CpModel,
    IndexTuple,
    evaluate_q,
    init_model,
    max_q_over_actions,
    parameter_count,
)

__all__ = [
    "CpModel",
    "DimensionSpec",
    "DiscretizationSpec",
    "IndexTuple",
    "action_value_of_index",
    "discretize_component",
    "discretize_state_action",
    "evaluate_q",
    "init_model",
    "max_q_over_actions",
    "parameter_count",
]
