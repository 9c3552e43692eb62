"""
Uniform grid discretization of continuous states and actions.

Component ``x`` on ``[lower, upper]`` with ``d`` bins maps to
``floor((clamp(x) - lower) / (upper - lower) * (d - 1)) + 1``, so the
bounds land on indices 1 and d. Action indices map back to grid nodes
``lower + (j - 1) / (d - 1) * (upper - lower)``.
"""

import math
from collections.abc import Sequence
from functools import cached_property

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from teql.core.tensor import IndexTuple
from teql.errors import IndexOutOfRangeError
from teql.utils.validation import ensure_not_nan, validate_length

# Relative distance below which a value is snapped onto a grid node, so
# index -> value -> index is the identity despite rounding.
_NODE_SNAP = 1e-9


class DimensionSpec(BaseModel):
    """Bounds and bin count for one continuous dimension."""

    model_config = ConfigDict(frozen=True)

    lower: float = Field(..., description="Lower bound s_min")
    upper: float = Field(..., description="Upper bound s_max")
    bins: int = Field(..., ge=2, description="Number of bins d")

    @model_validator(mode="after")
    def validate_bounds(self) -> "DimensionSpec":
        """Require finite bounds with lower < upper."""
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise ValueError("Bounds must be finite")
        if self.lower >= self.upper:
            raise ValueError(f"lower ({self.lower}) must be below upper ({self.upper})")
        return self

    @property
    def bin_width(self) -> float:
        """Distance between neighbouring grid nodes."""
        return (self.upper - self.lower) / (self.bins - 1)


class DiscretizationSpec(BaseModel):
    """Per-dimension grids for the state and action vectors."""

    model_config = ConfigDict(frozen=True)

    state: list[DimensionSpec] = Field(..., min_length=1, description="State dimensions")
    action: list[DimensionSpec] = Field(..., min_length=1, description="Action dimensions")

    @property
    def n_state_dims(self) -> int:
        return len(self.state)

    @property
    def n_action_dims(self) -> int:
        return len(self.action)

    @property
    def dims(self) -> tuple[int, ...]:
        """Tensor mode sizes, state dimensions first."""
        return tuple(d.bins for d in [*self.state, *self.action])

    @property
    def total_pairs(self) -> int:
        """Number of discrete state-action pairs ``prod(d_n)``."""
        return math.prod(self.dims)

    @cached_property
    def action_nodes(self) -> list[np.ndarray]:
        """Continuous action grid nodes per action dimension."""
        return [np.linspace(d.lower, d.upper, d.bins) for d in self.action]

    @classmethod
    def from_bins(
        cls,
        state_bounds: Sequence[tuple[float, float]],
        state_bins: Sequence[int],
        action_bounds: Sequence[tuple[float, float]],
        action_bins: Sequence[int],
    ) -> "DiscretizationSpec":
        """Build a spec from parallel bound and bin lists."""
        if len(state_bounds) != len(state_bins) or len(action_bounds) != len(action_bins):
            raise ValueError("Bounds and bins must have the same length")
        return cls(
            state=[
                DimensionSpec(lower=lo, upper=hi, bins=b)
                for (lo, hi), b in zip(state_bounds, state_bins, strict=True)
            ],
            action=[
                DimensionSpec(lower=lo, upper=hi, bins=b)
                for (lo, hi), b in zip(action_bounds, action_bins, strict=True)
            ],
        )


def discretize_component(x: float, dim: DimensionSpec) -> int:
    """
    Map a continuous value to its 1-based bin index.

    Out-of-range values are clamped to ``[lower, upper]`` first.

    Raises:
        NonFiniteInputError: If ``x`` is NaN
    """
    ensure_not_nan(x, "x")
    clamped = min(max(x, dim.lower), dim.upper)
    position = (clamped - dim.lower) / (dim.upper - dim.lower) * (dim.bins - 1)
    nearest = round(position)
    if abs(position - nearest) <= _NODE_SNAP * dim.bins:
        return int(nearest) + 1
    return int(math.floor(position)) + 1


def discretize_state(s: Sequence[float] | np.ndarray, spec: DiscretizationSpec) -> IndexTuple:
    """
    Map a continuous state vector to its state index prefix.

    Raises:
        DimensionMismatchError: If ``len(s) != D_S``
    """
    validate_length(s, spec.n_state_dims, "state")
    return tuple(discretize_component(float(x), d) for x, d in zip(s, spec.state, strict=True))


def discretize_action(a: Sequence[float] | np.ndarray, spec: DiscretizationSpec) -> IndexTuple:
    """
    Map a continuous action vector to its action index suffix.

    Raises:
        DimensionMismatchError: If ``len(a) != D_A``
    """
    validate_length(a, spec.n_action_dims, "action")
    return tuple(discretize_component(float(x), d) for x, d in zip(a, spec.action, strict=True))


def discretize_state_action(
    s: Sequence[float] | np.ndarray,
    a: Sequence[float] | np.ndarray,
    spec: DiscretizationSpec,
) -> IndexTuple:
    """Full index tuple, state indices followed by action indices."""
    return discretize_state(s, spec) + discretize_action(a, spec)


def action_value_of_index(j: int, dim: DimensionSpec) -> float:
    """
    Continuous grid node for a 1-based action index.

    Raises:
        IndexOutOfRangeError: If ``j`` is outside ``[1, bins]``
    """
    if not 1 <= j <= dim.bins:
        raise IndexOutOfRangeError(f"Action index {j} outside [1, {dim.bins}]", index=j)
    return dim.lower + (j - 1) / (dim.bins - 1) * (dim.upper - dim.lower)


def action_vector(action_idx: IndexTuple, spec: DiscretizationSpec) -> np.ndarray:
    """Continuous action vector sent to the environment for an action index tuple."""
    validate_length(action_idx, spec.n_action_dims, "action index")
    return np.array(
        [action_value_of_index(j, d) for j, d in zip(action_idx, spec.action, strict=True)]
    )
