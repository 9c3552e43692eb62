"""
Learner hyperparameters.
"""

import math
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator

from teql.errors import ConfigurationError


class LearnerConfig(BaseModel):
    """
    Hyperparameters of the low-rank tensor Q-update.

    ``penalty_weight`` and ``q_clip`` accept ``"auto"``; ``resolved`` turns
    them into numbers once the run length and reward bound are known.
    ``row_step_cap`` bounds a single row step to that fraction of the way
    to the row's exact solution; null leaves the plain gradient step.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    penalty_weight: float | Literal["auto"] = Field(
        default="auto",
        description="Frequency penalty weight lambda >= 0; auto = sqrt(d_eff / T)",
    )
    penalty_epsilon: float = Field(
        default=1.0,
        gt=0,
        description="Penalty stabilizer added to the visit count",
    )
    learning_rate: float = Field(
        default=0.005,
        gt=0,
        description="Base learning rate alpha_0",
    )
    lr_decay: float = Field(
        default=1e-5,
        ge=0,
        description="Learning-rate decay kappa in alpha_t = alpha_0 / (1 + kappa t)",
    )
    discount: float = Field(
        default=0.9,
        gt=0,
        lt=1,
        description="Discount factor gamma",
    )
    tolerance: float = Field(
        default=0.01,
        gt=0,
        description="Inner-loop convergence threshold tau on |Q_curr - Q_prev|",
    )
    max_inner_iterations: int = Field(
        default=5,
        ge=1,
        description="Maximum gradient steps per factor row",
    )
    q_clip: float | Literal["auto"] | None = Field(
        default="auto",
        description="Bound on |Q| after each update; auto = 2 R_max / (1 - gamma); null disables",
    )
    row_step_cap: float | None = Field(
        default=1.0,
        gt=0,
        le=1,
        description="Largest fraction of the TD error one row step may close; null disables",
    )

    @field_validator("penalty_weight")
    @classmethod
    def validate_penalty_weight(cls, v: float | str) -> float | str:
        """Reject a negative lambda."""
        if not isinstance(v, str) and v < 0:
            raise ValueError(f"penalty_weight must be non-negative, got {v}")
        return v

    @field_validator("q_clip")
    @classmethod
    def validate_q_clip(cls, v: float | str | None) -> float | str | None:
        """Reject a non-positive Q bound."""
        if v is not None and not isinstance(v, str) and v <= 0:
            raise ValueError(f"q_clip must be positive, got {v}")
        return v

    @property
    def penalty(self) -> float:
        """Numeric lambda; raises if still ``auto``."""
        if self.penalty_weight == "auto":
            raise ConfigurationError("penalty_weight is unresolved; call resolved() first")
        return float(self.penalty_weight)

    @property
    def clip(self) -> float | None:
        """Numeric Q bound or None; raises if still ``auto``."""
        if self.q_clip == "auto":
            raise ConfigurationError("q_clip is unresolved; call resolved() first")
        return None if self.q_clip is None else float(self.q_clip)

    def learning_rate_at(self, t: int) -> float:
        """``alpha_t = alpha_0 / (1 + kappa t)``."""
        return self.learning_rate / (1.0 + self.lr_decay * t)

    def resolved(self, d_eff: int, total_steps: int, reward_bound: float) -> "LearnerConfig":
        """
        Replace ``auto`` values with numbers.

        Args:
            d_eff: Effective dimension R * N
            total_steps: Planned number of environment steps T
            reward_bound: Per-step reward bound R_max
        """
        update: dict[str, float] = {}
        if self.penalty_weight == "auto":
            update["penalty_weight"] = math.sqrt(d_eff / max(total_steps, 1))
        if self.q_clip == "auto":
            update["q_clip"] = 2.0 * reward_bound / (1.0 - self.discount)
        return self.model_copy(update=update)
