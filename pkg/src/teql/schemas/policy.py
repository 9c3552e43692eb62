"""
Action-selection settings.
"""

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

PolicyKind = Literal["euge", "ucb", "epsilon_greedy", "greedy"]


class PolicyConfig(BaseModel):
    """Exploration strategy and its constants."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: PolicyKind = Field(
        default="euge",
        description="Selection rule",
    )
    exploration: float = Field(
        default=2.0,
        ge=0,
        description="Exploration constant c for euge/ucb (0 degenerates to greedy)",
    )
    epsilon_initial: float | None = Field(
        default=None,
        ge=0,
        le=1,
        description="Initial epsilon for epsilon_greedy; null = environment default",
    )
    epsilon_decay: float = Field(
        default=0.99,
        gt=0,
        le=1,
        description="Multiplicative epsilon decay per episode",
    )

    def epsilon_at(self, episode: int) -> float:
        """Epsilon in effect during 0-based ``episode``: ``eps_0 * decay**episode``."""
        return (self.epsilon_initial or 0.0) * self.epsilon_decay**episode
