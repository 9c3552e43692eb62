"""
Environment presets: default grids, exploration settings and the five
discretization granularities used for sensitivity sweeps.
"""

import math
from dataclasses import dataclass, field
from typing import Literal

from teql.core.discretization import DiscretizationSpec
from teql.envs import cartpole, pendulum
from teql.envs.base import Environment

EnvironmentId = Literal["pendulum", "cartpole"]
GranularityName = Literal["very_coarse", "coarse", "median", "fine", "very_fine"]

GRANULARITY_ORDER: tuple[GranularityName, ...] = (
    "very_coarse",
    "coarse",
    "median",
    "fine",
    "very_fine",
)


@dataclass(frozen=True)
class EnvironmentPreset:
    """Defaults for one environment id."""

    name: EnvironmentId
    state_bounds: tuple[tuple[float, float], ...]
    action_bounds: tuple[tuple[float, float], ...]
    state_bins: tuple[int, ...]
    action_bins: tuple[int, ...]
    epsilon_initial: float
    physics: dict[str, float] = field(default_factory=dict)
    #: Granularity name -> (state bins, action bins)
    granularities: dict[str, tuple[tuple[int, ...], tuple[int, ...]]] = field(default_factory=dict)

    def make(self, max_steps: int) -> Environment:
        """Instantiate the environment."""
        if self.name == "pendulum":
            return pendulum.PendulumEnv(max_steps)
        return cartpole.CartPoleEnv(max_steps)

    def spec(
        self,
        state_bins: tuple[int, ...] | None = None,
        action_bins: tuple[int, ...] | None = None,
    ) -> DiscretizationSpec:
        """Discretization with the preset bounds and the given (or default) bins."""
        return DiscretizationSpec.from_bins(
            self.state_bounds,
            state_bins or self.state_bins,
            self.action_bounds,
            action_bins or self.action_bins,
        )

    def granularity_spec(self, name: str) -> DiscretizationSpec:
        """Discretization for one of the five granularity presets."""
        state_bins, action_bins = self.granularities[name]
        return self.spec(state_bins, action_bins)


PRESETS: dict[str, EnvironmentPreset] = {
    "pendulum": EnvironmentPreset(
        name="pendulum",
        state_bounds=((-math.pi, math.pi), (-8.0, 8.0)),
        action_bounds=((-2.0, 2.0),),
        state_bins=(20, 20),
        action_bins=(10,),
        epsilon_initial=1.0,
        physics=pendulum.PHYSICS,
        granularities={
            "very_coarse": ((8, 8), (4,)),
            "coarse": ((15, 15), (8,)),
            "median": ((20, 20), (10,)),
            "fine": ((30, 30), (15,)),
            "very_fine": ((40, 40), (20,)),
        },
    ),
    "cartpole": EnvironmentPreset(
        name="cartpole",
        state_bounds=((-4.8, 4.8), (-4.0, 4.0), (-0.418, 0.418), (-4.0, 4.0)),
        action_bounds=((-1.0, 1.0),),
        state_bins=(10, 10, 20, 20),
        action_bins=(10,),
        epsilon_initial=0.0,
        physics=cartpole.PHYSICS,
        granularities={
            "very_coarse": ((5, 5, 8, 8), (4,)),
            "coarse": ((8, 8, 15, 15), (8,)),
            "median": ((10, 10, 20, 20), (10,)),
            "fine": ((15, 15, 30, 30), (15,)),
            "very_fine": ((20, 20, 40, 40), (20,)),
        },
    ),
}


def get_preset(env_id: str) -> EnvironmentPreset:
    """
    Look up an environment preset.

    Raises:
        KeyError: If ``env_id`` is unknown
    """
    try:
        return PRESETS[env_id]
    except KeyError:
        raise KeyError(f"Unknown environment '{env_id}'; choose from {sorted(PRESETS)}") from None
