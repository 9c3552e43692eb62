"""
Environment base types.

Physics environments are deterministic given (state, action); randomness
enters only through ``reset``. Episodes are capped at ``max_steps``.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, replace

import numpy as np

from teql.utils.validation import ensure_finite_vector, validate_length

DEFAULT_MAX_STEPS = 100


@dataclass(frozen=True, slots=True)
class EnvState:
    """Continuous state plus episode bookkeeping."""

    state: np.ndarray
    steps: int = 0
    done: bool = False


@dataclass(frozen=True, slots=True)
class StepResult:
    """
    Outcome of one environment step.

    ``terminated`` marks a true terminal state (no bootstrapping);
    ``truncated`` marks the step cap. ``done`` is either of them.
    """

    next: EnvState
    reward: float
    terminated: bool
    truncated: bool

    @property
    def done(self) -> bool:
        return self.terminated or self.truncated

    @property
    def state(self) -> np.ndarray:
        return self.next.state


class Environment(ABC):
    """
    Episodic continuous-state environment with a step cap.

    Subclasses implement ``dynamics`` and ``sample_initial_state``.
    """

    state_dim: int
    action_dim: int
    #: Upper bound on |reward| per step
    reward_bound: float

    def __init__(self, max_steps: int = DEFAULT_MAX_STEPS) -> None:
        if max_steps < 1:
            raise ValueError(f"max_steps must be positive, got {max_steps}")
        self.max_steps = max_steps
        self.current: EnvState | None = None

    @abstractmethod
    def dynamics(self, state: np.ndarray, action: np.ndarray) -> tuple[np.ndarray, float, bool]:
        """Return ``(next_state, reward, failed)`` for one step."""

    @abstractmethod
    def sample_initial_state(self, rng: np.random.Generator) -> np.ndarray:
        """Draw an initial state."""

    def reset(self, rng: np.random.Generator) -> np.ndarray:
        """Start a new episode and return its initial state."""
        self.current = EnvState(state=self.sample_initial_state(rng))
        return self.current.state

    def transition(self, env_state: EnvState, action: np.ndarray) -> StepResult:
        """
        Advance ``env_state`` by one step without touching ``self.current``.

        Raises:
            NonFiniteInputError: If the state or action contains NaN
            DimensionMismatchError: If the action has the wrong length
        """
        if env_state.done:
            raise RuntimeError("Episode already finished; call reset()")
        ensure_finite_vector(env_state.state, "state")
        action = np.asarray(action, dtype=np.float64)
        validate_length(action, self.action_dim, "action")
        ensure_finite_vector(action, "action")

        next_state, reward, failed = self.dynamics(env_state.state, action)
        steps = env_state.steps + 1
        truncated = not failed and steps >= self.max_steps
        nxt = replace(env_state, state=next_state, steps=steps, done=failed or truncated)
        return StepResult(next=nxt, reward=reward, terminated=failed, truncated=truncated)

    def step(self, action: np.ndarray) -> StepResult:
        """Advance the current episode by one step."""
        if self.current is None:
            raise RuntimeError("reset() must be called before step()")
        result = self.transition(self.current, action)
        self.current = result.next
        return result
