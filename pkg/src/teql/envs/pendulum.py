"""
Pendulum swing-up with the standard classic-control constants.

State is ``(theta, theta_dot)`` with theta = 0 upright; action is a torque
in ``[-2, 2]``. Episodes never fail early and end at the step cap.
"""

import math

import numpy as np

from teql.envs.base import DEFAULT_MAX_STEPS, EnvState, Environment, StepResult

GRAVITY = 10.0
MASS = 1.0
LENGTH = 1.0
DT = 0.05
MAX_SPEED = 8.0
MAX_TORQUE = 2.0

#: Largest per-step cost: pi^2 + 0.1 * 8^2 + 0.001 * 2^2
REWARD_BOUND = math.pi**2 + 0.1 * MAX_SPEED**2 + 0.001 * MAX_TORQUE**2

PHYSICS = {
    "gravity": GRAVITY,
    "mass": MASS,
    "length": LENGTH,
    "dt": DT,
    "max_speed": MAX_SPEED,
    "max_torque": MAX_TORQUE,
}


def angle_normalize(x: float) -> float:
    """Wrap an angle into ``[-pi, pi)``."""
    return ((x + math.pi) % (2 * math.pi)) - math.pi


class PendulumEnv(Environment):
    """Inverted pendulum with semi-implicit Euler integration."""

    state_dim = 2
    action_dim = 1
    reward_bound = REWARD_BOUND

    def dynamics(self, state: np.ndarray, action: np.ndarray) -> tuple[np.ndarray, float, bool]:
        th, thdot = float(state[0]), float(state[1])
        u = min(max(float(action[0]), -MAX_TORQUE), MAX_TORQUE)

        cost = angle_normalize(th) ** 2 + 0.1 * thdot**2 + 0.001 * u**2

        new_thdot = thdot + (3 * GRAVITY / (2 * LENGTH) * math.sin(th) + 3.0 / (MASS * LENGTH**2) * u) * DT
        new_thdot = min(max(new_thdot, -MAX_SPEED), MAX_SPEED)
        new_th = angle_normalize(th + new_thdot * DT)

        return np.array([new_th, new_thdot]), -cost, False

    def sample_initial_state(self, rng: np.random.Generator) -> np.ndarray:
        return np.array([rng.uniform(-math.pi, math.pi), rng.uniform(-1.0, 1.0)])


def pendulum_step(
    env_state: EnvState,
    torque: float,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> tuple[EnvState, float, bool]:
    """
    One Pendulum step.

    Returns:
        ``(next_state, reward, done)``; done only at the step cap

    Raises:
        NonFiniteInputError: If the state contains NaN
    """
    result: StepResult = PendulumEnv(max_steps).transition(env_state, np.array([torque]))
    return result.next, result.reward, result.done
