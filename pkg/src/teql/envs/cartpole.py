"""
CartPole balancing with a continuous force.

Constants follow the standard classic-control implementation. The action
``a`` in ``[-1, 1]`` applies force ``F = 10 a`` N. Surviving steps pay +1;
the failing step pays 0 and terminates.
"""

import math
from typing import Literal

import numpy as np

from teql.envs.base import DEFAULT_MAX_STEPS, EnvState, Environment, StepResult

GRAVITY = 9.8
MASS_CART = 1.0
MASS_POLE = 0.1
TOTAL_MASS = MASS_CART + MASS_POLE
HALF_LENGTH = 0.5
POLE_MASS_LENGTH = MASS_POLE * HALF_LENGTH
FORCE_MAG = 10.0
TAU = 0.02
THETA_THRESHOLD = 12 * 2 * math.pi / 360
X_THRESHOLD = 2.4

PHYSICS = {
    "gravity": GRAVITY,
    "mass_cart": MASS_CART,
    "mass_pole": MASS_POLE,
    "half_length": HALF_LENGTH,
    "force_mag": FORCE_MAG,
    "tau": TAU,
    "theta_threshold_radians": THETA_THRESHOLD,
    "x_threshold": X_THRESHOLD,
}


class CartPoleEnv(Environment):
    """Cart-pole with state ``(x, x_dot, theta, theta_dot)``."""

    state_dim = 4
    action_dim = 1
    reward_bound = 1.0

    def __init__(
        self,
        max_steps: int = DEFAULT_MAX_STEPS,
        integrator: Literal["euler", "semi-implicit"] = "euler",
    ) -> None:
        super().__init__(max_steps)
        self.integrator = integrator

    def dynamics(self, state: np.ndarray, action: np.ndarray) -> tuple[np.ndarray, float, bool]:
        x, x_dot, theta, theta_dot = (float(v) for v in state)
        force = FORCE_MAG * min(max(float(action[0]), -1.0), 1.0)

        costheta = math.cos(theta)
        sintheta = math.sin(theta)
        temp = (force + POLE_MASS_LENGTH * theta_dot**2 * sintheta) / TOTAL_MASS
        thetaacc = (GRAVITY * sintheta - costheta * temp) / (
            HALF_LENGTH * (4.0 / 3.0 - MASS_POLE * costheta**2 / TOTAL_MASS)
        )
        xacc = temp - POLE_MASS_LENGTH * thetaacc * costheta / TOTAL_MASS

        if self.integrator == "euler":
            x = x + TAU * x_dot
            x_dot = x_dot + TAU * xacc
            theta = theta + TAU * theta_dot
            theta_dot = theta_dot + TAU * thetaacc
        else:
            x_dot = x_dot + TAU * xacc
            x = x + TAU * x_dot
            theta_dot = theta_dot + TAU * thetaacc
            theta = theta + TAU * theta_dot

        failed = x < -X_THRESHOLD or x > X_THRESHOLD or theta < -THETA_THRESHOLD or theta > THETA_THRESHOLD
        return np.array([x, x_dot, theta, theta_dot]), 0.0 if failed else 1.0, failed

    def sample_initial_state(self, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(-0.05, 0.05, size=4)


def cartpole_step(
    env_state: EnvState,
    a: float,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> tuple[EnvState, float, bool]:
    """
    One CartPole step.

    Returns:
        ``(next_state, reward, done)``; done on failure or at the step cap

    Raises:
        NonFiniteInputError: If the state contains NaN
    """
    result: StepResult = CartPoleEnv(max_steps).transition(env_state, np.array([a]))
    return result.next, result.reward, result.done
