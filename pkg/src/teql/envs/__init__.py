"""Pendulum, CartPole and synthetic tabular environments."""

from teql.envs.base import EnvState, Environment, StepResult
from teql.envs.cartpole import CartPoleEnv, cartpole_step
from teql.envs.pendulum import PendulumEnv, pendulum_step
from teql.envs.synthetic import SyntheticMdp, generate_mdp, synthetic_q_star

__all__ = [
    "CartPoleEnv",
    "EnvState",
    "Environment",
    "PendulumEnv",
    "StepResult",
    "SyntheticMdp",
    "cartpole_step",
    "generate_mdp",
    "pendulum_step",
    "synthetic_q_star",
]
