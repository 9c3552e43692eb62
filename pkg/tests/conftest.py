"""Shared fixtures."""

from pathlib import Path

import numpy as np
import pytest

from teql.core.tensor import CpModel, init_model
from teql.learner.tables import StatTables
from teql.schemas.learner import LearnerConfig
from teql.schemas.run import RunConfig


def pytest_collection_modifyitems(items: list[pytest.Item]) -> None:
    """Mark everything under tests/unit as ``unit``."""
    for item in items:
        if "unit" in Path(str(item.fspath)).parts:
            item.add_marker(pytest.mark.unit)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def small_model() -> CpModel:
    """Rank-3 model over a (4, 5) state grid and 3 actions."""
    return init_model((4, 5, 3), rank=3, seed=7, scale=1.0, n_state_dims=2)


@pytest.fixture
def two_action_model() -> CpModel:
    """Rank-2 model with two action dimensions (2 x 3 action grid)."""
    return init_model((3, 2, 3), rank=2, seed=11, scale=1.0, n_state_dims=1)


@pytest.fixture
def tables() -> StatTables:
    return StatTables(n_state_dims=2)


@pytest.fixture
def learner_cfg() -> LearnerConfig:
    """Resolved learner config without penalty or clipping."""
    return LearnerConfig(penalty_weight=0.0, q_clip=None)


@pytest.fixture
def tiny_run() -> RunConfig:
    """CartPole run small enough for unit tests."""
    return RunConfig(
        environment="cartpole",
        episodes=6,
        max_steps=20,
        seeds=2,
        rank=3,
        smoothing_window=3,
        discretization={"state_bins": [3, 3, 4, 4], "action_bins": [3]},
    )


@pytest.fixture
def tiny_pendulum_run() -> RunConfig:
    return RunConfig(
        environment="pendulum",
        episodes=4,
        max_steps=15,
        seeds=2,
        rank=2,
        smoothing_window=2,
        discretization={"state_bins": [5, 5], "action_bins": [3]},
    )
