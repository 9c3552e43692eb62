"""
Action selection over the discrete action grid.

All selectors return a 1-based action index tuple and break ties toward
the lexicographically smallest action.
"""

import numpy as np

from teql.core.tensor import CpModel, IndexTuple
from teql.learner.tables import StatTables
from teql.schemas.policy import PolicyConfig


def visit_bonus(tables: StatTables, state_idx: IndexTuple, actions: list[IndexTuple]) -> np.ndarray:
    """
    UCB term ``sqrt(log N_total(s) / (N(s, a) + 1))`` per action.

    Zero for every action while ``N_total(s) <= 1``.
    """
    n_total = tables.total_visits(state_idx)
    if n_total <= 1:
        return np.zeros(len(actions))
    counts = tables.action_counts(state_idx, actions)
    return np.sqrt(np.log(n_total) / (counts + 1.0))


def eu_values(
    model: CpModel,
    tables: StatTables,
    state_idx: IndexTuple,
    exploration: float,
) -> np.ndarray:
    """Error-uncertainty score ``Q + c (Q_error + bonus)`` for every grid action."""
    actions = model.action_grid
    q = model.action_values(state_idx)
    errors = tables.action_errors(state_idx, actions)
    return q + exploration * (errors + visit_bonus(tables, state_idx, actions))


def ucb_values(
    model: CpModel,
    tables: StatTables,
    state_idx: IndexTuple,
    exploration: float,
) -> np.ndarray:
    """Plain UCB score ``Q + c * bonus`` without the error term."""
    actions = model.action_grid
    return model.action_values(state_idx) + exploration * visit_bonus(tables, state_idx, actions)


def euge_select(
    model: CpModel,
    tables: StatTables,
    state_idx: IndexTuple,
    cfg: PolicyConfig,
) -> IndexTuple:
    """Action maximizing the error-uncertainty score."""
    values = eu_values(model, tables, state_idx, cfg.exploration)
    return model.action_grid[int(np.argmax(values))]


def ucb_select(
    model: CpModel,
    tables: StatTables,
    state_idx: IndexTuple,
    cfg: PolicyConfig,
) -> IndexTuple:
    values = ucb_values(model, tables, state_idx, cfg.exploration)
    return model.action_grid[int(np.argmax(values))]


def greedy_select(model: CpModel, state_idx: IndexTuple) -> IndexTuple:
    return model.action_grid[int(np.argmax(model.action_values(state_idx)))]


def epsilon_greedy_select(
    model: CpModel,
    state_idx: IndexTuple,
    epsilon: float,
    rng: np.random.Generator,
) -> IndexTuple:
    """
    Uniformly random grid action with probability ``epsilon``, greedy otherwise.

    One uniform draw is consumed per call; a second one picks the random
    action when exploring.

    Raises:
        ValueError: If ``epsilon`` is outside ``[0, 1]``
    """
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
    if rng.random() < epsilon:
        actions = model.action_grid
        return actions[int(rng.integers(len(actions)))]
    return greedy_select(model, state_idx)


def select_action(
    model: CpModel,
    tables: StatTables,
    state_idx: IndexTuple,
    cfg: PolicyConfig,
    *,
    rng: np.random.Generator,
    episode: int = 0,
) -> IndexTuple:
    """
    Dispatch on ``cfg.kind``.

    Args:
        model: Current Q model
        tables: Visit/error tables
        state_idx: Discrete state
        cfg: Policy settings with ``epsilon_initial`` resolved
        rng: Policy random stream (used by epsilon-greedy only)
        episode: 0-based episode, drives the epsilon schedule
    """
    match cfg.kind:
        case "euge":
            return euge_select(model, tables, state_idx, cfg)
        case "ucb":
            return ucb_select(model, tables, state_idx, cfg)
        case "epsilon_greedy":
            return epsilon_greedy_select(model, state_idx, cfg.epsilon_at(episode), rng)
        case "greedy":
            return greedy_select(model, state_idx)
    raise ValueError(f"Unknown policy kind: {cfg.kind}")
