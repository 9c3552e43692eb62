"""
Unit tests for action selection.
"""

from collections import Counter

import numpy as np
import pytest

from teql.core.tensor import CpModel, init_model
from teql.learner.tables import StatTables
from teql.oracle.dense import dense_reconstruct
from teql.policy.selection import (
    epsilon_greedy_select,
    eu_values,
    euge_select,
    greedy_select,
    select_action,
    ucb_select,
    visit_bonus,
)
from teql.schemas.policy import PolicyConfig


@pytest.fixture
def flat_model() -> CpModel:
    """Model whose Q is 1.0 for every pair (one state dim, four actions)."""
    return CpModel([np.ones((3, 1)), np.ones((4, 1))], n_state_dims=1)


@pytest.fixture
def flat_tables() -> StatTables:
    return StatTables(n_state_dims=1)


class TestVisitBonus:
    """Test the count-based exploration term."""

    def test_zero_until_second_visit(self, flat_tables: StatTables) -> None:
        """Test that the bonus is zero while N_total(s) <= 1."""
        actions = [(1,), (2,)]
        assert visit_bonus(flat_tables, (1,), actions).tolist() == [0.0, 0.0]
        flat_tables.record((1, 1), 0.0)
        assert visit_bonus(flat_tables, (1,), actions).tolist() == [0.0, 0.0]

    def test_formula(self, flat_tables: StatTables) -> None:
        """Test sqrt(log N_total / (N + 1))."""
        for _ in range(3):
            flat_tables.record((1, 1), 0.0)
        flat_tables.record((1, 2), 0.0)
        bonus = visit_bonus(flat_tables, (1,), [(1,), (2,), (3,)])
        assert bonus == pytest.approx(np.sqrt(np.log(4) / np.array([4.0, 2.0, 1.0])))

    def test_rarely_tried_actions_score_higher(self, flat_tables: StatTables) -> None:
        """Test monotonicity in N(s, a)."""
        for a, times in ((1, 5), (2, 2), (3, 1)):
            for _ in range(times):
                flat_tables.record((2, a), 0.0)
        bonus = visit_bonus(flat_tables, (2,), [(1,), (2,), (3,), (4,)])
        assert bonus[0] < bonus[1] < bonus[2] < bonus[3]


class TestEuValuesReference:
    """Compare scores against a direct computation from dense Q."""

    def test_random_instances(self) -> None:
        """Test 10^4 (state, action) scores to 1e-12."""
        rng = np.random.default_rng(77)
        checked = 0
        for case in range(100):
            model = init_model((5, 4, 5), rank=3, seed=case, scale=1.0, n_state_dims=2)
            dense = dense_reconstruct(model)
            tables = StatTables(n_state_dims=2)
            for _ in range(int(rng.integers(0, 60))):
                idx = tuple(int(rng.integers(1, d + 1)) for d in (5, 4, 5))
                tables.record(idx, float(rng.uniform(0, 2)))
            c = float(rng.uniform(0, 3))
            for s1 in range(1, 6):
                for s2 in range(1, 5):
                    scores = eu_values(model, tables, (s1, s2), c)
                    n_total = tables.total_visits((s1, s2))
                    for a in range(1, 6):
                        idx = (s1, s2, a)
                        bonus = 0.0
                        if n_total > 1:
                            bonus = float(np.sqrt(np.log(n_total) / (tables.visit_count(idx) + 1)))
                        expected = dense[s1 - 1, s2 - 1, a - 1] + c * (tables.error(idx) + bonus)
                        assert abs(scores[a - 1] - expected) <= 1e-12
                        checked += 1
        assert checked >= 10_000


class TestEugeSelect:
    """Test the error-uncertainty rule."""

    def test_prefers_larger_decomposition_error(self, flat_model: CpModel, flat_tables: StatTables) -> None:
        """Test that equal Q and equal counts break toward the larger error."""
        flat_tables.record((1, 1), 0.1)
        flat_tables.record((1, 2), 0.4)
        flat_tables.record((1, 3), 0.2)
        flat_tables.record((1, 4), 0.3)
        assert euge_select(flat_model, flat_tables, (1,), PolicyConfig(exploration=1.0)) == (2,)

    def test_prefers_untried_action(self, flat_model: CpModel, flat_tables: StatTables) -> None:
        """Test that the visit bonus favours the unvisited action when errors are zero."""
        for a in (1, 2, 4):
            flat_tables.record((1, a), 0.0)
        assert euge_select(flat_model, flat_tables, (1,), PolicyConfig(exploration=1.0)) == (3,)

    def test_zero_exploration_is_greedy(self, small_model: CpModel, tables: StatTables) -> None:
        """Test that c = 0 reduces to greedy selection."""
        tables.record((1, 1, 1), 5.0)
        tables.record((1, 1, 2), 0.0)
        cfg = PolicyConfig(exploration=0.0)
        for s in ((1, 1), (2, 3), (4, 5)):
            assert euge_select(small_model, tables, s, cfg) == greedy_select(small_model, s)

    def test_ties_go_to_first_action(self, flat_model: CpModel, flat_tables: StatTables) -> None:
        """Test lowest-index tie break on a flat model."""
        assert euge_select(flat_model, flat_tables, (3,), PolicyConfig()) == (1,)

    def test_score_formula(self, small_model: CpModel, tables: StatTables) -> None:
        """Test Q + c (Q_error + bonus) against a manual computation."""
        tables.record((1, 1, 2), 0.3)
        tables.record((1, 1, 2), 0.2)
        tables.record((1, 1, 3), 0.5)
        q = small_model.action_values((1, 1))
        bonus = np.sqrt(np.log(3) / np.array([1.0, 3.0, 2.0]))
        expected = q + 2.0 * (np.array([0.0, 0.2, 0.5]) + bonus)
        assert eu_values(small_model, tables, (1, 1), 2.0) == pytest.approx(expected)

    def test_multi_dimensional_action(self, two_action_model: CpModel) -> None:
        """Test that selection returns a full action tuple."""
        action = euge_select(two_action_model, StatTables(n_state_dims=1), (2,), PolicyConfig())
        assert action in two_action_model.action_grid
        assert len(action) == 2


class TestUcbSelect:
    """Test the plain UCB baseline rule."""

    def test_ignores_decomposition_error(self, flat_model: CpModel, flat_tables: StatTables) -> None:
        """Test that errors do not affect the score."""
        flat_tables.record((1, 1), 0.0)
        flat_tables.record((1, 2), 9.0)
        flat_tables.record((1, 3), 0.0)
        flat_tables.record((1, 4), 0.0)
        assert ucb_select(flat_model, flat_tables, (1,), PolicyConfig(kind="ucb")) == (1,)


class TestEpsilonGreedy:
    """Test epsilon-greedy selection."""

    def test_zero_epsilon_is_greedy(self, small_model: CpModel, rng: np.random.Generator) -> None:
        """Test that epsilon 0 never explores."""
        greedy = greedy_select(small_model, (2, 2))
        assert all(epsilon_greedy_select(small_model, (2, 2), 0.0, rng) == greedy for _ in range(50))

    def test_one_epsilon_is_uniform(self, rng: np.random.Generator) -> None:
        """Test that epsilon 1 covers every action."""
        model = init_model((2, 5), rank=1, seed=0)
        counts = Counter(epsilon_greedy_select(model, (1,), 1.0, rng) for _ in range(2000))
        assert set(counts) == {(a,) for a in range(1, 6)}
        assert all(300 <= n <= 500 for n in counts.values())

    @pytest.mark.parametrize("epsilon", [-0.1, 1.5])
    def test_rejects_out_of_range(self, small_model: CpModel, rng: np.random.Generator, epsilon: float) -> None:
        """Test epsilon validation."""
        with pytest.raises(ValueError):
            epsilon_greedy_select(small_model, (1, 1), epsilon, rng)

    def test_schedule(self) -> None:
        """Test eps_0 * decay**episode."""
        cfg = PolicyConfig(kind="epsilon_greedy", epsilon_initial=1.0, epsilon_decay=0.5)
        assert cfg.epsilon_at(0) == 1.0
        assert cfg.epsilon_at(3) == 0.125


class TestSelectAction:
    """Test dispatch on the configured kind."""

    @pytest.mark.parametrize("kind", ["euge", "ucb", "greedy"])
    def test_deterministic_kinds_leave_rng_untouched(
        self, small_model: CpModel, tables: StatTables, kind: str
    ) -> None:
        """Test that only epsilon-greedy consumes policy randomness."""
        rng = np.random.default_rng(5)
        select_action(small_model, tables, (3, 4), PolicyConfig(kind=kind), rng=rng)
        assert rng.random() == np.random.default_rng(5).random()

    def test_epsilon_greedy_dispatch(self, small_model: CpModel, tables: StatTables) -> None:
        """Test that the episode drives the epsilon schedule."""
        cfg = PolicyConfig(kind="epsilon_greedy", epsilon_initial=1.0, epsilon_decay=1e-9)
        rng = np.random.default_rng(0)
        picks = {select_action(small_model, tables, (1, 1), cfg, rng=rng, episode=1) for _ in range(20)}
        assert picks == {greedy_select(small_model, (1, 1))}
