"""
Empirical regret of the tensor learner on a synthetic MDP.

Each step contributes ``V*(s_t) - Q*(s_t, a_t)`` with ``Q*`` from value
iteration. Interaction is continuing; every ``restart_every`` steps the
state is redrawn uniformly before the next action is chosen.
"""

import csv
from collections.abc import Callable
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from teql.core.tensor import init_model, unit_product_scale
from teql.envs.synthetic import SyntheticMdp, synthetic_q_star
from teql.learner.tables import StatTables
from teql.learner.update import Transition, bcd_update
from teql.logging import logger
from teql.policy.selection import select_action
from teql.schemas.learner import LearnerConfig
from teql.schemas.policy import PolicyConfig

#: Fixed behaviour ``(state, rng) -> action`` (0-based) replacing the learned policy
Actor = Callable[[int, np.random.Generator], int]


@dataclass(frozen=True)
class RegretTrace:
    """Per-step regret of one run."""

    instantaneous: np.ndarray
    states: np.ndarray
    actions: np.ndarray

    @property
    def steps(self) -> int:
        return len(self.instantaneous)

    @property
    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.instantaneous)

    def windowed(self, window: int) -> np.ndarray:
        """Trailing mean of instantaneous regret over ``window`` steps."""
        if window < 1:
            raise ValueError(f"window must be positive, got {window}")
        csum = np.concatenate(([0.0], self.cumulative))
        ends = np.arange(1, self.steps + 1)
        starts = np.maximum(ends - window, 0)
        return (csum[ends] - csum[starts]) / (ends - starts)

    def half_means(self) -> tuple[float, float]:
        """Mean per-step regret over the first and second half of the run."""
        half = self.steps // 2
        return float(self.instantaneous[:half].mean()), float(self.instantaneous[half:].mean())

    def to_csv(self, path: Path) -> None:
        """Write ``step, instantaneous_regret, cumulative_regret`` (1-based steps)."""
        with path.open("w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["step", "instantaneous_regret", "cumulative_regret"])
            for step, (inst, cum) in enumerate(
                zip(self.instantaneous, self.cumulative, strict=True), start=1
            ):
                writer.writerow([step, repr(float(inst)), repr(float(cum))])

    def window_to_csv(self, path: Path, window: int) -> None:
        """Write ``step, windowed_regret``."""
        with path.open("w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["step", "windowed_regret"])
            for step, value in enumerate(self.windowed(window), start=1):
                writer.writerow([step, repr(float(value))])


def run_regret_experiment(
    mdp: SyntheticMdp,
    learner: LearnerConfig,
    policy: PolicyConfig,
    steps: int,
    seed: int,
    *,
    rank: int = 10,
    init_scale: float | None = None,
    restart_every: int = 200,
    q_star: np.ndarray | None = None,
    actor: Actor | None = None,
) -> RegretTrace:
    """
    Run the tensor learner on ``mdp`` for ``steps`` steps and record regret.

    States and actions map to a two-mode tensor of shape ``(S, A)``.

    Args:
        mdp: Synthetic MDP
        learner: Learner config; ``auto`` values resolve against this run
        policy: Policy config (``epsilon_initial`` None counts as 0)
        steps: Interaction steps T
        seed: Seed for initialization, transitions and exploration
        rank: CP rank
        init_scale: Factor initialization half-width (default
            ``unit_product_scale(2, rank)``)
        restart_every: Restart period in steps
        q_star: Precomputed optimal Q (computed when omitted)
        actor: Fixed behaviour to evaluate instead of the learned policy;
            the learner still updates from its transitions

    Raises:
        DivergedUpdateError: If the learner diverges
    """
    if steps < 1:
        raise ValueError(f"steps must be positive, got {steps}")
    q_star = synthetic_q_star(mdp) if q_star is None else q_star
    v_star = q_star.max(axis=1)
    cfg = learner.resolved(rank * 2, steps, mdp.reward_bound)

    init_seq, env_seq, policy_seq = np.random.SeedSequence(seed).spawn(3)
    env_rng = np.random.default_rng(env_seq)
    policy_rng = np.random.default_rng(policy_seq)
    model = init_model(
        (mdp.n_states, mdp.n_actions),
        rank,
        int(init_seq.generate_state(1)[0]),
        scale=unit_product_scale(2, rank) if init_scale is None else init_scale,
        n_state_dims=1,
    )
    tables = StatTables(n_state_dims=1)

    regret = np.empty(steps)
    states = np.empty(steps, dtype=np.int64)
    actions = np.empty(steps, dtype=np.int64)
    state = int(env_rng.integers(mdp.n_states))
    for step in range(steps):
        if step > 0 and step % restart_every == 0:
            state = int(env_rng.integers(mdp.n_states))
        if actor is None:
            (action_idx,) = select_action(model, tables, (state + 1,), policy, rng=policy_rng)
            action = action_idx - 1
        else:
            action = actor(state, policy_rng)

        regret[step] = v_star[state] - q_star[state, action]
        states[step], actions[step] = state, action

        next_state, reward = mdp.step(state, action, env_rng)
        transition = Transition(
            state=(state + 1,),
            action=(action + 1,),
            reward=reward,
            next_state=(next_state + 1,),
        )
        bcd_update(model, transition, tables, cfg, step + 1)
        state = next_state

    trace = RegretTrace(instantaneous=regret, states=states, actions=actions)
    first, second = trace.half_means()
    logger.debug(
        "regret_run_completed",
        seed=seed,
        steps=steps,
        cumulative_regret=float(trace.cumulative[-1]),
        first_half_mean=first,
        second_half_mean=second,
    )
    return trace
