"""
Single-seed training loop.

Initializes the CP model and tables, then for every episode: reset the
environment, and until the episode ends select an action, step the
environment, apply one ``bcd_update`` and advance the state.
"""

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from teql.core.discretization import DiscretizationSpec, action_vector, discretize_state
from teql.core.tensor import CpModel, init_model
from teql.envs.base import Environment
from teql.envs.registry import get_preset
from teql.errors import CheckpointError, DivergedUpdateError
from teql.harness.statistics import initial_level, smooth, threshold_row
from teql.learner.tables import StatTables
from teql.learner.update import Transition, bcd_update
from teql.logging import logger
from teql.policy.selection import select_action
from teql.schemas.results import RunResult
from teql.schemas.run import RunConfig

MODEL_FILE = "model.json"
TABLES_FILE = "tables.txt"
STATE_FILE = "state.json"
STATE_FORMAT = "teql-training"

# Fields that may change between an interrupted run and its resumption
_RESUMABLE_FIELDS = {"output_dir", "checkpoint_every"}


def config_digest(cfg: RunConfig) -> str:
    """sha256 over the resolved config, ignoring output location and checkpoint period."""
    payload = cfg.resolved().model_dump(mode="json", exclude=_RESUMABLE_FIELDS)
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


@dataclass
class TrainingState:
    """Everything needed to continue a run at an episode boundary."""

    model: CpModel
    tables: StatTables
    episode: int
    t: int
    rewards: list[float]
    env_rng: np.random.Generator
    policy_rng: np.random.Generator

    def save(self, directory: Path, digest: str, seed: int) -> None:
        directory.mkdir(parents=True, exist_ok=True)
        self.model.save(directory / MODEL_FILE)
        self.tables.dump(directory / TABLES_FILE)
        state: dict[str, Any] = {
            "format": STATE_FORMAT,
            "version": 1,
            "config_digest": digest,
            "seed": seed,
            "episode": self.episode,
            "t": self.t,
            "rewards": self.rewards,
            "env_rng": self.env_rng.bit_generator.state,
            "policy_rng": self.policy_rng.bit_generator.state,
        }
        (directory / STATE_FILE).write_text(json.dumps(state))

    @classmethod
    def load(cls, directory: Path, digest: str, seed: int) -> "TrainingState":
        """
        Restore a checkpoint.

        Raises:
            CheckpointError: If files are missing, corrupt or belong to another run
        """
        try:
            state = json.loads((directory / STATE_FILE).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise CheckpointError(f"Cannot read training state in {directory}: {e}") from e
        if state.get("format") != STATE_FORMAT:
            raise CheckpointError("Unrecognized training state format", path=str(directory))
        if state.get("config_digest") != digest or state.get("seed") != seed:
            raise CheckpointError(
                "Checkpoint was written by a different configuration or seed",
                path=str(directory),
                seed=seed,
                checkpoint_seed=state.get("seed"),
            )

        env_rng, policy_rng = np.random.default_rng(), np.random.default_rng()
        try:
            env_rng.bit_generator.state = state["env_rng"]
            policy_rng.bit_generator.state = state["policy_rng"]
            return cls(
                model=CpModel.load(directory / MODEL_FILE),
                tables=StatTables.load(directory / TABLES_FILE),
                episode=int(state["episode"]),
                t=int(state["t"]),
                rewards=[float(r) for r in state["rewards"]],
                env_rng=env_rng,
                policy_rng=policy_rng,
            )
        except (KeyError, TypeError, ValueError) as e:
            raise CheckpointError(f"Corrupt training state: {e}", path=str(directory)) from e


def fresh_state(cfg: RunConfig, seed: int) -> TrainingState:
    """Initial model, empty tables and per-purpose random streams for ``seed``."""
    spec = cfg.spec()
    init_seq, env_seq, policy_seq = np.random.SeedSequence(seed).spawn(3)
    model = init_model(
        spec.dims,
        cfg.rank,
        int(init_seq.generate_state(1)[0]),
        scale=cfg.factor_scale(),
        n_state_dims=spec.n_state_dims,
    )
    return TrainingState(
        model=model,
        tables=StatTables(spec.n_state_dims),
        episode=0,
        t=0,
        rewards=[],
        env_rng=np.random.default_rng(env_seq),
        policy_rng=np.random.default_rng(policy_seq),
    )


def run_training(
    cfg: RunConfig,
    seed: int,
    *,
    variant: str = "teql",
    seed_index: int = 0,
    checkpoint_dir: Path | None = None,
    resume: bool = False,
    stop_after: int | None = None,
) -> RunResult:
    """
    Train one seed.

    Args:
        cfg: Run configuration (resolved here)
        seed: Cell seed; fixes initialization, resets and exploration
        variant: Variant name recorded in the result
        seed_index: Seed position recorded in the result
        checkpoint_dir: Directory for checkpoints; the final state is always
            written there when given
        resume: Continue from the checkpoint in ``checkpoint_dir`` if present
        stop_after: Stop after this many episodes in this call (the result
            is then partial)

    Returns:
        Reward series and statistics; on divergence the series so far with
        ``diverged`` set

    Raises:
        CheckpointError: If resuming from an incompatible checkpoint
    """
    cfg = cfg.resolved()
    digest = config_digest(cfg)
    spec = cfg.spec()
    preset = get_preset(cfg.environment)
    env = preset.make(cfg.max_steps)

    if resume and checkpoint_dir is not None and (checkpoint_dir / STATE_FILE).exists():
        state = TrainingState.load(checkpoint_dir, digest, seed)
        logger.info("training_resumed", variant=variant, seed=seed, episode=state.episode)
    else:
        state = fresh_state(cfg, seed)

    last_episode = cfg.episodes
    if stop_after is not None:
        last_episode = min(cfg.episodes, state.episode + stop_after)

    divergence: dict[str, Any] | None = None
    try:
        while state.episode < last_episode:
            state.rewards.append(_run_episode(cfg, spec, env, state))
            state.episode += 1
            logger.debug(
                "episode_completed",
                variant=variant,
                seed=seed,
                episode=state.episode,
                reward=state.rewards[-1],
            )
            if (
                checkpoint_dir is not None
                and cfg.checkpoint_every
                and state.episode % cfg.checkpoint_every == 0
            ):
                state.save(checkpoint_dir, digest, seed)
    except DivergedUpdateError as e:
        divergence = {**e.to_dict(), "episode": state.episode + 1}
        logger.error("update_diverged", variant=variant, seed=seed, **divergence)
    else:
        if checkpoint_dir is not None:
            state.save(checkpoint_dir, digest, seed)

    smoothed = smooth(state.rewards, cfg.smoothing_window)
    thresholds: dict[str, int | None] = {}
    if state.rewards and divergence is None:
        thresholds = threshold_row(
            state.rewards,
            window=cfg.smoothing_window,
            floor=initial_level(smoothed, cfg.smoothing_window),
        )
    return RunResult(
        variant=variant,
        seed_index=seed_index,
        seed=seed,
        rewards=state.rewards,
        smoothed=smoothed.tolist(),
        thresholds=thresholds,
        steps=state.t,
        visited_pairs=len(state.tables),
        diverged=divergence is not None,
        divergence=divergence,
    )


def _run_episode(
    cfg: RunConfig,
    spec: DiscretizationSpec,
    env: Environment,
    state: TrainingState,
) -> float:
    s_idx = discretize_state(env.reset(state.env_rng), spec)
    total = 0.0
    while True:
        a_idx = select_action(
            state.model,
            state.tables,
            s_idx,
            cfg.policy,
            rng=state.policy_rng,
            episode=state.episode,
        )
        result = env.step(action_vector(a_idx, spec))
        next_idx = discretize_state(result.state, spec)
        state.t += 1
        transition = Transition(
            state=s_idx,
            action=a_idx,
            reward=result.reward,
            next_state=next_idx,
            terminal=result.terminated,
        )
        bcd_update(state.model, transition, state.tables, cfg.learner, state.t)
        total += result.reward
        if result.done:
            return total
        s_idx = next_idx
