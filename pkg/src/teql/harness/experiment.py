"""
Multi-seed experiment orchestration.

An experiment expands a ``RunConfig`` into variants, runs every
(variant, seed) cell on a bounded executor, and writes a result bundle.
Cells share no state; aggregation runs in the parent after all cells
have finished.
"""

import asyncio
import csv
import hashlib
import platform
import time
from collections.abc import Callable
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass
from datetime import UTC, datetime
from pathlib import Path
from typing import Any, TypeVar

import numpy as np

from teql import __version__
from teql.config import settings
from teql.envs.registry import GRANULARITY_ORDER
from teql.envs.synthetic import generate_mdp, synthetic_q_star
from teql.errors import ConfigurationError, DivergedUpdateError, TeqlError
from teql.harness.results import write_aggregates, write_manifest, write_rewards
from teql.harness.statistics import ASYMPTOTE_FRACTION, PERCENTILE_METHOD
from teql.harness.training import run_training
from teql.logging import logger, setup_logging, worker_logging_args
from teql.metrics import (
    cell_duration_seconds,
    cells_total,
    env_steps_total,
    episodes_total,
    write_metrics,
)
from teql.oracle.regret import RegretTrace, run_regret_experiment
from teql.schemas.results import CellOutcome, Manifest, RunResult, StatisticsMetadata
from teql.schemas.run import RunConfig

T = TypeVar("T")

CHECKPOINT_DIR = "checkpoints"
REGRET_SUMMARY_FILE = "regret_summary.csv"


@dataclass(frozen=True)
class Variant:
    """Named, fully resolved configuration."""

    name: str
    config: RunConfig


@dataclass(frozen=True)
class CellTask:
    """One (variant, seed) unit of work; picklable for process pools."""

    variant: str
    seed_index: int
    seed: int
    config: RunConfig
    checkpoint_dir: Path | None = None
    resume: bool = False


def derive_seed(master_seed: int, variant: str, seed_index: int) -> int:
    """
    Cell seed from sha256 of ``master_seed:variant:seed_index``.

    Adding or removing variants never changes the seeds of other cells.
    """
    key = f"{master_seed}:{variant}:{seed_index}".encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "big") >> 1


def _teql(cfg: RunConfig, **extra: Any) -> RunConfig:
    return cfg.with_overrides({"policy": {"kind": "euge"}, **extra})


def _tlr(cfg: RunConfig, **extra: Any) -> RunConfig:
    return cfg.with_overrides(
        {"policy": {"kind": "epsilon_greedy"}, "learner": {"penalty_weight": 0.0}, **extra}
    )


def build_variants(cfg: RunConfig) -> list[Variant]:
    """
    Variants of an experiment kind.

    - ``teql_vs_tlr``: ``teql`` (EUGE, penalty) and ``tlr`` (epsilon-greedy, no penalty)
    - ``ablation_penalty``: ``penalty`` and ``no_penalty``, both EUGE
    - ``granularity_sweep``: ``teql_<granularity>`` per preset, plus
      ``tlr_<granularity>`` when ``include_baseline`` is set
    - ``regret``: a single ``teql`` variant

    Raises:
        ConfigurationError: If the ablation is configured without a penalty
    """
    match cfg.experiment:
        case "teql_vs_tlr":
            variants = [Variant("teql", _teql(cfg)), Variant("tlr", _tlr(cfg))]
        case "ablation_penalty":
            if cfg.learner.penalty_weight == 0:
                raise ConfigurationError("ablation_penalty needs a non-zero penalty_weight")
            no_penalty = _teql(cfg, learner={"penalty_weight": 0.0})
            variants = [Variant("penalty", _teql(cfg)), Variant("no_penalty", no_penalty)]
        case "granularity_sweep":
            variants = []
            for name in GRANULARITY_ORDER:
                grid = {
                    "discretization": {"granularity": name, "state_bins": None, "action_bins": None}
                }
                variants.append(Variant(f"teql_{name}", _teql(cfg, **grid)))
                if cfg.include_baseline:
                    variants.append(Variant(f"tlr_{name}", _tlr(cfg, **grid)))
        case "regret":
            variants = [Variant("teql", cfg)]
    return [Variant(v.name, v.config.resolved()) for v in variants]


def run_cell(task: CellTask) -> tuple[CellOutcome, RunResult | None]:
    """Train one cell and summarize it for the manifest."""
    started = time.perf_counter()
    try:
        result = run_training(
            task.config,
            task.seed,
            variant=task.variant,
            seed_index=task.seed_index,
            checkpoint_dir=task.checkpoint_dir,
            resume=task.resume,
        )
    except TeqlError as e:
        logger.error(
            "cell_failed",
            variant=task.variant,
            seed_index=task.seed_index,
            error=e.detail,
        )
        outcome = CellOutcome(
            variant=task.variant,
            seed_index=task.seed_index,
            seed=task.seed,
            status="failed",
            duration_seconds=time.perf_counter() - started,
            error=e.to_dict(),
        )
        return outcome, None

    outcome = CellOutcome(
        variant=task.variant,
        seed_index=task.seed_index,
        seed=task.seed,
        status="diverged" if result.diverged else "completed",
        duration_seconds=time.perf_counter() - started,
        episodes=result.episodes,
        steps=result.steps,
        error=result.divergence,
    )
    logger.info(
        "cell_completed",
        variant=task.variant,
        seed_index=task.seed_index,
        status=outcome.status,
        episodes=outcome.episodes,
        duration_seconds=round(outcome.duration_seconds, 3),
    )
    return outcome, result


def _executor(workers: int) -> Executor:
    if workers == 1:
        return ThreadPoolExecutor(max_workers=1)
    return ProcessPoolExecutor(
        max_workers=workers,
        initializer=setup_logging,
        initargs=worker_logging_args(),
    )


async def _map_cells(fn: Callable[[Any], T], tasks: list[Any], workers: int) -> list[T]:
    loop = asyncio.get_running_loop()
    with _executor(workers) as executor:
        futures = [loop.run_in_executor(executor, fn, task) for task in tasks]
        return list(await asyncio.gather(*futures))


def _record_metrics(experiment: str, outcome: CellOutcome) -> None:
    cells_total.labels(experiment=experiment, status=outcome.status).inc()
    episodes_total.labels(variant=outcome.variant).inc(outcome.episodes)
    env_steps_total.labels(variant=outcome.variant).inc(outcome.steps)
    cell_duration_seconds.labels(experiment=experiment).observe(outcome.duration_seconds)


def _new_manifest(
    cfg: RunConfig,
    variants: list[Variant],
    *,
    master_seed: int,
    workers: int,
    dry_run: bool,
) -> Manifest:
    return Manifest(
        experiment=cfg.experiment,
        environment=cfg.environment,
        dry_run=dry_run,
        started_at=datetime.now(UTC),
        versions={
            "teql": __version__,
            "numpy": np.__version__,
            "python": platform.python_version(),
        },
        settings={"workers": workers, "master_seed": master_seed},
        config=cfg.resolved().model_dump(mode="json"),
        variants={v.name: v.config.model_dump(mode="json") for v in variants},
    )


def _finish(manifest: Manifest, output_dir: Path, started: float) -> Manifest:
    manifest.finished_at = datetime.now(UTC)
    manifest.wall_time_seconds = time.perf_counter() - started
    manifest.divergence_log = [
        {"variant": c.variant, "seed_index": c.seed_index, "seed": c.seed, **(c.error or {})}
        for c in manifest.cells
        if c.status == "diverged"
    ]
    write_manifest(output_dir, manifest)
    write_metrics(output_dir / "metrics.prom")
    logger.info(
        "experiment_completed",
        experiment=manifest.experiment,
        output_dir=str(output_dir),
        cells=len(manifest.cells),
        diverged=len(manifest.divergence_log),
        wall_time_seconds=round(manifest.wall_time_seconds, 3),
    )
    return manifest


async def run_experiment(
    cfg: RunConfig,
    *,
    output_dir: Path | None = None,
    workers: int | None = None,
    master_seed: int | None = None,
    dry_run: bool = False,
    resume: bool = False,
) -> Manifest:
    """
    Run every (variant, seed) cell of ``cfg`` and write the result bundle.

    Args:
        cfg: Run configuration
        output_dir: Bundle directory (default: ``cfg.output_dir`` or settings)
        workers: Executor size (default: settings)
        master_seed: Seed all cell seeds derive from (default: settings)
        dry_run: Write the manifest only; no training steps run
        resume: Continue cells from their checkpoints when present

    Returns:
        The manifest written to ``output_dir``
    """
    output_dir = output_dir or cfg.output_dir or settings.output_dir
    workers = workers or settings.workers
    master_seed = settings.master_seed if master_seed is None else master_seed
    output_dir.mkdir(parents=True, exist_ok=True)

    if cfg.experiment == "regret":
        return await run_regret_study(
            cfg,
            output_dir=output_dir,
            workers=workers,
            master_seed=master_seed,
            dry_run=dry_run,
        )

    started = time.perf_counter()
    variants = build_variants(cfg)
    manifest = _new_manifest(
        cfg, variants, master_seed=master_seed, workers=workers, dry_run=dry_run
    )
    statistics = StatisticsMetadata(
        smoothing_window=cfg.smoothing_window,
        asymptote_fraction=ASYMPTOTE_FRACTION,
        percentile_method=PERCENTILE_METHOD,
    )
    manifest.statistics = statistics

    tasks = [
        CellTask(
            variant=v.name,
            seed_index=i,
            seed=derive_seed(master_seed, v.name, i),
            config=v.config,
            checkpoint_dir=(
                output_dir / CHECKPOINT_DIR / f"{v.name}_{i}" if cfg.checkpoint_every else None
            ),
            resume=resume,
        )
        for v in variants
        for i in range(cfg.seeds)
    ]
    logger.info(
        "experiment_started",
        experiment=cfg.experiment,
        environment=cfg.environment,
        variants=[v.name for v in variants],
        cells=len(tasks),
        workers=workers,
        dry_run=dry_run,
    )

    if dry_run:
        manifest.cells = [
            CellOutcome(variant=t.variant, seed_index=t.seed_index, seed=t.seed, status="skipped")
            for t in tasks
        ]
        return _finish(manifest, output_dir, started)

    cells = await _map_cells(run_cell, tasks, workers)

    completed: list[RunResult] = []
    for outcome, result in cells:
        _record_metrics(cfg.experiment, outcome)
        manifest.cells.append(outcome)
        if result is None:
            continue
        write_rewards(output_dir, result)
        if not result.diverged:
            completed.append(result)

    _, reference, floor = write_aggregates(output_dir, completed, window=cfg.smoothing_window)
    statistics.threshold_reference = reference
    statistics.threshold_floor = floor
    return _finish(manifest, output_dir, started)


@dataclass(frozen=True)
class RegretTask:
    """One seed of the synthetic-MDP regret study."""

    seed_index: int
    seed: int
    config: RunConfig


def run_regret_cell(task: RegretTask) -> tuple[CellOutcome, RegretTrace | None]:
    """Run one regret seed on the MDP described by ``task.config.regret``."""
    cfg = task.config
    started = time.perf_counter()
    mdp = generate_mdp(
        cfg.regret.n_states,
        cfg.regret.n_actions,
        cfg.learner.discount,
        cfg.regret.mdp_seed,
    )
    try:
        trace = run_regret_experiment(
            mdp,
            cfg.learner,
            cfg.policy,
            cfg.regret.steps,
            task.seed,
            rank=cfg.rank,
            init_scale=cfg.factor_scale(),
            restart_every=cfg.regret.restart_every,
            q_star=synthetic_q_star(mdp),
        )
    except TeqlError as e:
        status = "diverged" if isinstance(e, DivergedUpdateError) else "failed"
        logger.error("cell_failed", variant="teql", seed_index=task.seed_index, error=e.detail)
        outcome = CellOutcome(
            variant="teql",
            seed_index=task.seed_index,
            seed=task.seed,
            status=status,
            duration_seconds=time.perf_counter() - started,
            error=e.to_dict(),
        )
        return outcome, None

    outcome = CellOutcome(
        variant="teql",
        seed_index=task.seed_index,
        seed=task.seed,
        status="completed",
        duration_seconds=time.perf_counter() - started,
        steps=trace.steps,
    )
    logger.info(
        "cell_completed",
        variant="teql",
        seed_index=task.seed_index,
        status=outcome.status,
        steps=trace.steps,
    )
    return outcome, trace


async def run_regret_study(
    cfg: RunConfig,
    *,
    output_dir: Path,
    workers: int,
    master_seed: int,
    dry_run: bool = False,
) -> Manifest:
    """
    Regret traces for ``cfg.seeds`` seeds on one synthetic MDP.

    Writes ``regret_<seed_index>.csv``, ``regret_window_<seed_index>.csv`` and
    ``regret_summary.csv`` (first- vs second-half mean regret per seed).
    """
    started = time.perf_counter()
    cfg = cfg.model_copy(update={"experiment": "regret"})
    variants = build_variants(cfg)
    resolved = variants[0].config
    manifest = _new_manifest(
        cfg, variants, master_seed=master_seed, workers=workers, dry_run=dry_run
    )
    tasks = [
        RegretTask(seed_index=i, seed=derive_seed(master_seed, "teql", i), config=resolved)
        for i in range(cfg.seeds)
    ]
    logger.info(
        "experiment_started",
        experiment="regret",
        n_states=cfg.regret.n_states,
        n_actions=cfg.regret.n_actions,
        steps=cfg.regret.steps,
        cells=len(tasks),
        dry_run=dry_run,
    )
    if dry_run:
        manifest.cells = [
            CellOutcome(variant="teql", seed_index=t.seed_index, seed=t.seed, status="skipped")
            for t in tasks
        ]
        return _finish(manifest, output_dir, started)

    cells = await _map_cells(run_regret_cell, tasks, workers)

    summary_path = output_dir / REGRET_SUMMARY_FILE
    with summary_path.open("w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(
            ["seed", "first_half_mean", "second_half_mean", "cumulative_regret", "decreased"]
        )
        for outcome, trace in cells:
            _record_metrics("regret", outcome)
            manifest.cells.append(outcome)
            if trace is None:
                continue
            trace.to_csv(output_dir / f"regret_{outcome.seed_index}.csv")
            trace.window_to_csv(
                output_dir / f"regret_window_{outcome.seed_index}.csv", cfg.regret.window
            )
            first, second = trace.half_means()
            writer.writerow(
                [
                    outcome.seed_index,
                    repr(first),
                    repr(second),
                    repr(float(trace.cumulative[-1])),
                    int(second < first),
                ]
            )
    return _finish(manifest, output_dir, started)
