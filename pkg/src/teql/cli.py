"""
Command-line interface.

    teql train       one (variant, seed) cell
    teql experiment  every cell of an experiment, plus aggregates
    teql regret      regret traces on a synthetic MDP
    teql report      recompute aggregates of an existing bundle

Exit status is 0 on success, 1 if any cell diverged or failed and 2 on
configuration or input errors.
"""

import argparse
import asyncio
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from teql import __version__
from teql.config import settings
from teql.errors import TeqlError
from teql.harness.experiment import derive_seed, run_experiment
from teql.harness.results import report, write_rewards
from teql.harness.training import run_training
from teql.logging import logger, setup_logging
from teql.metrics import setup_metrics
from teql.schemas.run import load_run_config

EXIT_OK = 0
EXIT_CELL_FAILURE = 1
EXIT_ERROR = 2


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, default=None, help="YAML run configuration")
    p.add_argument("--output-dir", type=Path, default=None, help="Result directory")
    p.add_argument("--seed", type=int, default=None, help="Master seed (default: TEQL_MASTER_SEED)")
    p.add_argument("--environment", choices=["pendulum", "cartpole"], default=None)
    p.add_argument("--episodes", type=int, default=None, help="Episodes per seed")
    p.add_argument("--max-steps", type=int, default=None, help="Step cap per episode")
    p.add_argument("--rank", type=int, default=None, help="CP rank")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="teql",
        description="Low-rank tensor Q-learning with error-uncertainty exploration.",
    )
    parser.add_argument("--version", action="version", version=f"teql {__version__}")
    parser.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        default=None,
    )
    parser.add_argument("--log-format", choices=["json", "text"], default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="Train one cell")
    _add_common(train)
    train.add_argument("--variant", default="teql", help="Variant label used for the seed and files")
    train.add_argument("--seed-index", type=int, default=0)
    train.add_argument("--resume", action="store_true", help="Continue from the saved checkpoint")

    experiment = sub.add_parser("experiment", help="Run a full variant x seed grid")
    _add_common(experiment)
    experiment.add_argument(
        "--kind",
        choices=["teql_vs_tlr", "ablation_penalty", "granularity_sweep", "regret"],
        default=None,
        help="Experiment kind",
    )
    experiment.add_argument("--seeds", type=int, default=None, help="Seeds per variant")
    experiment.add_argument("--workers", type=int, default=None, help="Worker processes")
    experiment.add_argument("--dry-run", action="store_true", help="Write the manifest only")
    experiment.add_argument("--resume", action="store_true", help="Resume checkpointed cells")

    regret = sub.add_parser("regret", help="Regret study on a synthetic MDP")
    _add_common(regret)
    regret.add_argument("--seeds", type=int, default=None, help="Number of seeds")
    regret.add_argument("--steps", type=int, default=None, help="Steps per seed")
    regret.add_argument("--workers", type=int, default=None, help="Worker processes")
    regret.add_argument("--dry-run", action="store_true", help="Write the manifest only")

    rep = sub.add_parser("report", help="Recompute aggregates of a result bundle")
    rep.add_argument("bundle", type=Path, help="Bundle directory")
    return parser


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    overrides: dict[str, Any] = {
        "environment": args.environment,
        "episodes": args.episodes,
        "max_steps": args.max_steps,
        "rank": args.rank,
        "output_dir": args.output_dir,
        "seeds": getattr(args, "seeds", None),
        "experiment": getattr(args, "kind", None),
    }
    if args.command == "regret":
        overrides["experiment"] = "regret"
        if args.steps is not None:
            overrides["regret"] = {"steps": args.steps}
    return overrides


def _train(args: argparse.Namespace) -> int:
    cfg = load_run_config(args.config, _overrides(args))
    master_seed = settings.master_seed if args.seed is None else args.seed
    output_dir = cfg.output_dir or settings.output_dir
    output_dir.mkdir(parents=True, exist_ok=True)
    seed = derive_seed(master_seed, args.variant, args.seed_index)

    result = run_training(
        cfg,
        seed,
        variant=args.variant,
        seed_index=args.seed_index,
        checkpoint_dir=output_dir / "checkpoint",
        resume=args.resume,
    )
    write_rewards(output_dir, result)
    logger.info(
        "training_completed",
        variant=args.variant,
        seed=seed,
        episodes=result.episodes,
        steps=result.steps,
        visited_pairs=result.visited_pairs,
        thresholds=result.thresholds,
        diverged=result.diverged,
    )
    return EXIT_CELL_FAILURE if result.diverged else EXIT_OK


def _experiment(args: argparse.Namespace) -> int:
    cfg = load_run_config(args.config, _overrides(args))
    manifest = asyncio.run(
        run_experiment(
            cfg,
            workers=args.workers,
            master_seed=args.seed,
            dry_run=args.dry_run,
            resume=getattr(args, "resume", False),
        )
    )
    return EXIT_CELL_FAILURE if manifest.failed else EXIT_OK


def _report(args: argparse.Namespace) -> int:
    report(args.bundle)
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point of the ``teql`` console script."""
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level, args.log_format)
    setup_metrics()

    handlers = {
        "train": _train,
        "experiment": _experiment,
        "regret": _experiment,
        "report": _report,
    }
    try:
        return handlers[args.command](args)
    except TeqlError as e:
        logger.error("command_failed", command=args.command, **e.to_dict())
        if settings.debug:
            raise
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
