"""
Result bundle files.

A bundle directory holds ``manifest.json``, ``metrics.prom`` and the CSVs:

- ``rewards_<variant>_<seed_index>.csv``: episode, total_reward, smoothed_reward
- ``aggregate_<variant>.csv``: episode, p25, p50, p75
- ``thresholds_<variant>.csv``: seed, frac80, frac90, frac95

Floats are written with ``repr`` so re-reading a file reproduces the
values exactly.
"""

import csv
import re
from pathlib import Path

from pydantic import ValidationError

from teql.errors import ConfigurationError
from teql.harness.statistics import aggregate_seeds, median_asymptote, median_initial_level, smooth
from teql.logging import logger
from teql.schemas.results import THRESHOLD_FRACTIONS, AggregateResult, Manifest, RunResult

MANIFEST_FILE = "manifest.json"
METRICS_FILE = "metrics.prom"

_REWARDS_PATTERN = re.compile(r"^rewards_(?P<variant>.+)_(?P<seed_index>\d+)\.csv$")


def _fmt(value: float) -> str:
    return repr(float(value))


def rewards_path(directory: Path, variant: str, seed_index: int) -> Path:
    return directory / f"rewards_{variant}_{seed_index}.csv"


def write_rewards(directory: Path, result: RunResult) -> Path:
    """Write the per-episode reward series of one cell."""
    path = rewards_path(directory, result.variant, result.seed_index)
    with path.open("w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["episode", "total_reward", "smoothed_reward"])
        for episode, (reward, smoothed) in enumerate(
            zip(result.rewards, result.smoothed, strict=True), start=1
        ):
            writer.writerow([episode, _fmt(reward), _fmt(smoothed)])
    return path


def read_rewards(path: Path) -> list[float]:
    """Total reward column of a rewards CSV."""
    with path.open(newline="") as f:
        return [float(row["total_reward"]) for row in csv.DictReader(f)]


def write_aggregate(directory: Path, aggregate: AggregateResult) -> Path:
    path = directory / f"aggregate_{aggregate.variant}.csv"
    with path.open("w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["episode", "p25", "p50", "p75"])
        for episode, (p25, p50, p75) in enumerate(
            zip(aggregate.p25, aggregate.p50, aggregate.p75, strict=True), start=1
        ):
            writer.writerow([episode, _fmt(p25), _fmt(p50), _fmt(p75)])
    return path


def write_thresholds(directory: Path, aggregate: AggregateResult) -> Path:
    """Write episodes-to-threshold per seed; never-reached cells are empty."""
    path = directory / f"thresholds_{aggregate.variant}.csv"
    columns = list(THRESHOLD_FRACTIONS)
    with path.open("w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["seed", *columns])
        for seed_index in sorted(aggregate.thresholds):
            row = aggregate.thresholds[seed_index]
            writer.writerow([seed_index, *("" if row[c] is None else row[c] for c in columns)])
    return path


def write_manifest(directory: Path, manifest: Manifest) -> Path:
    path = directory / MANIFEST_FILE
    path.write_text(manifest.model_dump_json(indent=2) + "\n")
    return path


def read_manifest(directory: Path) -> Manifest:
    """
    Load ``manifest.json`` from a bundle.

    Raises:
        ConfigurationError: If the manifest is missing or invalid
    """
    path = directory / MANIFEST_FILE
    try:
        return Manifest.model_validate_json(path.read_text())
    except OSError as e:
        raise ConfigurationError(f"No manifest in {directory}: {e}", path=str(path)) from e
    except ValidationError as e:
        raise ConfigurationError(f"Invalid manifest: {e.error_count()} error(s)", path=str(path)) from e


def write_aggregates(
    directory: Path,
    results: list[RunResult],
    *,
    window: int,
    floor: float | None = None,
) -> tuple[dict[str, AggregateResult], float | None, float | None]:
    """
    Aggregate completed cells per variant and write the aggregate CSVs.

    Thresholds are measured from ``floor`` to the best variant's median
    asymptote. Without an explicit floor the lowest median initial level
    (smoothed reward at the first full window) across variants is used, so
    every variant's progress is counted from a common untrained level.
    Variants with fewer than two completed seeds are skipped.

    Returns:
        Aggregates by variant, the shared reference level and the floor
    """
    by_variant: dict[str, list[RunResult]] = {}
    for result in results:
        by_variant.setdefault(result.variant, []).append(result)

    eligible = {v: rs for v, rs in by_variant.items() if len(rs) >= 2}
    for variant in sorted(set(by_variant) - set(eligible)):
        logger.warning("aggregate_skipped", variant=variant, seeds=len(by_variant[variant]))
    if not eligible:
        return {}, None, floor

    reference = max(median_asymptote(rs) for rs in eligible.values())
    if floor is None:
        floor = min(median_initial_level(rs, window) for rs in eligible.values())
    aggregates: dict[str, AggregateResult] = {}
    for variant in sorted(eligible):
        aggregate = aggregate_seeds(eligible[variant], window=window, reference=reference, floor=floor)
        write_aggregate(directory, aggregate)
        write_thresholds(directory, aggregate)
        aggregates[variant] = aggregate
    return aggregates, reference, floor


def report(directory: Path) -> dict[str, AggregateResult]:
    """
    Recompute aggregate and threshold CSVs from the rewards CSVs of a bundle.

    Only cells the manifest records as completed are included, so the
    rewritten files match those of the original run.

    Raises:
        ConfigurationError: If the manifest is missing or has no statistics
    """
    manifest = read_manifest(directory)
    if manifest.statistics is None:
        raise ConfigurationError("Manifest has no statistics section", path=str(directory))
    window = manifest.statistics.smoothing_window
    completed = {(c.variant, c.seed_index): c for c in manifest.cells if c.status == "completed"}

    results: list[RunResult] = []
    for path in sorted(directory.glob("rewards_*.csv")):
        match = _REWARDS_PATTERN.match(path.name)
        if match is None:
            continue
        key = (match["variant"], int(match["seed_index"]))
        cell = completed.get(key)
        if cell is None:
            continue
        rewards = read_rewards(path)
        results.append(
            RunResult(
                variant=cell.variant,
                seed_index=cell.seed_index,
                seed=cell.seed,
                rewards=rewards,
                smoothed=smooth(rewards, window).tolist(),
            )
        )

    aggregates, reference, floor = write_aggregates(
        directory,
        results,
        window=window,
        floor=manifest.statistics.threshold_floor,
    )
    logger.info(
        "report_completed",
        bundle=str(directory),
        variants=sorted(aggregates),
        cells=len(results),
        threshold_reference=reference,
        threshold_floor=floor,
    )
    return aggregates
