"""
Learning-curve statistics: smoothing, asymptotes, episodes-to-threshold
and percentile bands across seeds.
"""

import math
from collections.abc import Sequence

import numpy as np

from teql.errors import SeriesLengthMismatchError
from teql.schemas.results import THRESHOLD_FRACTIONS, AggregateResult, RunResult

DEFAULT_WINDOW = 50
ASYMPTOTE_FRACTION = 0.1
PERCENTILE_METHOD = "linear"


def smooth(series: Sequence[float] | np.ndarray, window: int = DEFAULT_WINDOW) -> np.ndarray:
    """
    Trailing mean over the last ``window`` episodes.

    The first ``window - 1`` entries average over the episodes seen so far.
    """
    if window < 1:
        raise ValueError(f"window must be positive, got {window}")
    values = np.asarray(series, dtype=np.float64)
    csum = np.concatenate(([0.0], np.cumsum(values)))
    ends = np.arange(1, len(values) + 1)
    starts = np.maximum(ends - window, 0)
    return (csum[ends] - csum[starts]) / (ends - starts)


def asymptotic_level(smoothed: Sequence[float] | np.ndarray) -> float:
    """Mean smoothed reward over the final 10% of episodes (at least one)."""
    values = np.asarray(smoothed, dtype=np.float64)
    if values.size == 0:
        raise ValueError("series must not be empty")
    tail = max(1, math.ceil(ASYMPTOTE_FRACTION * values.size))
    return float(values[-tail:].mean())


def initial_level(smoothed: Sequence[float] | np.ndarray, window: int = DEFAULT_WINDOW) -> float:
    """Smoothed reward at the first full window (the last value for shorter series)."""
    values = np.asarray(smoothed, dtype=np.float64)
    if values.size == 0:
        raise ValueError("series must not be empty")
    return float(values[min(window, values.size) - 1])


def episodes_to_threshold(
    series: Sequence[float] | np.ndarray,
    fraction: float,
    *,
    window: int = DEFAULT_WINDOW,
    reference: float | None = None,
    floor: float = 0.0,
) -> int | None:
    """
    First episode whose smoothed reward reaches a fraction of the asymptote.

    The level is ``floor + fraction * (reference - floor)``; ``reference``
    defaults to the series' own asymptotic level. Only episodes with a full
    smoothing window are considered (all of them for series shorter than
    the window).

    Args:
        series: Per-episode total rewards
        fraction: Target fraction in ``(0, 1]``
        window: Smoothing window
        reference: Shared asymptote, e.g. the best variant's median
        floor: Zero point of the fraction, usually the untrained level

    Returns:
        1-based episode number, or None if the level is never reached
    """
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must lie in (0, 1], got {fraction}")
    if len(series) == 0:
        raise ValueError("series must not be empty")
    smoothed = smooth(series, window)
    ref = asymptotic_level(smoothed) if reference is None else reference
    level = floor + fraction * (ref - floor)

    start = min(window, len(smoothed)) - 1
    hits = np.flatnonzero(smoothed[start:] >= level)
    if hits.size == 0:
        return None
    return int(hits[0]) + start + 1


def threshold_row(
    series: Sequence[float] | np.ndarray,
    *,
    window: int = DEFAULT_WINDOW,
    reference: float | None = None,
    floor: float = 0.0,
) -> dict[str, int | None]:
    """Episodes to 80/90/95% keyed by column name."""
    return {
        column: episodes_to_threshold(
            series, fraction, window=window, reference=reference, floor=floor
        )
        for column, fraction in THRESHOLD_FRACTIONS.items()
    }


def median_threshold(values: Sequence[int | None]) -> float | None:
    """Median episode count with never-reached seeds ranked last."""
    if not values:
        return None
    median = float(np.median([math.inf if v is None else float(v) for v in values]))
    return None if math.isinf(median) or math.isnan(median) else median


def percentile_bands(series: Sequence[Sequence[float]] | np.ndarray) -> np.ndarray:
    """
    Per-episode 25th/50th/75th percentiles across seeds.

    Returns:
        ``(3, episodes)`` array of p25, p50, p75

    Raises:
        SeriesLengthMismatchError: If the series differ in length
    """
    lengths = {len(s) for s in series}
    if len(lengths) > 1:
        raise SeriesLengthMismatchError(
            "All series must have the same length",
            lengths=sorted(lengths),
        )
    stacked = np.asarray(series, dtype=np.float64)
    return np.percentile(stacked, [25, 50, 75], axis=0, method=PERCENTILE_METHOD)


def median_asymptote(results: Sequence[RunResult]) -> float:
    """Median over seeds of each seed's asymptotic smoothed reward."""
    return float(np.median([asymptotic_level(r.smoothed) for r in results]))


def median_initial_level(results: Sequence[RunResult], window: int = DEFAULT_WINDOW) -> float:
    """Median over seeds of each seed's smoothed reward at the first full window."""
    return float(np.median([initial_level(r.smoothed, window) for r in results]))


def aggregate_seeds(
    results: Sequence[RunResult],
    *,
    window: int = DEFAULT_WINDOW,
    reference: float | None = None,
    floor: float = 0.0,
) -> AggregateResult:
    """
    Percentile bands of the smoothed curves and the threshold distribution.

    Results are ordered by ``seed_index`` first, so the output does not
    depend on the input order.

    Raises:
        ValueError: If fewer than two results or more than one variant are given
        SeriesLengthMismatchError: If the reward series differ in length
    """
    if len(results) < 2:
        raise ValueError(f"At least two seeds are required, got {len(results)}")
    variants = {r.variant for r in results}
    if len(variants) != 1:
        raise ValueError(f"Results mix variants: {sorted(variants)}")

    ordered = sorted(results, key=lambda r: r.seed_index)
    p25, p50, p75 = percentile_bands([r.smoothed for r in ordered])
    thresholds = {
        r.seed_index: threshold_row(r.rewards, window=window, reference=reference, floor=floor)
        for r in ordered
    }
    medians = {
        column: median_threshold([row[column] for row in thresholds.values()])
        for column in THRESHOLD_FRACTIONS
    }
    return AggregateResult(
        variant=ordered[0].variant,
        p25=p25.tolist(),
        p50=p50.tolist(),
        p75=p75.tolist(),
        thresholds=thresholds,
        median_thresholds=medians,
        median_asymptote=median_asymptote(ordered),
    )
