"""
Prometheus metrics configuration.

Counters are updated by the experiment runner from cell outcomes and
exported into every result bundle as ``metrics.prom``.
"""

from pathlib import Path

from prometheus_client import Counter, Histogram, Info, generate_latest

from teql import __version__

# Application info
app_info = Info("teql_app", "Application information")

cells_total = Counter(
    "teql_cells_total",
    "Variant x seed cells executed",
    ["experiment", "status"],
)

episodes_total = Counter(
    "teql_episodes_total",
    "Training episodes completed",
    ["variant"],
)

env_steps_total = Counter(
    "teql_env_steps_total",
    "Environment transitions processed",
    ["variant"],
)

cell_duration_seconds = Histogram(
    "teql_cell_duration_seconds",
    "Wall time of one variant x seed cell in seconds",
    ["experiment"],
    buckets=(0.1, 1.0, 5.0, 15.0, 30.0, 60.0, 120.0, 300.0, 600.0, 1800.0),
)


def setup_metrics() -> None:
    """Initialize application info."""
    app_info.info(
        {
            "version": __version__,
            "name": "teql",
        }
    )


def generate_metrics() -> bytes:
    """
    Generate Prometheus metrics output.

    Returns:
        Metrics in Prometheus text format
    """
    return generate_latest()


def write_metrics(path: Path) -> None:
    """Write the current metrics snapshot to ``path``."""
    path.write_bytes(generate_metrics())
