"""
Exception hierarchy.

Every error raised by the package derives from ``TeqlError`` and carries
structured context that the harness copies into the run manifest.
"""

from typing import Any


class TeqlError(Exception):
    """Base class for all package errors."""

    def __init__(self, detail: str, **context: Any) -> None:
        """
        Initialize error.

        Args:
            detail: Human readable description
            **context: Structured fields describing the failure
        """
        super().__init__(detail)
        self.detail = detail
        self.context = context

    def to_dict(self) -> dict[str, Any]:
        """Convert to a JSON-serializable dictionary."""
        return {
            "error": type(self).__name__,
            "detail": self.detail,
            **{key: _jsonable(value) for key, value in self.context.items()},
        }


class ConfigurationError(TeqlError):
    """Run configuration file is missing or invalid."""


class IndexOutOfRangeError(TeqlError):
    """Index tuple component outside ``[1, d_n]``."""


class DimensionMismatchError(TeqlError):
    """Vector length does not match the expected number of dimensions."""


class NonFiniteInputError(TeqlError):
    """NaN or infinite value where a finite real is required."""


class DivergedUpdateError(TeqlError):
    """Q-value became non-finite after a factor update."""


class InvalidMdpError(TeqlError):
    """Transition kernel is not stochastic or the discount is out of range."""


class DenseSizeError(TeqlError):
    """Dense reconstruction requested for a tensor above the size cap."""


class SeriesLengthMismatchError(TeqlError):
    """Per-seed series passed to aggregation differ in length."""


class CheckpointError(TeqlError):
    """Checkpoint is unreadable or incompatible with the run configuration."""


def _jsonable(value: Any) -> Any:
    if isinstance(value, tuple):
        return [_jsonable(v) for v in value]
    if isinstance(value, float | int | str | bool) or value is None:
        return value
    if isinstance(value, list):
        return [_jsonable(v) for v in value]
    return str(value)
