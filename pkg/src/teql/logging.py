"""
Structured logging configuration.

Events go through structlog to stdout, rendered as JSON lines or as
console output. Worker processes of an experiment call ``setup_logging``
again through ``worker_logging_args`` so every cell logs the same way.
"""

import logging
import sys
from typing import Any

import numpy as np
import structlog
from structlog.typing import EventDict, WrappedLogger

from teql.config import settings

_active: tuple[str, str] = (settings.log_level, settings.log_format)


def _plain(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, tuple | list):
        return [_plain(v) for v in value]
    return value


def plain_values(_: WrappedLogger, __: str, event_dict: EventDict) -> EventDict:
    """Replace numpy scalars and arrays in an event with builtin values."""
    return {key: _plain(value) for key, value in event_dict.items()}


def setup_logging(
    level: str | None = None,
    log_format: str | None = None,
) -> structlog.BoundLogger:
    """
    Configure structlog and the stdlib root logger.

    Args:
        level: Override for ``settings.log_level``
        log_format: Override for ``settings.log_format``

    Returns:
        The ``teql`` logger
    """
    global _active
    level = (level or settings.log_level).upper()
    log_format = log_format or settings.log_format
    _active = (level, log_format)

    renderer: list[Any]
    if log_format == "json":
        renderer = [structlog.processors.format_exc_info, structlog.processors.JSONRenderer()]
    else:
        renderer = [
            structlog.dev.set_exc_info,
            structlog.dev.ConsoleRenderer(colors=sys.stdout.isatty()),
        ]

    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.stdlib.add_log_level,
            structlog.stdlib.add_logger_name,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            plain_values,
            *renderer,
        ],
        wrapper_class=structlog.stdlib.BoundLogger,
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        # CLI runs and tests reconfigure after import
        cache_logger_on_first_use=False,
    )
    logging.basicConfig(format="%(message)s", stream=sys.stdout, level=getattr(logging, level), force=True)
    return structlog.get_logger("teql")


def worker_logging_args() -> tuple[str, str]:
    """``initargs`` for ``setup_logging`` in a freshly spawned worker process."""
    return _active


logger = setup_logging()
