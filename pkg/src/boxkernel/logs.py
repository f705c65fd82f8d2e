"""Logging setup for the boxkernel logger hierarchy."""

import logging
import os

from rich.console import Console
from rich.logging import RichHandler

ENV_LOG_LEVEL = "BOXKERNEL_LOG"

_LEVELS = {
    "debug": logging.DEBUG,
    "info": logging.INFO,
    "warning": logging.WARNING,
    "error": logging.ERROR,
}


def resolve_level(verbose: bool = False) -> int:
    """Level from ``BOXKERNEL_LOG``; ``verbose`` raises it to at least INFO.

    Unknown values fall back to WARNING.
    """
    name = os.getenv(ENV_LOG_LEVEL, "warning").strip().lower()
    level = _LEVELS.get(name, logging.WARNING)
    if verbose:
        level = min(level, logging.INFO)
    return level


def configure_logging(verbose: bool = False) -> logging.Logger:
    """Attach a single stderr RichHandler to the ``boxkernel`` logger."""
    logger = logging.getLogger("boxkernel")
    logger.setLevel(resolve_level(verbose))
    for handler in list(logger.handlers):
        if getattr(handler, "_boxkernel", False):
            logger.removeHandler(handler)
    handler = RichHandler(
        console=Console(stderr=True, legacy_windows=False),
        show_path=False,
        rich_tracebacks=False,
    )
    handler._boxkernel = True
    handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
    logger.addHandler(handler)
    return logger
