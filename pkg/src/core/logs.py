"""Logging setup for the command-line entry point."""
import logging

from rich.console import Console
from rich.logging import RichHandler

LOG_FORMAT = "%(name)s: %(message)s"


def configure_logging(level: str = "WARNING", verbosity: int = 0) -> None:
    """Route log records to stderr through rich.

    ``verbosity`` comes from repeated ``-v`` flags and can only raise the level.
    """
    resolved = getattr(logging, level.upper(), logging.WARNING)
    if verbosity >= 2:
        resolved = min(resolved, logging.DEBUG)
    elif verbosity == 1:
        resolved = min(resolved, logging.INFO)

    handler = RichHandler(
        console=Console(stderr=True),
        show_path=False,
        rich_tracebacks=False,
    )
    root = logging.getLogger()
    for existing in list(root.handlers):
        if isinstance(existing, RichHandler):
            root.removeHandler(existing)
    root.addHandler(handler)
    root.setLevel(resolved)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
