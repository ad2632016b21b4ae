"""Tagged diagnostics on standard error.

Every module asks for its own logger; records render as ``[GRAPH] message``
so the output reads like the bracketed traces the app always printed.
"""

import logging
import sys

ROOT_LOGGER = 'cbcchaos'


class TagFormatter(logging.Formatter):
    """Render ``cbcchaos.graph`` as ``[GRAPH]``."""

    def format(self, record: logging.LogRecord) -> str:
        tag = record.name.rsplit('.', 1)[-1].upper()
        message = record.getMessage()
        if record.levelno >= logging.WARNING:
            return f"[{tag}] {record.levelname}: {message}"
        return f"[{tag}] {message}"


def get_logger(name: str) -> logging.Logger:
    """Get the logger for a module tag, e.g. ``get_logger('graph')``."""
    return logging.getLogger(f"{ROOT_LOGGER}.{name}")


def configure_logging(verbose: bool = False) -> logging.Logger:
    """
    Install the stderr handler on the package root logger (idempotent).

    Args:
        verbose: Emit DEBUG records when True, WARNING and above otherwise.

    Returns:
        The package root logger.
    """
    root = logging.getLogger(ROOT_LOGGER)
    handler = next((h for h in root.handlers if getattr(h, '_cbcchaos', False)), None)
    if handler is None:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(TagFormatter())
        handler._cbcchaos = True
        root.addHandler(handler)
        root.propagate = False
    else:
        # follow a redirected sys.stderr
        handler.setStream(sys.stderr)
    root.setLevel(logging.DEBUG if verbose else logging.WARNING)
    return root
