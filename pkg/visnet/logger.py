"""
Logging helpers
Library modules only ask for loggers; the CLI decides where records go.
"""

import logging
import sys

ROOT_LOGGER = "visnet"
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def get_logger(name: str) -> logging.Logger:
    """Return the `visnet.<name>` logger (module names are accepted as-is)."""
    if name == ROOT_LOGGER or name.startswith(ROOT_LOGGER + "."):
        return logging.getLogger(name)
    return logging.getLogger(f"{ROOT_LOGGER}.{name}")


def configure_logging(level: str | int = "WARNING") -> logging.Logger:
    """Attach a single stderr handler to the package logger."""
    root = logging.getLogger(ROOT_LOGGER)
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = logging.WARNING
    root.setLevel(level)

    for handler in list(root.handlers):
        if getattr(handler, "_visnet", False):
            root.removeHandler(handler)

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    handler._visnet = True  # type: ignore[attr-defined]
    root.addHandler(handler)
    root.propagate = False
    return root


logging.getLogger(ROOT_LOGGER).addHandler(logging.NullHandler())
