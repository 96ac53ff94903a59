#!/usr/bin/env python3
"""
Optospring - Logging Setup
structlog configuration shared by the CLI and the test suite.
"""

import logging
import os
import sys

import structlog

DEBUG_ENV = "OPTOSPRING_DEBUG"


def debug_requested() -> bool:
    return os.environ.get(DEBUG_ENV, "false").lower() in ("1", "true", "yes", "on")


def configure_logging(debug: bool = False, verbose: bool = False) -> None:
    """Console logs on stderr; stdout stays reserved for command output.

    WARNING by default, INFO with verbose, DEBUG with debug or OPTOSPRING_DEBUG.
    """
    if debug or debug_requested():
        level = logging.DEBUG
    elif verbose:
        level = logging.INFO
    else:
        level = logging.WARNING

    structlog.configure(
        processors=[
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso", utc=True),
            structlog.dev.ConsoleRenderer(colors=False),
        ],
        wrapper_class=structlog.make_filtering_bound_logger(level),
        logger_factory=_stderr_logger,
        cache_logger_on_first_use=False,
    )


def _stderr_logger(*args) -> structlog.PrintLogger:
    # sys.stderr is looked up per call so a swapped or closed stream is never kept
    return structlog.PrintLogger(file=sys.stderr)
