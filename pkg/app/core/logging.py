"""
Logging setup

Results go to stdout; diagnostics go to stderr through the standard logging
module so JSON and CSV output stays machine-readable.
"""
import logging
import sys
from typing import Optional

from app.core.config import settings


LOG_FORMAT = "%(asctime)s %(levelname)-7s %(name)s: %(message)s"

_configured = False


def configure_logging(level: Optional[str] = None) -> None:
    """
    Install a single stderr handler on the root logger

    Args:
        level: explicit level name; defaults to settings.LOG_LEVEL, or DEBUG
            when settings.DEBUG is on
    """
    global _configured

    if level is None:
        level = "DEBUG" if settings.DEBUG else settings.LOG_LEVEL

    root = logging.getLogger()
    if not _configured:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        root.addHandler(handler)
        _configured = True
    root.setLevel(level.upper())
