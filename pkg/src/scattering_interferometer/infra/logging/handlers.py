from __future__ import annotations

import logging
import sys
from pathlib import Path

from .formatters import HumanReadableFormatter, JSONFormatter


def _configured(handler: logging.Handler, level: int, formatter: logging.Formatter) -> logging.Handler:
    handler.setLevel(level)
    handler.setFormatter(formatter)
    return handler


def build_json_file_handler(path: Path, level: int = logging.INFO) -> logging.Handler:
    """JSON Lines file handler for one run.

    The file is truncated: a run id encodes config hash and seed, so a rerun
    replaces the log of the identical earlier run.

    Args:
        path: Log file (``<run_id>.jsonl``); missing parent directories are created
        level: Minimum level written

    Returns:
        FileHandler with the JSON formatter attached
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    return _configured(logging.FileHandler(path, mode="w", encoding="utf-8"), level, JSONFormatter())


def build_human_console_handler(level: int = logging.INFO) -> logging.Handler:
    """Console handler for progress messages.

    Args:
        level: Minimum level shown

    Returns:
        StreamHandler on stderr with the human-readable formatter
    """
    # stdout carries the command's own report
    return _configured(logging.StreamHandler(sys.stderr), level, HumanReadableFormatter())
