from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

from dependency_injector.resources import Resource

from .handlers import build_human_console_handler, build_json_file_handler


class RunLogger(Resource):
    """Structured logger for one simulator run.

    Every call takes an event name plus keyword fields; the fields land at the
    top level of the JSON record. With a run id the records go to
    ``<logs_dir>/<run_id>.jsonl``, rewritten on every run of the same id.
    """

    def init(
        self,
        *,
        logs_dir: Path,
        run_id: str | None = None,
        logger_name: str = "scattering_interferometer",
        console_output: bool = False,
        level: str = "INFO",
    ) -> "RunLogger":
        """Attach the handlers for this run.

        Args:
            logs_dir: Directory of the JSON Lines files
            run_id: Run identifier; no file handler is attached without one
            logger_name: Logger name
            console_output: Mirror records to stderr in human-readable form
            level: Logging level (DEBUG, INFO, WARNING, ERROR)

        Returns:
            Self for dependency_injector Resource pattern
        """
        numeric = logging.getLevelNamesMapping()[level.upper()]
        self._logger = logging.getLogger(logger_name)
        self._logger.setLevel(numeric)
        self._logger.propagate = False
        self._logger.handlers.clear()

        self.log_file: Path | None = logs_dir / f"{run_id}.jsonl" if run_id else None
        self._handlers: list[logging.Handler] = []
        if self.log_file is not None:
            self._handlers.append(build_json_file_handler(self.log_file, level=numeric))
        if console_output:
            self._handlers.append(build_human_console_handler(level=numeric))
        for handler in self._handlers:
            self._logger.addHandler(handler)
        return self

    def shutdown(self, resource: "RunLogger") -> None:
        for handler in self._handlers:
            handler.flush()
            handler.close()
        self._logger.handlers.clear()

    def _emit(self, level: int, message: str, fields: dict[str, Any], exc_info: bool = False) -> None:
        self._logger.log(level, message, extra=fields or None, exc_info=exc_info)

    def debug(self, message: str, **kwargs: Any) -> None:
        self._emit(logging.DEBUG, message, kwargs)

    def info(self, message: str, **kwargs: Any) -> None:
        self._emit(logging.INFO, message, kwargs)

    def warning(self, message: str, **kwargs: Any) -> None:
        self._emit(logging.WARNING, message, kwargs)

    def error(self, message: str, exc_info: bool = False, **kwargs: Any) -> None:
        """Log an error; ``exc_info=True`` attaches the active traceback."""
        self._emit(logging.ERROR, message, kwargs, exc_info=exc_info)

    def exception(self, message: str, **kwargs: Any) -> None:
        self._emit(logging.ERROR, message, kwargs, exc_info=True)
