from __future__ import annotations

from pathlib import Path
from typing import Any, Protocol


class LoggerPort(Protocol):
    """Port for structured logging.

    Messages are snake_case event names; keyword arguments become fields of
    the JSON record.
    """

    def debug(self, message: str, **kwargs: Any) -> None:
        ...

    def info(self, message: str, **kwargs: Any) -> None:
        ...

    def warning(self, message: str, **kwargs: Any) -> None:
        ...

    def error(self, message: str, exc_info: bool = False, **kwargs: Any) -> None:
        ...

    def exception(self, message: str, **kwargs: Any) -> None:
        ...


class OutputWriterPort(Protocol):
    """Port for writing run artefacts with provenance."""

    def write_csv(
        self,
        path: Path,
        header: list[str],
        rows: list[list[Any]],
        *,
        formats: list[str | None] | None = None,
    ) -> Path:
        """Write a CSV file preceded by provenance comment lines."""
        ...

    def write_json(self, path: Path, document: dict[str, Any]) -> Path:
        """Write a JSON document with a ``provenance`` field added."""
        ...
