from __future__ import annotations

import logging
from typing import Any

from pythonjsonlogger.json import JsonFormatter

from ...shared.to_jsonable import to_jsonable


class JSONFormatter(JsonFormatter):
    """One JSON object per record; ``extra`` fields land at the top level.

    numpy scalars and arrays, enums and dataclasses in the fields are
    converted with ``to_jsonable``.
    """

    def __init__(self, *args: Any, **kwargs: Any) -> None:
        kwargs.setdefault("json_default", to_jsonable)
        super().__init__(*args, **kwargs)

    def add_fields(self, log_record: dict, record: logging.LogRecord, message_dict: dict) -> None:
        """Add level, logger name and the rendered message to every record.

        Args:
            log_record: Output dict being built
            record: Source log record
            message_dict: Message fields parsed by the base formatter
        """
        super().add_fields(log_record, record, message_dict)
        log_record['level'] = record.levelname
        log_record['logger'] = record.name
        log_record['message'] = record.getMessage()


class HumanReadableFormatter(logging.Formatter):
    """Console formatter; appends a ``detail`` or ``reason`` field when present."""

    def __init__(self) -> None:
        super().__init__(fmt='%(asctime)s %(levelname)-7s %(message)s', datefmt='%H:%M:%S')

    def format(self, record: logging.LogRecord) -> str:
        """Render one console line.

        Args:
            record: Log record to format

        Returns:
            ``HH:MM:SS LEVEL event`` plus the detail in parentheses
        """
        text = super().format(record)
        detail = getattr(record, 'detail', None) or getattr(record, 'reason', None)
        return f"{text} ({detail})" if detail else text
