from __future__ import annotations

import csv
import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from ..core.ports import LoggerPort
from ..shared.to_jsonable import to_jsonable


class OutputWriter:
    """Writes CSV and JSON artefacts stamped with the config hash and seed.

    CSV files start with ``# config_sha256=<hash> seed=<seed>`` (plus a
    ``# generated_at=`` line when timestamps are enabled); JSON documents get
    the same data under ``provenance``.
    """

    def __init__(
        self,
        *,
        logger: LoggerPort,
        config_sha256: str,
        seed: int,
        timestamp: bool = True,
    ) -> None:
        self._logger = logger
        self._config_sha256 = config_sha256
        self._seed = seed
        self._timestamp = timestamp

    def provenance(self) -> dict[str, Any]:
        doc: dict[str, Any] = {"config_sha256": self._config_sha256, "seed": self._seed}
        if self._timestamp:
            doc["generated_at"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
        return doc

    def write_csv(
        self,
        path: Path,
        header: list[str],
        rows: list[list[Any]],
        *,
        formats: list[str | None] | None = None,
    ) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        prov = self.provenance()
        with path.open("w", encoding="utf-8", newline="") as fh:
            fh.write(f"# config_sha256={prov['config_sha256']} seed={prov['seed']}\n")
            if "generated_at" in prov:
                fh.write(f"# generated_at={prov['generated_at']}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                if formats:
                    row = [fmt % value if fmt else value for fmt, value in zip(formats, row)]
                writer.writerow(row)
        self._logger.info("output_written", type="output_written", path=str(path), rows=len(rows))
        return path

    def write_json(self, path: Path, document: dict[str, Any]) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        payload = {**to_jsonable(document), "provenance": self.provenance()}
        path.write_text(json.dumps(payload, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
        self._logger.info("output_written", type="output_written", path=str(path))
        return path
