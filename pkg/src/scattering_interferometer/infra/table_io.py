"""CSV codecs for phase-shift tables, fringes and velocity scans.

Lines starting with ``#`` are provenance comments and are skipped on read.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from ..core.domain.exceptions import ParameterError
from ..core.domain.models import FringeData, FringeSet, PhaseShiftTable, SignalClass, VelocityScan

PHASE_TABLE_HEADER = ["k_per_m", "l", "delta_rad"]
FRINGE_HEADER = ["detuning_hz", "class", "counts", "sigma"]
VELOCITY_HEADER = ["vz_m_per_s", "collisions", "no_collisions", "bg_collisions", "bg_no_collisions", "difference"]

FLOAT = "%.15e"


def _read_rows(path: Path) -> list[dict[str, str]]:
    try:
        lines = [line for line in path.read_text(encoding="utf-8").splitlines() if line.strip() and not line.startswith("#")]
    except OSError as exc:
        raise ParameterError("path", str(path), f"cannot read: {exc.strerror or exc}") from exc
    if not lines:
        raise ParameterError("path", str(path), "no header row")
    reader = csv.DictReader(lines)
    return list(reader)


def _column(rows: list[dict[str, str]], name: str, path: Path) -> np.ndarray:
    try:
        return np.array([float(row[name]) for row in rows])
    except KeyError as exc:
        raise ParameterError("path", str(path), f"missing column {name!r}") from exc
    except (TypeError, ValueError) as exc:
        raise ParameterError("path", str(path), f"non-numeric value in column {name!r}") from exc


# ---------------------------------------------------------------------------
# phase-shift tables
# ---------------------------------------------------------------------------


def phase_table_rows(table: PhaseShiftTable) -> list[list[float]]:
    """Rows (k, l, delta) ordered by l, then k."""
    return [
        [float(k), l, float(table.deltas[l, i])]
        for l in range(table.l_max + 1)
        for i, k in enumerate(table.k_grid)
    ]


def read_phase_table(path: Path) -> PhaseShiftTable:
    rows = _read_rows(path)
    k = _column(rows, "k_per_m", path)
    l = _column(rows, "l", path).astype(int)
    delta = _column(rows, "delta_rad", path)
    if l.size == 0:
        raise ParameterError("path", str(path), "phase table has no rows")
    l_values = np.unique(l)
    if l_values[0] != 0 or np.any(np.diff(l_values) != 1):
        raise ParameterError("path", str(path), "partial waves must run contiguously from l = 0")
    grid = np.unique(k[l == 0])
    deltas = []
    for value in l_values:
        mask = l == value
        order = np.argsort(k[mask])
        if not np.array_equal(k[mask][order], grid):
            raise ParameterError("path", str(path), f"l={value} does not share the l=0 wavenumber grid")
        deltas.append(delta[mask][order])
    return PhaseShiftTable(k_grid=grid, deltas=np.array(deltas))


# ---------------------------------------------------------------------------
# fringes
# ---------------------------------------------------------------------------


def fringe_rows(fringes: FringeSet) -> list[list[object]]:
    rows: list[list[object]] = []
    for label, data in fringes.classes().items():
        for x, y, s in zip(data.detuning_hz, data.counts, data.sigma):
            rows.append([float(x), label, float(y), float(s)])
    return rows


def read_fringes(path: Path, *, T: float, signal_class: str = SignalClass.SCATTERED.value) -> FringeData:
    """Fringe points of one class, sorted by detuning.

    The ``class`` column is optional; without it every row belongs to
    ``signal_class``. A missing ``sigma`` column means unit weights.
    """
    rows = _read_rows(path)
    if rows and "class" in rows[0]:
        rows = [row for row in rows if row["class"] == signal_class]
        if not rows:
            raise ParameterError("class", signal_class, f"no rows of this class in {path}")
    x = _column(rows, "detuning_hz", path)
    y = _column(rows, "counts", path)
    s = _column(rows, "sigma", path) if rows and "sigma" in rows[0] else np.zeros_like(y)
    order = np.argsort(x, kind="stable")
    return FringeData(detuning_hz=x[order], counts=y[order], sigma=s[order], T=T, signal_class=signal_class)


# ---------------------------------------------------------------------------
# velocity scans
# ---------------------------------------------------------------------------


def velocity_rows(scan: VelocityScan) -> list[list[float]]:
    columns = np.column_stack([
        scan.v_grid,
        scan.counts_collisions,
        scan.counts_no_collisions,
        scan.background_collisions,
        scan.background_no_collisions,
        scan.difference,
    ])
    return columns.tolist()
