from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..domain.exceptions import ParameterError, ResonanceError
from ..domain.models import PhaseShiftTable, ScatteringChannel, ScatteringLength
from ..ports import LoggerPort
from ..services import scatterlib


@dataclass(frozen=True, eq=False)
class PhaseShiftReport:
    channel: str
    table: PhaseShiftTable
    scattering_length: ScatteringLength | None


class PhaseShiftsUseCase:
    """Tabulate delta_l(k) for one channel and, for potentials, its scattering length."""

    def __init__(self, *, logger: LoggerPort) -> None:
        self._logger = logger

    def execute(self, *, channel: ScatteringChannel, k_min: float, k_max: float, k_points: int, l_max: int) -> PhaseShiftReport:
        if not 0 < k_min <= k_max:
            raise ParameterError("k_range", (k_min, k_max), "need 0 < k_min <= k_max")
        if k_points < 1:
            raise ParameterError("k_points", k_points, "must be >= 1")
        grid = np.linspace(k_min, k_max, k_points) if k_points > 1 else np.array([k_min])

        if channel.potential is None:
            table = channel.table
            if not (table.covers(k_min) and table.covers(k_max)):
                raise ParameterError("k_range", (k_min, k_max), f"outside the table grid of {channel.label}")
            if l_max < table.l_max:
                table = table.truncated(l_max)
            length = None
        else:
            table = scatterlib.tabulate_phase_shifts(channel.potential, grid, l_max)
            try:
                length = scatterlib.scattering_length(channel.potential)
            except ResonanceError as exc:
                self._logger.warning("scattering_length_unavailable", type="scattering_length_unavailable", reason=str(exc))
                length = None

        self._logger.info(
            "phase_shift_table",
            type="phase_shift_table",
            channel=channel.label,
            points=int(table.k_grid.size),
            l_max=table.l_max,
            max_adjacent_step=table.max_adjacent_step(),
            scattering_length=None if length is None else length.value,
        )
        return PhaseShiftReport(channel=channel.label, table=table, scattering_length=length)
