from __future__ import annotations

from ..domain.models import FitResult, FitWindow, FringeData
from ..services import ExperimentRunner


class FitUseCase:
    def __init__(self, *, runner: ExperimentRunner) -> None:
        self._runner = runner

    def execute(self, *, data: FringeData, window: FitWindow = FitWindow.FULL) -> FitResult:
        return self._runner.fit(data, window)
