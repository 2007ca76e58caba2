from __future__ import annotations

from ..domain.models import Scenario, VelocityScan
from ..services import ExperimentRunner, PreparedRun


class VelDistUseCase:
    def __init__(self, *, runner: ExperimentRunner) -> None:
        self._runner = runner

    def execute(self, *, scenario: Scenario) -> tuple[PreparedRun, VelocityScan]:
        return self._runner.velocity_scan(scenario)
