from __future__ import annotations

from ..domain.models import Scenario
from ..services import ExperimentRunner, FringeRun


class FringesUseCase:
    """Synthesize the four fringe classes and fit the scattered one."""

    def __init__(self, *, runner: ExperimentRunner) -> None:
        self._runner = runner

    def execute(self, *, scenario: Scenario, probe_vz: float = 0.0) -> FringeRun:
        return self._runner.fringes(scenario, probe_vz=probe_vz)
