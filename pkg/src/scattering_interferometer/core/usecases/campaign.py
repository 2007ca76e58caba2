from __future__ import annotations

from ..domain.models import CampaignParameter, CampaignResult, InjectionMode, Scenario
from ..services import ExperimentRunner


class CampaignUseCase:
    """Repeat the fringe measurement across T values or target densities."""

    def __init__(self, *, runner: ExperimentRunner) -> None:
        self._runner = runner

    def execute(
        self,
        *,
        scenario: Scenario,
        parameter: CampaignParameter,
        values: list[float],
        injection: InjectionMode = InjectionMode.PHASE,
        frequency_shift_hz: float = 0.0,
    ) -> CampaignResult:
        return self._runner.campaign(
            scenario,
            parameter,
            values,
            injection=injection,
            frequency_shift_hz=frequency_shift_hz,
        )

    def phase_vs_T(self, *, scenario: Scenario, values: list[float], **kwargs) -> CampaignResult:
        return self.execute(scenario=scenario, parameter=CampaignParameter.T, values=values, **kwargs)

    def phase_vs_density(self, *, scenario: Scenario, values: list[float], **kwargs) -> CampaignResult:
        return self.execute(scenario=scenario, parameter=CampaignParameter.DENSITY, values=values, **kwargs)
