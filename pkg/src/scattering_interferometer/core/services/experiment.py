from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..domain.exceptions import ParameterError
from ..domain.models import (
    CampaignParameter,
    CampaignPoint,
    CampaignResult,
    CollisionGeometry,
    FitResult,
    FitWindow,
    FringeData,
    FringeSet,
    InjectionMode,
    PhaseShiftTable,
    Scenario,
    VelocityScan,
)
from ..ports import LoggerPort
from . import analysis, fountain, scatterlib
from .collider import Collider, wavenumber_range


@dataclass(frozen=True, eq=False)
class PreparedRun:
    scenario: Scenario
    geometry: CollisionGeometry
    table3: PhaseShiftTable
    table4: PhaseShiftTable


@dataclass(frozen=True, eq=False)
class FringeRun:
    prepared: PreparedRun
    fringes: FringeSet
    fit: FitResult


def point_seed(seed: int, index: int) -> int:
    """Independent 64-bit seed for the ``index``-th campaign point."""
    state = np.random.SeedSequence(entropy=seed, spawn_key=(index,)).generate_state(1, dtype=np.uint64)
    return int(state[0])


class ExperimentRunner:
    """Runs scenarios end to end: geometry, phase-shift tables, collider and fits."""

    def __init__(self, *, collider: Collider, logger: LoggerPort) -> None:
        self._collider = collider
        self._logger = logger

    def prepare(self, scenario: Scenario) -> PreparedRun:
        geometry = fountain.collision_geometry(scenario.launch, scenario.mass)
        self._logger.info(
            "collision_geometry",
            type="collision_geometry",
            v_r=geometry.v_r,
            energy_over_kb=geometry.energy_over_kb,
            t_collide=geometry.t_collide,
            T=geometry.T,
            t_detect_delay=geometry.t_detect_delay,
            spread_diameter=geometry.spread_diameter,
            after_apogee=geometry.after_apogee,
        )
        for message in geometry.warnings + scenario.cloud1.warnings + scenario.cloud2.warnings:
            self._logger.warning("scenario_warning", type="scenario_warning", detail=message)

        k_min, k_max = wavenumber_range(
            geometry,
            scenario.cloud1,
            scenario.cloud2,
            thermal_average=scenario.simulation.thermal_average,
        )
        tables = []
        for channel in (scenario.channel3, scenario.channel4):
            table = scatterlib.resolve_channel_table(channel, k_min, k_max, scenario.l_max)
            self._logger.info(
                "phase_shift_table",
                type="phase_shift_table",
                channel=channel.label,
                points=int(table.k_grid.size),
                l_max=table.l_max,
                delta0_at_collision=float(table.delta_at(geometry.wavenumber)[0]),
            )
            tables.append(table)
        return PreparedRun(scenario=scenario, geometry=geometry, table3=tables[0], table4=tables[1])

    def velocity_scan(self, scenario: Scenario) -> tuple[PreparedRun, VelocityScan]:
        run = self.prepare(scenario)
        scan = self._collider.velocity_scan(scenario, run.geometry, run.table3, run.table4)
        return run, scan

    def fringes(
        self,
        scenario: Scenario,
        probe_vz: float = 0.0,
        seed: int | None = None,
        noise_seed: int | None = None,
    ) -> FringeRun:
        run = self.prepare(scenario)
        fringes = self._collider.synthesize_fringes(
            scenario, run.geometry, run.table3, run.table4, probe_vz=probe_vz, seed=seed, noise_seed=noise_seed
        )
        fit = self.fit(fringes.scattered, scenario.fit_window)
        return FringeRun(prepared=run, fringes=fringes, fit=fit)

    def fit(self, data: FringeData, window: FitWindow = FitWindow.FULL) -> FitResult:
        result = analysis.fit_fringe(data, window=window)
        self._logger.info(
            "fringe_fit",
            type="fringe_fit",
            signal_class=result.signal_class,
            window=window.value,
            phi=result.phi,
            phi_err=result.phi_err,
            amplitude=result.amplitude,
            chi2_per_dof=result.chi2_per_dof,
        )
        for message in result.warnings:
            self._logger.warning("fit_warning", type="fit_warning", detail=message)
        return result

    # ------------------------------------------------------------------
    # campaigns
    # ------------------------------------------------------------------

    @staticmethod
    def _scenario_for(
        scenario: Scenario,
        parameter: CampaignParameter,
        value: float,
        injection: InjectionMode,
        frequency_shift_hz: float,
    ) -> Scenario:
        if parameter is CampaignParameter.T:
            changed = scenario.replace(launch=fountain.plan_for_interrogation_time(scenario.launch, value))
        else:
            changed = scenario.replace(cloud1=scenario.cloud1.with_peak_density(value))
        if injection is InjectionMode.FREQUENCY:
            # No scattering phase; the scattered branch runs at a shifted frequency instead.
            changed = changed.replace(
                channel4=replace(scenario.channel3, label=scenario.channel4.label),
                ramsey=replace(scenario.ramsey, injection=injection, frequency_shift_hz=frequency_shift_hz),
            )
        return changed

    def campaign(
        self,
        scenario: Scenario,
        parameter: CampaignParameter,
        values: list[float],
        *,
        injection: InjectionMode = InjectionMode.PHASE,
        frequency_shift_hz: float = 0.0,
        seed: int | None = None,
    ) -> CampaignResult:
        """Fringe fit per value, then pooled and flat-vs-linear statistics.

        Points share the atom samples of ``seed`` (common random numbers) and
        draw shot noise from independent per-point streams, so differences
        between points come from the varied parameter and from noise only.
        """
        if len(values) < 3:
            raise ParameterError("values", values, "a campaign needs at least 3 values")
        if parameter is CampaignParameter.DENSITY:
            positive = [v for v in values if v > 0]
            if positive and max(positive) < 4.0 * min(positive):
                raise ParameterError("values", values, "densities must span at least a factor of 4")
        seed = scenario.simulation.seed if seed is None else seed

        points: list[CampaignPoint] = []
        rejected: list[float] = []
        for index, value in enumerate(values):
            if parameter is CampaignParameter.DENSITY and value <= 0:
                rejected.append(value)
                self._logger.warning("campaign_point_rejected", type="campaign_point_rejected", value=value)
                continue
            point_scenario = self._scenario_for(scenario, parameter, value, injection, frequency_shift_hz)
            run = self.fringes(point_scenario, seed=seed, noise_seed=point_seed(seed, index))
            flagged = any(w.startswith("low contrast") for w in run.fit.warnings)
            points.append(CampaignPoint(value=value, fit=run.fit, flagged=flagged))
            self._logger.info(
                "campaign_point",
                type="campaign_point",
                parameter=parameter.value,
                value=value,
                T=run.prepared.geometry.T,
                v_r=run.prepared.geometry.v_r,
                v_launch2=run.prepared.scenario.launch.v_launch2,
                phi=run.fit.phi,
                phi_err=run.fit.phi_err,
                amplitude=run.fit.amplitude,
                flagged=flagged,
            )

        result = analysis.summarize_campaign(parameter, injection, points, rejected=rejected)
        self._logger.info(
            "campaign_summary",
            type="campaign_summary",
            parameter=parameter.value,
            injection=injection.value,
            points=len(points),
            rejected=len(rejected),
            pooled_phi=result.pooled_phi,
            pooled_phi_err=result.pooled_phi_err,
            slope=result.slope,
            slope_err=result.slope_err,
            delta_chi2=result.delta_chi2,
        )
        return result
