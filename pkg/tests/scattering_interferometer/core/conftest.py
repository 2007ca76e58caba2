"""Shared fakes and scenarios for core tests."""
from __future__ import annotations

from dataclasses import replace

import pytest

from scattering_interferometer.core.domain.models import (
    CloudSpec,
    CloudState,
    DetectionSpec,
    LaunchPlan,
    LaunchSlot,
    PhaseShiftTable,
    RamseyPlan,
    ScatteringChannel,
    Scenario,
    SimulationSettings,
)


class FakeLogger:
    """Records (level, event, fields) instead of writing anywhere."""

    def __init__(self):
        self.records = []

    def _log(self, level, message, kwargs):
        self.records.append((level, message, kwargs))

    def debug(self, message, **kwargs):
        self._log("debug", message, kwargs)

    def info(self, message, **kwargs):
        self._log("info", message, kwargs)

    def warning(self, message, **kwargs):
        self._log("warning", message, kwargs)

    def error(self, message, exc_info=False, **kwargs):
        self._log("error", message, kwargs)

    def exception(self, message, **kwargs):
        self._log("error", message, kwargs)

    def events(self, name):
        return [fields for _, message, fields in self.records if message == name]

    def levels(self, name):
        return [level for level, message, _ in self.records if message == name]


def injected_channel(label, *deltas):
    return ScatteringChannel(label=label, table=PhaseShiftTable.constant(list(deltas), 1.0, 1e12))


def make_scenario(**changes) -> Scenario:
    """Default fountain with few Monte Carlo samples and no shot noise."""
    scenario = Scenario(
        launch=LaunchPlan(v_launch2=2.50909, dt_launch=0.010122, z_cavity=0.305),
        cloud1=CloudSpec(
            atoms=1.6e9,
            temperature=500e-9,
            sigma_pos=2.567e-3,
            peak_density=6e15,
            state=CloudState.pure(4, 4),
            slot=LaunchSlot.CLOUD1,
        ),
        cloud2=CloudSpec(
            atoms=3e8,
            temperature=250e-9,
            sigma_pos=2.513e-3,
            peak_density=1.2e15,
            state=CloudState.clock_superposition(),
            slot=LaunchSlot.CLOUD2,
        ),
        channel3=injected_channel("|3,0>", 0.600),
        channel4=injected_channel("|4,0>", 0.741),
        detection=DetectionSpec(),
        ramsey=RamseyPlan(points=41),
        simulation=SimulationSettings(seed=7, noise=False, samples=2000, max_samples=100_000, repetitions=1),
    )
    return scenario.replace(**changes) if changes else scenario


def with_simulation(scenario: Scenario, **changes) -> Scenario:
    return scenario.replace(simulation=replace(scenario.simulation, **changes))


@pytest.fixture
def fake_logger():
    return FakeLogger()


@pytest.fixture
def scenario():
    return make_scenario()
