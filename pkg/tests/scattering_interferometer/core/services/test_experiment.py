import math
from dataclasses import replace

import numpy as np
import pytest

from helpers import noiseless_fringe
from scattering_interferometer.core.domain.constants import ANGSTROM, MU_CS, REFERENCE_SCATTERING_LENGTH
from scattering_interferometer.core.domain.exceptions import ParameterError
from scattering_interferometer.core.domain.models import (
    CampaignParameter,
    FringeData,
    InjectionMode,
    Potential,
    ScatteringChannel,
)
from scattering_interferometer.core.services import Collider, ExperimentRunner, scatterlib
from scattering_interferometer.core.services.experiment import point_seed
from tests.scattering_interferometer.core.conftest import make_scenario, with_simulation


def _runner(logger):
    return ExperimentRunner(collider=Collider(logger=logger), logger=logger)


def test_prepare_logs_geometry_and_tables(fake_logger, scenario):
    run = _runner(fake_logger).prepare(scenario)

    assert run.geometry.T == pytest.approx(0.115, abs=5e-4)
    assert run.table3.delta_at(run.geometry.wavenumber)[0] == pytest.approx(0.600)
    assert len(fake_logger.events("collision_geometry")) == 1
    assert [e["channel"] for e in fake_logger.events("phase_shift_table")] == ["|3,0>", "|4,0>"]
    assert fake_logger.events("scenario_warning") == []


def test_prepare_warns_about_inconsistent_density(fake_logger, scenario):
    skewed = scenario.replace(cloud2=replace(scenario.cloud2, peak_density=5e15))
    _runner(fake_logger).prepare(skewed)

    warnings = fake_logger.events("scenario_warning")
    assert len(warnings) == 1
    assert "cloud2" in warnings[0]["detail"]


def test_prepare_tabulates_potential_channels_at_the_collision_wavenumber(fake_logger, scenario):
    radius = 100 * ANGSTROM
    depth = scatterlib.square_well_depth_for_scattering_length(REFERENCE_SCATTERING_LENGTH, radius, MU_CS)
    channel = ScatteringChannel(label="|3,0>", potential=Potential.square_well(depth=depth, radius=radius))
    run = _runner(fake_logger).prepare(scenario.replace(channel3=channel))

    assert run.table3.covers(run.geometry.wavenumber)
    expected = scatterlib.analytic_square_well_phase_shift(channel.potential, run.geometry.wavenumber, 0)
    assert abs(math.remainder(run.table3.delta_at(run.geometry.wavenumber)[0] - expected, math.pi)) < 1e-6


def test_fringes_fit_the_scattered_class(fake_logger, scenario):
    run = _runner(fake_logger).fringes(scenario)

    assert run.fit.phi == pytest.approx(-0.141, abs=1e-6)
    assert run.fit.signal_class == "scattered"
    assert fake_logger.events("fringe_fit")[0]["phi"] == run.fit.phi


def test_fit_logs_low_contrast_warning(fake_logger):
    grid = np.linspace(-20, 20, 81)
    counts = noiseless_fringe(grid, 0.1, 0.3, 0.5, 100.0)
    data = FringeData(detuning_hz=grid, counts=counts, sigma=np.full(81, 10.0), T=0.1)
    _runner(fake_logger).fit(data)

    assert fake_logger.levels("fit_warning") == ["warning"]


def test_point_seeds_are_stable_and_distinct():
    seeds = [point_seed(7, i) for i in range(4)]
    assert seeds == [point_seed(7, i) for i in range(4)]
    assert len(set(seeds)) == 4
    assert all(0 <= s < 2 ** 64 for s in seeds)


def test_frequency_injection_grows_linearly_with_T(fake_logger, scenario):
    """A 0.2 Hz shift on the scattered branch gives phi = 2 pi 0.2 Hz T."""
    values = [0.08, 0.10, 0.12]
    result = _runner(fake_logger).campaign(
        scenario, CampaignParameter.T, values, injection=InjectionMode.FREQUENCY, frequency_shift_hz=0.2
    )

    for point in result.points:
        assert point.fit.phi == pytest.approx(2 * math.pi * 0.2 * point.value, abs=1e-6)
    assert result.frequency_model_slope == pytest.approx(2 * math.pi * 0.2, rel=1e-4)
    assert result.slope == pytest.approx(2 * math.pi * 0.2, rel=1e-4)
    assert len(fake_logger.events("campaign_point")) == 3


def test_scattering_phase_does_not_depend_on_T(fake_logger, scenario):
    result = _runner(fake_logger).campaign(scenario, CampaignParameter.T, [0.08, 0.10, 0.12])

    assert result.pooled_phi == pytest.approx(-0.141, abs=1e-6)
    assert result.p_value_flat > 0.5


def test_density_campaign_keeps_phase_and_scales_amplitude(fake_logger, scenario):
    """Common atom samples make the zero-noise amplitude exactly proportional to n."""
    result = _runner(fake_logger).campaign(scenario, CampaignParameter.DENSITY, [1.5e15, 3e15, 6e15])

    assert [p.fit.phi for p in result.points] == pytest.approx([-0.141] * 3, abs=1e-6)
    assert result.p_value_flat > 0.5
    assert result.amplitude_r2 > 0.999
    amplitudes = [p.fit.amplitude for p in result.points]
    assert amplitudes[2] == pytest.approx(4 * amplitudes[0], rel=1e-6)


def test_non_positive_density_is_rejected_not_fatal(fake_logger, scenario):
    result = _runner(fake_logger).campaign(scenario, CampaignParameter.DENSITY, [0.0, 1.5e15, 3e15, 6e15])

    assert result.rejected == (0.0,)
    assert len(result.points) == 3
    assert fake_logger.levels("campaign_point_rejected") == ["warning"]


def test_campaign_argument_checks(fake_logger, scenario):
    runner = _runner(fake_logger)
    with pytest.raises(ParameterError):
        runner.campaign(scenario, CampaignParameter.T, [0.1, 0.12])
    with pytest.raises(ParameterError):
        runner.campaign(scenario, CampaignParameter.DENSITY, [2e15, 3e15, 6e15])


def test_campaign_summary_is_logged(fake_logger):
    scenario = make_scenario()
    _runner(fake_logger).campaign(scenario, CampaignParameter.T, [0.09, 0.11, 0.13])
    summary = fake_logger.events("campaign_summary")
    assert len(summary) == 1
    assert summary[0]["points"] == 3


PAPER_T_VALUES = [0.115, 0.233, 0.450]


def test_noisy_scattering_phase_is_flat_over_paper_interrogation_times(fake_logger, scenario):
    noisy = with_simulation(scenario, noise=True)
    result = _runner(fake_logger).campaign(noisy, CampaignParameter.T, PAPER_T_VALUES)

    assert [e["T"] for e in fake_logger.events("campaign_point")] == pytest.approx(PAPER_T_VALUES, rel=1e-9)
    assert result.p_value_flat > 0.01
    assert abs(result.slope) < 3 * result.slope_err
    assert result.pooled_phi == pytest.approx(-0.141, abs=5 * result.pooled_phi_err)


def test_noisy_frequency_injection_is_not_flat_over_paper_interrogation_times(fake_logger, scenario):
    noisy = with_simulation(scenario, noise=True)
    result = _runner(fake_logger).campaign(
        noisy, CampaignParameter.T, PAPER_T_VALUES, injection=InjectionMode.FREQUENCY, frequency_shift_hz=0.2
    )

    assert result.p_value_flat < 1e-6
    assert result.slope == pytest.approx(2 * math.pi * 0.2, abs=5 * result.slope_err)


def test_pipeline_phase_pulls_have_unit_spread(fake_logger, scenario):
    """Shot-noise fits over 200 noise seeds scatter by one quoted standard error."""
    noisy = with_simulation(scenario, noise=True)
    runner = _runner(fake_logger)
    pulls = [(runner.fringes(noisy, noise_seed=i).fit.phi + 0.141) for i in range(200)]
    errors = [e["phi_err"] for e in fake_logger.events("fringe_fit")]
    pulls = np.array(pulls) / np.array(errors)

    assert abs(pulls.mean()) < 0.3
    assert 0.8 < pulls.std(ddof=1) < 1.2
