import math

import numpy as np
import pytest

from scattering_interferometer.core.domain.constants import ANGSTROM, HBAR, MU_CS, REFERENCE_SCATTERING_LENGTH
from scattering_interferometer.core.domain.exceptions import ParameterError, RangeError, SolverError
from scattering_interferometer.core.domain.models import PhaseShiftTable, Potential, ScatteringChannel
from scattering_interferometer.core.services import scatterlib


def _well(k0r: float, radius: float = 1e-9, mu: float = MU_CS) -> Potential:
    """Square well with dimensionless strength K0 R."""
    k0 = k0r / radius
    return Potential.square_well(depth=(HBAR * k0) ** 2 / (2 * mu), radius=radius, reduced_mass=mu)


def _same_mod_pi(a: float, b: float) -> float:
    return abs(math.remainder(a - b, math.pi))


def test_collision_wavenumber_for_default_relative_velocity():
    """v_r = 9.92 cm/s gives k close to 1.04e8 1/m."""
    k = scatterlib.collision_wavenumber(0.0992, MU_CS)
    assert k == pytest.approx(1.04e8, rel=0.01)


def test_energy_wavenumber_roundtrip():
    k = 1.3e8
    energy = scatterlib.energy_from_wavenumber(k, MU_CS)
    assert scatterlib.wavenumber_from_energy(energy, MU_CS) == pytest.approx(k, rel=1e-12)


@pytest.mark.parametrize("chunk", range(10))
def test_numerov_matches_analytic_square_well_over_random_family(chunk):
    """Numerov s-wave phase shift agrees with the closed form to 1e-6 rad.

    Ten chunks of ten random wells, thirty wavenumbers each.
    """
    rng = np.random.default_rng([20240101, chunk])
    worst = 0.0
    for _ in range(10):
        radius = 10 ** rng.uniform(-9.3, -8.3)
        mu = MU_CS * rng.uniform(0.5, 2.0)
        pot = _well(rng.uniform(0.2, 2.5), radius=radius, mu=mu)
        for kr in np.geomspace(1e-3, 1.0, 30):
            k = kr / radius
            numeric = scatterlib.solve_phase_shift(pot, k, 0)
            exact = scatterlib.analytic_square_well_phase_shift(pot, k, 0)
            worst = max(worst, _same_mod_pi(numeric, exact))
    assert worst < 1e-6


def test_numerov_matches_analytic_square_well_p_wave():
    pot = _well(1.2)
    k = 0.5 / pot.radius
    numeric = scatterlib.solve_phase_shift(pot, k, 1)
    exact = scatterlib.analytic_square_well_phase_shift(pot, k, 1)
    assert _same_mod_pi(numeric, exact) < 1e-6


def test_phase_shift_is_principal_value():
    pot = _well(2.0)
    delta = scatterlib.solve_phase_shift(pot, 0.3 / pot.radius, 0)
    assert -math.pi / 2 < delta <= math.pi / 2


def test_zero_depth_well_does_not_scatter():
    pot = Potential.square_well(depth=0.0, radius=1e-9)
    assert scatterlib.solve_phase_shift(pot, 1e8, 0) == 0.0
    assert scatterlib.scattering_length(pot).value == 0.0


def test_solver_reports_non_convergence():
    """A step budget too small to refine raises SolverError naming (k, l)."""
    pot = _well(1.0)
    with pytest.raises(SolverError) as exc:
        scatterlib.solve_phase_shift(pot, 1e8, 2, max_steps=256)
    assert exc.value.l == 2
    assert exc.value.k == 1e8


def test_small_k_phase_shift_follows_scattering_length():
    """K0 R = pi/4 gives a = R (1 - 4/pi), so delta_0 = +0.2732 k R for small k."""
    pot = _well(math.pi / 4)
    k = 1e-3 / pot.radius
    delta = scatterlib.solve_phase_shift(pot, k, 0)
    assert delta == pytest.approx((4 / math.pi - 1) * k * pot.radius, rel=1e-3)


def test_low_energy_phase_shift_is_minus_k_a_across_wells():
    """For ka and kR below 0.01, delta_0 = -k a to better than one percent."""
    rng = np.random.default_rng(7)
    strengths = np.concatenate([rng.uniform(0.5, 1.3, 10), rng.uniform(1.8, 2.5, 10)])
    for k0r in strengths:
        pot = _well(float(k0r), radius=10 ** rng.uniform(-9.3, -8.3))
        a = scatterlib.analytic_square_well_scattering_length(pot)
        for ka in (1e-3, 3e-3, 8e-3):
            k = min(ka / abs(a), 8e-3 / pot.radius)
            delta = scatterlib.solve_phase_shift(pot, k, 0)
            assert abs(delta + k * a) < 0.01 * k * abs(a), (k0r, k)


def test_scattering_length_extrapolation_matches_closed_form():
    pot = _well(math.pi / 4)
    result = scatterlib.scattering_length(pot)

    assert result.value == pytest.approx(pot.radius * (1 - 4 / math.pi), rel=1e-5)
    assert result.value == pytest.approx(scatterlib.analytic_square_well_scattering_length(pot), rel=1e-5)
    assert result.relative_uncertainty < 1e-5


@pytest.mark.parametrize("target", [REFERENCE_SCATTERING_LENGTH, -50 * ANGSTROM])
def test_well_depth_for_scattering_length_roundtrip(target):
    radius = 100 * ANGSTROM
    depth = scatterlib.square_well_depth_for_scattering_length(target, radius, MU_CS)
    pot = Potential.square_well(depth=depth, radius=radius)
    assert scatterlib.analytic_square_well_scattering_length(pot) == pytest.approx(target, rel=1e-9)


def test_lennard_jones_phase_shift_is_finite_and_deterministic():
    sigma = 1e-9
    depth = 10 * HBAR ** 2 / (2 * MU_CS * sigma ** 2)
    c6 = 4 * depth * sigma ** 6
    pot = Potential.lennard_jones(c12=c6 * sigma ** 6, c6=c6)

    first = scatterlib.solve_phase_shift(pot, 1.0 / sigma, 0)
    second = scatterlib.solve_phase_shift(pot, 1.0 / sigma, 0)
    assert first == second
    assert -math.pi / 2 < first <= math.pi / 2


def test_tabulated_phase_shifts_are_continuous_and_exact():
    """Tables refine until adjacent steps stay below 0.01 rad."""
    pot = _well(1.3)
    grid = np.linspace(0.05, 1.5, 5) / pot.radius
    table = scatterlib.tabulate_phase_shifts(pot, grid, l_max=1)

    assert table.l_max == 1
    assert table.max_adjacent_step() < scatterlib.TABLE_MAX_STEP
    assert table.k_grid.size > grid.size
    for k, delta in zip(table.k_grid[::7], table.deltas[0, ::7]):
        assert _same_mod_pi(delta, scatterlib.analytic_square_well_phase_shift(pot, k, 0)) < 1e-6


def test_resolve_channel_table_uses_given_table():
    table = PhaseShiftTable.constant([0.6, 0.1], 1.0, 1e12)
    channel = ScatteringChannel(label="|3,0>", table=table)

    resolved = scatterlib.resolve_channel_table(channel, 1e8, 1e8, l_max=0)
    assert resolved.l_max == 0
    assert resolved.delta_at(1e8)[0] == 0.6


def test_resolve_channel_table_for_single_wavenumber():
    pot = _well(0.8)
    channel = ScatteringChannel(label="|4,0>", potential=pot)
    k = 0.2 / pot.radius
    table = scatterlib.resolve_channel_table(channel, k, k, l_max=0)
    assert table.covers(k)
    assert table.k_grid.size == 1


def test_cross_section_satisfies_optical_theorem():
    """Partial-wave sum equals 4 pi / k Im f(0)."""
    k = 1e8
    table = PhaseShiftTable.constant([0.3, 0.1], 1.0, 1e12)
    xs = scatterlib.cross_sections(table, k)
    forward = scatterlib.scattering_amplitude(table, k, 0.0)

    assert xs.total == pytest.approx(4 * math.pi / k * forward.imag, rel=1e-12)
    assert len(xs.partial) == 2
    assert xs.differential(0.0) == pytest.approx(abs(forward) ** 2)


def test_partial_cross_sections_respect_unitarity_bound():
    """sigma_l <= 4 pi (2l + 1) / k^2 for solved wells and arbitrary phase shifts."""
    rng = np.random.default_rng(11)
    for _ in range(20):
        pot = _well(rng.uniform(0.2, 3.0))
        k = rng.uniform(0.05, 2.0) / pot.radius
        table = PhaseShiftTable.constant([scatterlib.solve_phase_shift(pot, k, l) for l in range(3)], 0.5 * k, 2 * k)
        xs = scatterlib.cross_sections(table, k)
        for l, partial in enumerate(xs.partial):
            assert partial <= 4 * math.pi * (2 * l + 1) / k ** 2 * (1 + 1e-12)

    k = 1e8
    unitary = scatterlib.cross_sections(PhaseShiftTable.constant([math.pi / 2, math.pi / 2], 1.0, 1e12), k)
    assert unitary.partial[0] == pytest.approx(4 * math.pi / k ** 2, rel=1e-12)
    assert unitary.partial[1] == pytest.approx(12 * math.pi / k ** 2, rel=1e-12)


def test_s_wave_amplitude_is_isotropic():
    table = PhaseShiftTable.constant([0.6], 1.0, 1e12)
    f = scatterlib.scattering_amplitude(table, 1e8, np.array([0.0, 1.0, math.pi]))
    assert np.allclose(f, f[0])
    assert f[0] == pytest.approx(np.exp(0.6j) * math.sin(0.6) / 1e8)


def test_coherence_phase_is_phase_shift_difference():
    """For s-wave tables arg(f3 f4*) = delta3 - delta4."""
    t3 = PhaseShiftTable.constant([0.600], 1.0, 1e12)
    t4 = PhaseShiftTable.constant([0.741], 1.0, 1e12)
    c = scatterlib.coherence_factor(t3, t4, 1.04e8, 0.7)
    assert np.angle(c) == pytest.approx(-0.141, abs=1e-12)


def test_p_wave_leaves_right_angle_coherence_unchanged():
    """P_1(cos 90 deg) = 0, so a p-wave shift cannot move the phase at 90 degrees."""
    k = 1.04e8
    s3 = PhaseShiftTable.constant([0.600, 0.0], 1.0, 1e12)
    p3 = PhaseShiftTable.constant([0.600, 0.2], 1.0, 1e12)
    t4 = PhaseShiftTable.constant([0.741, 0.0], 1.0, 1e12)

    at_right_angle = scatterlib.coherence_factor(p3, t4, k, math.pi / 2)
    assert at_right_angle == pytest.approx(scatterlib.coherence_factor(s3, t4, k, math.pi / 2), rel=1e-12)
    assert np.angle(scatterlib.coherence_factor(p3, t4, k, 0.3)) != pytest.approx(-0.141, abs=1e-6)


def test_effective_cross_section_quadrature_matches_s_wave_formula():
    k = 1.04e8
    t3 = PhaseShiftTable.constant([0.600, 0.0], 1.0, 1e12)
    t4 = PhaseShiftTable.constant([0.741, 0.0], 1.0, 1e12)
    expected = 4 * math.pi * math.sin(0.600) * math.sin(0.741) / k ** 2

    assert scatterlib.effective_cross_section(t3, t4, k) == pytest.approx(expected, rel=1e-8)
    assert scatterlib.effective_cross_section(t3.truncated(0), t4.truncated(0), k) == pytest.approx(expected, rel=1e-12)


def test_elementwise_amplitude_refuses_out_of_range_k():
    table = PhaseShiftTable.constant([0.6], 1e7, 1e9)
    with pytest.raises(RangeError):
        scatterlib.scattering_amplitude_at(table, np.array([1e8, 2e9]), np.array([0.0, 0.0]))


def test_tabulation_refuses_steps_above_table_limit():
    with pytest.raises(ParameterError):
        scatterlib.tabulate_phase_shifts(_well(1.0), [1e8, 2e8], l_max=0, max_step=0.05)
