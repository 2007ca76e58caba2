import math

import pytest

from scattering_interferometer.core.domain.constants import G_DEFAULT, HBAR, K_B, M_CS
from scattering_interferometer.core.domain.exceptions import GeometryError, ParameterError
from scattering_interferometer.core.domain.models import LaunchPlan
from scattering_interferometer.core.services import fountain


def _plan(**overrides):
    values = dict(v_launch2=2.50909, dt_launch=0.010122, z_cavity=0.305)
    values.update(overrides)
    return LaunchPlan(**values)


def test_default_launch_geometry():
    """Equal launches 10.1 ms apart: v_r = g dt, T = 0.115 s, E/k_B near 40 uK."""
    geometry = fountain.collision_geometry(_plan())

    assert geometry.v_r == pytest.approx(G_DEFAULT * 0.010122, rel=1e-12)
    assert geometry.v_r == pytest.approx(0.0992, abs=1e-4)
    assert geometry.T == pytest.approx(0.115, abs=5e-4)
    assert geometry.energy_over_kb == pytest.approx(M_CS * geometry.v_r ** 2 / (4 * K_B), rel=1e-12)
    assert 38e-6 < geometry.energy_over_kb < 41e-6
    assert geometry.v_z1 == pytest.approx(-geometry.v_r / 2)
    assert geometry.v_z2 == pytest.approx(geometry.v_r / 2)


def test_collision_happens_inside_the_ramsey_window():
    geometry = fountain.collision_geometry(_plan())

    assert geometry.t_cavity_up < geometry.t_collide < geometry.t_cavity_down
    assert geometry.t_cavity_down - geometry.t_cavity_up == pytest.approx(geometry.T, rel=1e-12)
    assert geometry.z_collide > 0.305


def test_both_clouds_are_at_the_same_height_at_collision():
    plan = _plan()
    g = fountain.collision_geometry(plan)
    z1 = g.v_launch1 * g.t_collide - 0.5 * G_DEFAULT * g.t_collide ** 2
    t2 = g.t_collide - plan.dt_launch
    z2 = plan.v_launch2 * t2 - 0.5 * G_DEFAULT * t2 ** 2
    assert z1 == pytest.approx(z2, abs=1e-12)
    assert z1 == pytest.approx(g.z_collide, abs=1e-12)


def test_detection_delay_and_spread():
    """About 130 ms to the detection region; scattered sphere about 1.3 cm across."""
    geometry = fountain.collision_geometry(_plan())
    assert geometry.t_detect_delay == pytest.approx(0.130, abs=0.005)
    assert geometry.spread_diameter == pytest.approx(geometry.v_r * geometry.t_detect_delay)
    assert geometry.t_detect == pytest.approx(geometry.t_collide + geometry.t_detect_delay)


def test_collision_wavenumber():
    geometry = fountain.collision_geometry(_plan())
    assert geometry.wavenumber == pytest.approx(M_CS / 2 * geometry.v_r / HBAR)


def test_t_collide_derives_first_launch_velocity():
    plan = _plan(t_collide=0.27)
    geometry = fountain.collision_geometry(plan)

    assert geometry.t_collide == pytest.approx(0.27, rel=1e-12)
    assert geometry.v_launch1 != pytest.approx(plan.v_launch2)


def test_clouds_that_never_meet():
    """A first cloud launched much faster than the second stays ahead."""
    with pytest.raises(GeometryError):
        fountain.collision_geometry(_plan(v_launch1=2.7))


def test_collision_below_cavity_is_rejected():
    with pytest.raises(GeometryError):
        fountain.collision_geometry(_plan(v_launch2=2.3, z_cavity=0.305))


def test_apogee_warning_when_requested():
    geometry = fountain.collision_geometry(_plan(require_after_apogee=True))
    assert not geometry.after_apogee
    assert len(geometry.warnings) == 1


def test_interrogation_time_roundtrip():
    for T in (0.115, 0.233, 0.450):
        v = fountain.launch_velocity_for_interrogation_time(T, 0.305, G_DEFAULT)
        assert fountain.interrogation_time_for_launch(v, 0.305, G_DEFAULT) == pytest.approx(T, rel=1e-12)


def test_plan_for_interrogation_time_keeps_equal_launch():
    plan = fountain.plan_for_interrogation_time(_plan(), 0.233)
    geometry = fountain.collision_geometry(plan)

    assert plan.v_launch1 is None
    assert geometry.T == pytest.approx(0.233, rel=1e-12)
    assert geometry.v_r == pytest.approx(G_DEFAULT * plan.dt_launch)


def test_plan_for_interrogation_time_keeps_launch_offset():
    """An unequal launch keeps its velocity offset, so v_r does not change with T."""
    base = _plan(v_launch1=2.52)
    before = fountain.collision_geometry(base)
    for T in (0.115, 0.233, 0.450):
        plan = fountain.plan_for_interrogation_time(base, T)
        geometry = fountain.collision_geometry(plan)

        assert plan.v_launch1 - plan.v_launch2 == pytest.approx(2.52 - 2.50909, abs=1e-12)
        assert geometry.T == pytest.approx(T, rel=1e-12)
        assert geometry.v_r == pytest.approx(before.v_r, rel=1e-9)


def test_plan_for_interrogation_time_replaces_collision_time_by_its_offset():
    base = _plan(t_collide=0.3)
    plan = fountain.plan_for_interrogation_time(base, 0.233)

    assert plan.t_collide is None
    assert fountain.collision_geometry(plan).v_r == pytest.approx(fountain.collision_geometry(base).v_r, rel=1e-9)


def test_fountain_example_interrogation_time():
    """3.4 m/s launch with the cavity 0.5 m up gives about 0.27 s above the cavity."""
    assert fountain.interrogation_time_for_launch(3.4, 0.5, G_DEFAULT) == pytest.approx(0.27, abs=2e-3)


def test_interrogation_time_increases_with_launch_velocity():
    velocities = [2.45 + 0.05 * i for i in range(30)]
    times = [fountain.interrogation_time_for_launch(v, 0.305, G_DEFAULT) for v in velocities]
    assert all(b > a for a, b in zip(times, times[1:]))


def test_launch_below_cavity_height():
    with pytest.raises(GeometryError):
        fountain.interrogation_time_for_launch(1.0, 0.305, G_DEFAULT)


def test_equivalent_frequency_shift():
    """-0.141 rad over 0.115 s is about -195 mHz."""
    shift = fountain.equivalent_frequency_shift(-0.141, 0.115)
    assert shift == pytest.approx(-0.141 / (2 * math.pi * 0.115))
    assert shift == pytest.approx(-0.195, abs=1e-3)
    with pytest.raises(ParameterError):
        fountain.equivalent_frequency_shift(0.1, 0.0)


def test_ten_cm_per_second_collides_at_forty_microkelvin():
    geometry = fountain.collision_geometry(_plan(dt_launch=0.10 / G_DEFAULT))
    assert geometry.v_r == pytest.approx(0.10, rel=1e-12)
    assert round(geometry.energy_over_kb * 1e6, 1) == 40.0
