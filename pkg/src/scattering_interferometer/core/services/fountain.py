"""Juggling-fountain kinematics under uniform gravity.

Cloud 1 leaves z = 0 at t = 0 with v_launch1, Cloud 2 at t = dt_launch with
v_launch2. T is measured between pulse centres, i.e. between the upward and
downward cavity crossings of Cloud 2.
"""

from __future__ import annotations

import math

from ..domain.constants import K_B, M_CS, TWO_PI
from ..domain.exceptions import GeometryError, ParameterError
from ..domain.models import CollisionGeometry, LaunchPlan


def interrogation_time_for_launch(v_launch: float, z_cavity: float, g: float) -> float:
    """Ballistic time spent above the cavity: T = 2 sqrt(v^2 - 2 g z) / g."""
    if not g > 0:
        raise ParameterError("g", g, "must be > 0")
    clearance = v_launch * v_launch - 2.0 * g * z_cavity
    if clearance < -1e-12 * v_launch * v_launch:
        raise GeometryError("Cloud does not reach the cavity", v_launch=v_launch, z_cavity=z_cavity)
    return 2.0 * math.sqrt(max(clearance, 0.0)) / g


def launch_velocity_for_interrogation_time(T: float, z_cavity: float, g: float) -> float:
    if not T >= 0:
        raise ParameterError("T", T, "must be >= 0")
    return math.sqrt(2.0 * g * z_cavity + (0.5 * g * T) ** 2)


def launch_velocity_for_collision(v_launch2: float, dt_launch: float, t_collide: float, g: float) -> float:
    """Cloud 1 launch velocity that makes both clouds meet at ``t_collide``."""
    if not t_collide > dt_launch:
        raise ParameterError("t_collide", t_collide, "must be after the second launch")
    return v_launch2 + g * dt_launch - (v_launch2 * dt_launch + 0.5 * g * dt_launch ** 2) / t_collide


def plan_for_interrogation_time(plan: LaunchPlan, T: float) -> LaunchPlan:
    """Plan whose Cloud 2 spends ``T`` above the cavity.

    The Cloud 1 launch keeps its velocity offset from Cloud 2, so v_r and the
    collision energy stay those of ``plan``. A requested ``t_collide`` is
    replaced by the offset it implied.
    """
    v = launch_velocity_for_interrogation_time(T, plan.z_cavity, plan.g)
    return plan.with_launch_velocity(v, _resolve_cloud1_velocity(plan) - plan.v_launch2)


def equivalent_frequency_shift(phi: float, T: float) -> float:
    """Frequency shift (Hz) that accumulates phase ``phi`` over ``T``."""
    if not T > 0:
        raise ParameterError("T", T, "must be > 0")
    return phi / (TWO_PI * T)


def _resolve_cloud1_velocity(plan: LaunchPlan) -> float:
    if plan.t_collide is not None:
        v1 = launch_velocity_for_collision(plan.v_launch2, plan.dt_launch, plan.t_collide, plan.g)
        lo, hi = plan.velocity_band
        if not lo <= v1 <= hi:
            raise ParameterError("v_launch1", v1, f"derived from t_collide, outside launch band [{lo}, {hi}] m/s")
        return v1
    return plan.v_launch2 if plan.v_launch1 is None else plan.v_launch1


def collision_geometry(plan: LaunchPlan, mass: float = M_CS) -> CollisionGeometry:
    g = plan.g
    dt = plan.dt_launch
    v2 = plan.v_launch2
    v1 = _resolve_cloud1_velocity(plan)

    v_r = v2 + g * dt - v1
    if not v_r > 0:
        raise GeometryError("Clouds never meet: Cloud 2 does not catch up", v_launch1=v1, v_launch2=v2)
    t_c = (v2 * dt + 0.5 * g * dt * dt) / v_r
    z_c = v1 * t_c - 0.5 * g * t_c * t_c
    if z_c <= plan.z_cavity:
        raise GeometryError("Clouds meet below the cavity", z_collide=z_c, z_cavity=plan.z_cavity)

    T = interrogation_time_for_launch(v2, plan.z_cavity, g)
    root = 0.5 * g * T
    t_up = dt + (v2 - root) / g
    t_down = dt + (v2 + root) / g
    if not t_up <= t_c <= t_down:
        raise GeometryError("Collision outside the Ramsey window", t_collide=t_c, t_up=t_up, t_down=t_down)

    u1 = v1 - g * t_c
    u2 = v2 - g * (t_c - dt)
    w = 0.5 * (u1 + u2)
    fall = z_c - plan.z_cavity + plan.detection_drop
    t_detect_delay = (w + math.sqrt(w * w + 2.0 * g * fall)) / g

    after_apogee = t_c >= max(v1 / g, dt + v2 / g)
    warnings: tuple[str, ...] = ()
    if plan.require_after_apogee and not after_apogee:
        warnings = (f"collision at t={t_c:.6f} s happens before both clouds reach apogee",)

    energy = mass * v_r * v_r / 4.0
    return CollisionGeometry(
        v_r=v_r,
        energy=energy,
        energy_over_kb=energy / K_B,
        v_z1=-0.5 * v_r,
        v_z2=0.5 * v_r,
        t_collide=t_c,
        T=T,
        t_detect_delay=t_detect_delay,
        spread_diameter=v_r * t_detect_delay,
        z_collide=z_c,
        t_cavity_up=t_up,
        t_cavity_down=t_down,
        v_launch1=v1,
        v_launch2=v2,
        dt_launch=dt,
        mass=mass,
        after_apogee=after_apogee,
        warnings=warnings,
    )

