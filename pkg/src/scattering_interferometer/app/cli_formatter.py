"""CLI output formatting: human-readable summaries and JSON documents."""

from __future__ import annotations

from typing import Any

from ..core.domain.constants import ANGSTROM, LARGEST_COLD_COLLISION_SHIFT_HZ
from ..core.domain.models import CampaignParameter, CampaignResult, CollisionGeometry, FitResult, VelocityScan
from ..core.services import FringeRun, analysis, fountain
from ..core.usecases.phaseshifts import PhaseShiftReport


def _banner(title: str) -> list[str]:
    return ["=" * 80, title, "=" * 80]


def _section(title: str) -> list[str]:
    return ["", "-" * 80, title, "-" * 80]


def format_defaults(rows: list[tuple[str, Any, str]]) -> str:
    """One line per config leaf: ``path = default  description [tag]``."""
    width = max(len(path) for path, _, _ in rows)
    return "\n".join(f"{path.ljust(width)} = {value!r}  {description}" for path, value, description in rows)


def format_geometry(geometry: CollisionGeometry) -> list[str]:
    lines = [
        f"Relative velocity v_r:   {100 * geometry.v_r:.3f} cm/s",
        f"Collision energy E/k_B:  {1e6 * geometry.energy_over_kb:.2f} uK",
        f"Cloud velocities (CoM):  {100 * geometry.v_z1:+.3f} / {100 * geometry.v_z2:+.3f} cm/s",
        f"Collision time:          {geometry.t_collide:.4f} s at z = {geometry.z_collide:.4f} m",
        f"Interrogation time T:    {geometry.T:.4f} s",
        f"Detection delay:         {geometry.t_detect_delay:.4f} s (spread {100 * geometry.spread_diameter:.2f} cm)",
    ]
    for warning in geometry.warnings:
        lines.append(f"Warning: {warning}")
    return lines


def format_phase_table_report(report: PhaseShiftReport) -> str:
    """Format a phase-shift table summary.

    Args:
        report: Result of the phaseshifts use case

    Returns:
        Formatted string for display
    """
    table = report.table
    lines = _banner(f"PHASE SHIFTS {report.channel}")
    lines.append(f"\nGrid: {table.k_grid.size} points, k = {table.k_min:.4e} .. {table.k_max:.4e} 1/m, l_max = {table.l_max}")
    lines.append(f"Largest adjacent step: {table.max_adjacent_step():.4g} rad")
    for l in range(table.l_max + 1):
        lines.append(f"  l={l}: delta from {table.deltas[l, 0]:+.6f} to {table.deltas[l, -1]:+.6f} rad")
    if report.scattering_length is not None:
        a = report.scattering_length
        lines.append(f"\nScattering length: {a.value / ANGSTROM:.4f} A (relative uncertainty {a.relative_uncertainty:.1e})")
    lines.append("\n" + "=" * 80)
    return "\n".join(lines)


def format_velocity_scan(geometry: CollisionGeometry, scan: VelocityScan) -> str:
    lines = _banner("VELOCITY DISTRIBUTION")
    lines.extend(format_geometry(geometry))
    lines.extend(_section("SCAN"))
    lines.append(f"Points: {scan.v_grid.size} from {100 * scan.v_grid[0]:+.2f} to {100 * scan.v_grid[-1]:+.2f} cm/s")
    peak = int(scan.counts_no_collisions.argmax())
    lines.append(f"No-collisions peak: {100 * scan.v_grid[peak]:+.2f} cm/s")
    lines.append(f"Difference (scattered) sum: {scan.difference.sum():.4g}")
    lines.append("\n" + "=" * 80)
    return "\n".join(lines)


def format_fit_result(fit: FitResult, T: float | None = None) -> str:
    """Format a fringe fit result.

    Args:
        fit: Fit of one fringe class
        T: Interrogation time, for the equivalent frequency shift

    Returns:
        Formatted string for display
    """
    lines = _banner(f"FRINGE FIT ({fit.signal_class})")
    lines.append(f"\nPhase:     {fit.phi:+.6f} +- {fit.phi_err:.6f} rad")
    lines.append(f"Amplitude: {fit.amplitude:.6g} +- {fit.amplitude_err:.3g}")
    lines.append(f"Offset:    {fit.offset:.6g} +- {fit.offset_err:.3g}")
    lines.append(f"chi2/dof:  {fit.chi2_per_dof:.4g} ({fit.dof} dof)")
    if T is not None:
        shift = fountain.equivalent_frequency_shift(fit.phi, T)
        ratio = shift / LARGEST_COLD_COLLISION_SHIFT_HZ
        lines.append(f"As a frequency shift over T = {T:.4f} s: {1e3 * shift:+.1f} mHz ({ratio:.0f}x the largest cold-collision shift)")
    for warning in fit.warnings:
        lines.append(f"Warning: {warning}")
    lines.append("\n" + "=" * 80)
    return "\n".join(lines)


def format_fringe_run(run: FringeRun, unscattered: FitResult | None = None) -> str:
    geometry = run.prepared.geometry
    fringes = run.fringes
    lines = _banner("RAMSEY FRINGES")
    lines.extend(format_geometry(geometry))
    lines.extend(_section("SIGNALS"))
    lines.append(f"Probe velocity: {100 * fringes.probe_vz:+.2f} cm/s, {len(fringes.scattered)} detunings")
    peak_s = float(fringes.scattered.counts.max())
    peak_u = float(fringes.unscattered.counts.max())
    lines.append(f"Peak counts: scattered {peak_s:.4g}, unscattered {peak_u:.4g}")
    if peak_s > 0:
        lines.append(f"Unscattered / scattered: {peak_u / peak_s:.0f}")
    fit = run.fit
    lines.extend(_section("SCATTERED FIT"))
    lines.append(f"Phase: {fit.phi:+.6f} +- {fit.phi_err:.6f} rad, amplitude {fit.amplitude:.4g}")
    if unscattered is not None:
        diff = analysis.wrap_phase(fit.phi - unscattered.phi)
        lines.append(f"Unscattered phase: {unscattered.phi:+.6f} rad; difference {diff:+.6f} rad")
    k = geometry.wavenumber
    lines.append(f"Scattering-length resolution: {analysis.sensitivity_to_scattering_length(fit.phi_err, k) / ANGSTROM:.3g} A"
                 f" ({analysis.sensitivity_ppm(fit.phi_err, k):.3g} ppm)")
    for warning in fit.warnings:
        lines.append(f"Warning: {warning}")
    lines.append("\n" + "=" * 80)
    return "\n".join(lines)


def format_campaign_result(result: CampaignResult) -> str:
    unit = "s" if result.parameter is CampaignParameter.T else "m^-3"
    lines = _banner(f"CAMPAIGN: PHASE VS {result.parameter.value.upper()} ({result.injection.value} injection)")
    lines.append("")
    for point in result.points:
        flag = "  [low contrast]" if point.flagged else ""
        lines.append(
            f"  {point.value:.4g} {unit}: phi = {point.fit.phi:+.5f} +- {point.fit.phi_err:.5f} rad,"
            f" A = {point.fit.amplitude:.4g}{flag}"
        )
    for value in result.rejected:
        lines.append(f"  {value:.4g} {unit}: rejected (no signal)")
    lines.extend(_section("SUMMARY"))
    lines.append(f"Pooled phase: {result.pooled_phi:+.5f} +- {result.pooled_phi_err:.5f} rad")
    lines.append(f"Slope: {result.slope:.4g} +- {result.slope_err:.3g} rad/{unit}")
    lines.append(f"Flat vs linear: delta chi2 = {result.delta_chi2:.3g}, p(flat) = {result.p_value_flat:.3g}")
    if result.frequency_model_slope is not None:
        lines.append(f"Frequency-shift model: phi = {result.frequency_model_slope:.4g} rad/s * T")
    if result.amplitude_slope is not None:
        lines.append(
            f"Amplitude vs density: {result.amplitude_slope:.4g} +- {result.amplitude_slope_err:.3g} per m^-3"
            f" (R^2 = {result.amplitude_r2:.5f})"
        )
    for warning in result.warnings:
        lines.append(f"Warning: {warning}")
    lines.append("\n" + "=" * 80)
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# JSON documents
# ---------------------------------------------------------------------------


def fit_document(fit: FitResult) -> dict[str, Any]:
    return {
        "class": fit.signal_class,
        "phi_rad": fit.phi,
        "phi_err_rad": fit.phi_err,
        "amp": fit.amplitude,
        "amp_err": fit.amplitude_err,
        "offset": fit.offset,
        "offset_err": fit.offset_err,
        "chi2_per_dof": fit.chi2_per_dof,
        "dof": fit.dof,
        "converged": fit.converged,
        "covariance": fit.covariance,
        "warnings": list(fit.warnings),
    }


def campaign_document(result: CampaignResult) -> dict[str, Any]:
    return {
        "parameter": result.parameter.value,
        "injection": result.injection.value,
        "values": list(result.values),
        "points": [{"value": p.value, "flagged": p.flagged, **fit_document(p.fit)} for p in result.points],
        "pooled_phi_rad": result.pooled_phi,
        "pooled_phi_err_rad": result.pooled_phi_err,
        "slope": result.slope,
        "slope_err": result.slope_err,
        "intercept": result.intercept,
        "model_comparison": {
            "chi2_flat": result.chi2_flat,
            "chi2_linear": result.chi2_linear,
            "delta_chi2": result.delta_chi2,
            "p_value_flat": result.p_value_flat,
            "frequency_model_slope": result.frequency_model_slope,
        },
        "amplitude_slope": result.amplitude_slope,
        "amplitude_slope_err": result.amplitude_slope_err,
        "amplitude_r2": result.amplitude_r2,
        "rejected": list(result.rejected),
        "warnings": list(result.warnings),
    }
