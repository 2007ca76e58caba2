"""Fringe fitting and campaign statistics.

Fringe model: y = offset + A * (1 - cos(2 pi dnu T + phi)) / 2, with T fixed.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from typing import Any

import numpy as np
from scipy import optimize, stats

from ..domain.constants import REFERENCE_SCATTERING_LENGTH, TWO_PI
from ..domain.exceptions import FitError, ParameterError
from ..domain.models import (
    CampaignParameter,
    CampaignPoint,
    CampaignResult,
    FitResult,
    FitWindow,
    FringeData,
    InjectionMode,
)

MIN_FIT_POINTS = 8
FIT_TOLERANCE = 1e-14
GRADIENT_TOLERANCE = 1e-6
START_PHASES = (0.0, math.pi / 2, -math.pi / 2, math.pi)


def wrap_phase(phi: float) -> float:
    """Reduce to (-pi, pi]."""
    wrapped = math.remainder(phi, TWO_PI)
    return math.pi if wrapped == -math.pi else wrapped


def fringe_model(detuning_hz: np.ndarray, T: float, phi: float, amplitude: float, offset: float) -> np.ndarray:
    x = TWO_PI * np.asarray(detuning_hz, dtype=float) * T + phi
    return offset + amplitude * (1.0 - np.cos(x)) / 2.0


def check_identifiable(data: FringeData) -> None:
    if len(data) < MIN_FIT_POINTS:
        raise ParameterError("fringe_data", len(data), f"need at least {MIN_FIT_POINTS} points")
    if data.periods_spanned < 1.0 - 1e-9:
        raise ParameterError("fringe_data", data.periods_spanned, "must span at least one fringe period")


def _weights(sigma: np.ndarray) -> np.ndarray:
    positive = sigma[sigma > 0]
    if positive.size == 0:
        return np.ones_like(sigma)
    return 1.0 / np.where(sigma > 0, sigma, positive.min())


def _linear_seed(x: np.ndarray, y: np.ndarray, w: np.ndarray) -> tuple[float, float, float]:
    """(phi, A, offset) from the linear model c0 + c1 cos x + c2 sin x."""
    design = np.column_stack([np.ones_like(x), np.cos(x), np.sin(x)]) * w[:, None]
    (c0, c1, c2), *_ = np.linalg.lstsq(design, y * w, rcond=None)
    amplitude = 2.0 * math.hypot(c1, c2)
    return math.atan2(c2, -c1), amplitude, c0 - amplitude / 2.0


def fit_fringe(data: FringeData, *, window: FitWindow = FitWindow.FULL) -> FitResult:
    """Weighted least squares for (phi, A, offset) with multi-start over phi.

    Standard errors come from (J^T J)^-1 of the sigma-weighted residuals at the
    optimum. A start is accepted on a successful solver exit; ``converged``
    additionally requires a gradient small relative to |J| (|y| + 1), all in
    sigma-weighted units. With no start meeting that, the lowest-cost
    successful start is returned unconverged with a warning.
    """
    if window is FitWindow.CENTRAL:
        data = data.central()
    check_identifiable(data)

    x = TWO_PI * data.detuning_hz * data.T
    y = data.counts
    w = _weights(data.sigma)

    def residuals(p: np.ndarray) -> np.ndarray:
        return (fringe_model(data.detuning_hz, data.T, *p) - y) * w

    def jacobian(p: np.ndarray) -> np.ndarray:
        phi, amplitude, _ = p
        return np.column_stack([
            amplitude * np.sin(x + phi) / 2.0,
            (1.0 - np.cos(x + phi)) / 2.0,
            np.ones_like(x),
        ]) * w[:, None]

    a0 = max(float(np.ptp(y)), 1e-12)
    starts = [(phi0, a0, float(y.min())) for phi0 in START_PHASES]
    seed = _linear_seed(x, y, w)
    starts.append((seed[0], max(seed[1], 1e-12), seed[2]))

    data_norm = float(np.linalg.norm(y * w))
    best = None
    best_key = (True, math.inf)
    diagnostics: list[dict[str, Any]] = []
    for phi0, amp0, off0 in starts:
        res = optimize.least_squares(
            residuals,
            x0=np.array([phi0, amp0, off0]),
            jac=jacobian,
            bounds=([-np.inf, 0.0, -np.inf], [np.inf, np.inf, np.inf]),
            method="trf",
            xtol=FIT_TOLERANCE,
            ftol=FIT_TOLERANCE,
            gtol=FIT_TOLERANCE,
            max_nfev=2000,
        )
        small_gradient = float(res.optimality) <= GRADIENT_TOLERANCE * float(np.linalg.norm(res.jac)) * (data_norm + 1.0)
        diagnostics.append({
            "phi0": phi0,
            "status": int(res.status),
            "cost": float(res.cost),
            "optimality": float(res.optimality),
            "message": str(res.message),
        })
        if not res.success:
            continue
        key = (not small_gradient, float(res.cost))
        if best is None or key < best_key:
            best, best_key = res, key
    if best is None:
        raise FitError(diagnostics)
    converged = not best_key[0]

    phi, amplitude, offset = (float(v) for v in best.x)
    jac = jacobian(best.x)
    try:
        covariance = np.linalg.inv(jac.T @ jac)
    except np.linalg.LinAlgError:
        covariance = np.linalg.pinv(jac.T @ jac)
    errors = np.sqrt(np.clip(np.diag(covariance), 0.0, None))
    dof = len(data) - 3
    chi2_per_dof = 2.0 * float(best.cost) / dof

    warnings: list[str] = []
    if not converged:
        warnings.append(f"gradient {float(best.optimality):.3g} above tolerance at the best start")
    if amplitude < 2.0 * errors[1]:
        warnings.append(f"low contrast: A={amplitude:.4g} below 2 sigma ({2.0 * errors[1]:.4g})")

    return FitResult(
        phi=wrap_phase(phi),
        amplitude=amplitude,
        offset=offset,
        phi_err=float(errors[0]),
        amplitude_err=float(errors[1]),
        offset_err=float(errors[2]),
        covariance=tuple(tuple(float(c) for c in row) for row in covariance),
        chi2_per_dof=chi2_per_dof,
        dof=dof,
        converged=converged,
        signal_class=data.signal_class,
        warnings=tuple(warnings),
    )


# ---------------------------------------------------------------------------
# campaigns
# ---------------------------------------------------------------------------


def pooled_phase(fits: Sequence[FitResult]) -> tuple[float, float]:
    """Inverse-variance weighted mean of phi and its standard error."""
    errs = np.array([f.phi_err for f in fits])
    if errs.size == 0 or np.any(errs <= 0):
        raise ParameterError("phi_err", errs.tolist(), "pooling needs positive standard errors")
    w = errs ** -2
    phis = np.array([f.phi for f in fits])
    return float(np.sum(w * phis) / np.sum(w)), float(1.0 / math.sqrt(np.sum(w)))


def weighted_line(values: np.ndarray, y: np.ndarray, err: np.ndarray) -> tuple[float, float, float]:
    """(slope, slope_err, intercept) of a weighted straight line."""
    (slope, intercept), cov = np.polyfit(values, y, 1, w=1.0 / err, cov="unscaled")
    return float(slope), float(math.sqrt(cov[0, 0])), float(intercept)


def through_origin(values: np.ndarray, y: np.ndarray, err: np.ndarray) -> tuple[float, float, float]:
    """(slope, slope_err, R^2) of y = c * value."""
    w = err ** -2 if np.all(err > 0) else np.ones_like(y)
    sxx = float(np.sum(w * values * values))
    slope = float(np.sum(w * values * y)) / sxx
    residual = y - slope * values
    total = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(residual ** 2)) / total if total > 0 else 1.0
    return slope, 1.0 / math.sqrt(sxx), r2


def summarize_campaign(
    parameter: CampaignParameter,
    injection: InjectionMode,
    points: Sequence[CampaignPoint],
    *,
    rejected: Sequence[float] = (),
) -> CampaignResult:
    """Pool phi, fit phi against the varied parameter and compare flat vs linear.

    The flat model is the pooled constant; the linear model a + b * value. The
    difference in chi^2 has one degree of freedom. T campaigns also report the
    slope of the frequency-shift model phi = 2 pi dnu T fitted through the origin;
    density campaigns fit the fringe amplitude through the origin.
    """
    if len(points) < 3:
        raise ParameterError("campaign", len(points), "need at least 3 usable points")
    fits = [p.fit for p in points]
    values = np.array([p.value for p in points], dtype=float)
    phis = np.array([f.phi for f in fits])
    errs = np.array([f.phi_err for f in fits])

    pooled, pooled_err = pooled_phase(fits)
    slope, slope_err, intercept = weighted_line(values, phis, errs)
    w = errs ** -2
    chi2_flat = float(np.sum(w * (phis - pooled) ** 2))
    chi2_linear = float(np.sum(w * (phis - intercept - slope * values) ** 2))
    delta = max(chi2_flat - chi2_linear, 0.0)

    frequency_slope = None
    amp_slope = amp_err = amp_r2 = None
    if parameter is CampaignParameter.T:
        frequency_slope, _, _ = through_origin(values, phis, errs)
    else:
        amps = np.array([f.amplitude for f in fits])
        amp_errs = np.array([f.amplitude_err for f in fits])
        amp_slope, amp_err, amp_r2 = through_origin(values, amps, amp_errs)

    warnings = tuple(f"{parameter.value}={p.value:.6g}: {'; '.join(p.fit.warnings)}" for p in points if p.flagged)
    return CampaignResult(
        parameter=parameter,
        injection=injection,
        points=tuple(points),
        pooled_phi=pooled,
        pooled_phi_err=pooled_err,
        slope=slope,
        slope_err=slope_err,
        intercept=intercept,
        chi2_flat=chi2_flat,
        chi2_linear=chi2_linear,
        delta_chi2=delta,
        p_value_flat=float(stats.chi2.sf(delta, 1)),
        frequency_model_slope=frequency_slope,
        amplitude_slope=amp_slope,
        amplitude_slope_err=amp_err,
        amplitude_r2=amp_r2,
        rejected=tuple(float(v) for v in rejected),
        warnings=warnings,
    )


# ---------------------------------------------------------------------------
# scattering-length sensitivity
# ---------------------------------------------------------------------------


def sensitivity_to_scattering_length(sigma_phi: float, k: float) -> float:
    """Length uncertainty sigma_phi / k, valid where delta = -k a."""
    if not k > 0:
        raise ParameterError("k", k, "must be > 0")
    if sigma_phi < 0:
        raise ParameterError("sigma_phi", sigma_phi, "must be >= 0")
    return sigma_phi / k


def sensitivity_ppm(sigma_phi: float, k: float, reference: float = REFERENCE_SCATTERING_LENGTH) -> float:
    return 1e6 * sensitivity_to_scattering_length(sigma_phi, k) / abs(reference)
