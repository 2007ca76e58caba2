"""Two-level Ramsey interferometry on the |3,0> <-> |4,0> clock transition.

State vectors are (c3, c4). Free evolution in the rotating frame is
diag(exp(i D t / 2), exp(-i D t / 2)) with D = 2 pi detuning, so an ideal
sequence starting in |3,0> ends with P3 = (1 - cos(D T + phi))/2.
"""

from __future__ import annotations

import math

import numpy as np

from ..domain.constants import TWO_PI
from ..domain.exceptions import ParameterError
from ..domain.models import (
    ClockStateAmplitudes,
    DetectState,
    PulseKind,
    PulseModel,
    RamseySequence,
    ScatteredBranch,
)


def _pulse(model: PulseModel, detuning_rad: np.ndarray, phase: float) -> np.ndarray:
    """Pulse propagators with shape (n, 2, 2) about the axis at azimuth ``phase``."""
    n = detuning_rad.size
    e_minus = np.exp(-1j * phase)
    e_plus = np.exp(1j * phase)
    if model.kind is PulseKind.IDEAL:
        u = np.empty((n, 2, 2), dtype=complex)
        u[:, 0, 0] = 1.0
        u[:, 0, 1] = -1j * e_minus
        u[:, 1, 0] = -1j * e_plus
        u[:, 1, 1] = 1.0
        return u / math.sqrt(2.0)

    omega = model.rabi_frequency
    gen = np.sqrt(omega * omega + detuning_rad * detuning_rad)
    half = 0.5 * gen * model.pulse_duration
    cos_h = np.cos(half)
    sin_h = np.sin(half) / gen
    u = np.empty((n, 2, 2), dtype=complex)
    u[:, 0, 0] = cos_h + 1j * sin_h * detuning_rad
    u[:, 1, 1] = cos_h - 1j * sin_h * detuning_rad
    u[:, 0, 1] = -1j * sin_h * omega * e_minus
    u[:, 1, 0] = -1j * sin_h * omega * e_plus
    return u


def _free(detuning_rad: np.ndarray, duration: float) -> np.ndarray:
    """Diagonal of the free propagator, shape (n, 2)."""
    half = 0.5 * detuning_rad * duration
    return np.stack([np.exp(1j * half), np.exp(-1j * half)], axis=-1)


def _free_segments(seq: RamseySequence) -> tuple[float, float]:
    """Free precession before and after the phase insertion."""
    tau = seq.pulse.pulse_duration if seq.pulse.kind is PulseKind.FINITE_RABI else 0.0
    free = seq.T - tau
    insert_at = 0.5 * seq.T if seq.insertion_time is None else seq.insertion_time
    before = min(max(insert_at - 0.5 * tau, 0.0), free)
    return before, free - before


def _as_grid(detunings: np.ndarray | list[float] | float) -> np.ndarray:
    grid = np.atleast_1d(np.asarray(detunings, dtype=float))
    if grid.size == 0:
        raise ParameterError("detuning_grid", grid.size, "must not be empty")
    if not np.all(np.isfinite(grid)):
        raise ParameterError("detuning_grid", "...", "must be finite")
    return grid


def ramsey_coefficients(
    seq: RamseySequence,
    detunings: np.ndarray | list[float] | float,
    detect: DetectState = DetectState.P3,
) -> tuple[np.ndarray, np.ndarray]:
    """(a, b) with final amplitude a exp(i phi) + b for a phase phi inserted on c3.

    ``seq.inserted_phase`` is not applied here; ``seq.frequency_shift_hz`` is,
    on the free precession only.
    """
    grid = _as_grid(detunings)
    d_pulse = TWO_PI * grid
    d_free = TWO_PI * (grid + seq.frequency_shift_hz)
    before, after = _free_segments(seq)

    p1 = _pulse(seq.pulse, d_pulse, 0.0)
    x = p1[:, :, 0] * _free(d_free, before)  # state just before insertion
    p2 = _pulse(seq.pulse, d_pulse, seq.pulse_phase_offset)
    f2 = _free(d_free, after)
    row = 0 if detect is DetectState.P3 else 1
    a = p2[:, row, 0] * f2[:, 0] * x[:, 0]
    b = p2[:, row, 1] * f2[:, 1] * x[:, 1]
    return a, b


def ramsey_amplitudes(seq: RamseySequence, inserted_phase: float | None = None) -> ClockStateAmplitudes:
    """Final (c3, c4) of one atom that starts in |3,0>."""
    phi = seq.inserted_phase if inserted_phase is None else inserted_phase
    a3, b3 = ramsey_coefficients(seq, seq.detuning_hz, DetectState.P3)
    a4, b4 = ramsey_coefficients(seq, seq.detuning_hz, DetectState.P4)
    rot = np.exp(1j * phi)
    return ClockStateAmplitudes(c3=complex(a3[0] * rot + b3[0]), c4=complex(a4[0] * rot + b4[0]))


def ramsey_probability(seq: RamseySequence, detect: DetectState = DetectState.P3) -> float:
    a, b = ramsey_coefficients(seq, seq.detuning_hz, detect)
    p = abs(a[0] * np.exp(1j * seq.inserted_phase) + b[0]) ** 2
    return float(min(max(p, 0.0), 1.0))


def fringe_scan(
    seq: RamseySequence,
    detunings: np.ndarray | list[float],
    detect: DetectState = DetectState.P3,
) -> np.ndarray:
    """Rows of (detuning_hz, probability) over an ascending grid."""
    grid = _as_grid(detunings)
    if grid.size > 1 and np.any(np.diff(grid) <= 0):
        raise ParameterError("detuning_grid", "...", "must be strictly ascending")
    a, b = ramsey_coefficients(seq, grid, detect)
    p = np.clip(np.abs(a * np.exp(1j * seq.inserted_phase) + b) ** 2, 0.0, 1.0)
    return np.column_stack([grid, p])


def ensemble_signal(
    a: np.ndarray,
    b: np.ndarray,
    weight_sum: float,
    phasor_sum: complex,
) -> np.ndarray:
    """Sum_j w_j |a exp(i phi_j) + b|^2 given W = sum w_j and S = sum w_j exp(i phi_j)."""
    value = weight_sum * (np.abs(a) ** 2 + np.abs(b) ** 2) + 2.0 * np.real(a * np.conj(b) * phasor_sum)
    return np.maximum(value, 0.0)


def insert_scattering_phase(
    amps: ClockStateAmplitudes,
    c: complex | np.ndarray,
    weight: float | np.ndarray = 1.0,
    reference: float = 1.0,
) -> ScatteredBranch:
    """Advance c3 by arg(c); the branch weight scales with |c| / reference.

    ``reference`` normalises |c| = |f3||f4| (e.g. to its angular mean), so the
    caller decides what the weight counts. c = 0 gives a zero-weight branch.
    """
    c = np.asarray(c, dtype=complex)
    magnitude = np.abs(c)
    rotation = np.where(magnitude > 0, c / np.where(magnitude > 0, magnitude, 1.0), 1.0)
    c3 = amps.c3 * rotation
    out_weight = np.asarray(weight, dtype=float) * magnitude / reference
    if np.ndim(c3) == 0:
        c3 = complex(c3)
        out_weight = float(out_weight)
    return ScatteredBranch(amplitudes=ClockStateAmplitudes(c3=c3, c4=amps.c4), weight=out_weight)
