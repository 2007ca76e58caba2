"""Domain exceptions for scattering_interferometer."""

from __future__ import annotations

from typing import Any


class InterferometerError(Exception):
    """Base class for every error raised by the simulator core."""


class ParameterError(InterferometerError, ValueError):
    """Raised when an argument or a domain type invariant is violated."""

    def __init__(self, name: str, value: Any, reason: str) -> None:
        self.name = name
        self.value = value
        self.reason = reason
        super().__init__(f"Invalid {name}={value!r}: {reason}")


class ConfigurationError(InterferometerError):
    """Raised when a run set-up is inconsistent as a whole.

    Examples are a sample budget smaller than the requested sample count or a
    Ramsey sequence requested for a cloud that is not in a clock superposition.
    """

    def __init__(self, message: str, *, field: str | None = None) -> None:
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)


class GeometryError(InterferometerError):
    """Raised when fountain kinematics cannot produce the requested event."""

    def __init__(self, message: str, **values: float) -> None:
        self.values = values
        if values:
            details = ", ".join(f"{k}={v:.6g}" for k, v in values.items())
            message = f"{message} ({details})"
        super().__init__(message)


class SolverError(InterferometerError):
    """Raised when radial integration does not converge under refinement."""

    def __init__(self, k: float, l: int, steps: int, change: float) -> None:
        self.k = k
        self.l = l
        self.steps = steps
        self.change = change
        super().__init__(
            f"Phase shift did not converge for k={k:.6g} 1/m, l={l} "
            f"(last change {change:.3g} rad at {steps} steps)"
        )


class ResonanceError(InterferometerError):
    """Raised when the low-energy extrapolation of -delta/k diverges."""

    def __init__(self, estimates: list[float], message: str | None = None) -> None:
        self.estimates = estimates
        if message is None:
            tail = ", ".join(f"{a:.6g}" for a in estimates[-3:])
            message = f"Scattering length extrapolation did not converge (last estimates: {tail} m)"
        super().__init__(message)


class RangeError(InterferometerError, ValueError):
    """Raised when a wavenumber lies outside a phase-shift table grid."""

    def __init__(self, k: float, k_min: float, k_max: float) -> None:
        self.k = k
        self.k_min = k_min
        self.k_max = k_max
        super().__init__(f"k={k:.6g} 1/m outside table range [{k_min:.6g}, {k_max:.6g}]")


class FitError(InterferometerError):
    """Raised when no start of the fringe fit converged."""

    def __init__(self, diagnostics: list[dict[str, Any]]) -> None:
        self.diagnostics = diagnostics
        summary = "; ".join(
            f"start phi0={d.get('phi0', float('nan')):+.3f}: {d.get('message', 'failed')}"
            for d in diagnostics
        )
        super().__init__(f"Fringe fit failed from all starts: {summary}")
