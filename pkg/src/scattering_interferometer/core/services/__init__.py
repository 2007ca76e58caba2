from __future__ import annotations

from . import analysis, clock, fountain, scatterlib
from .collider import Collider, wavenumber_range
from .experiment import ExperimentRunner, FringeRun, PreparedRun

__all__ = [
    "analysis",
    "clock",
    "fountain",
    "scatterlib",
    "Collider",
    "wavenumber_range",
    "ExperimentRunner",
    "FringeRun",
    "PreparedRun",
]
