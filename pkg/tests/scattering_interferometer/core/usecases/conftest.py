"""Fakes for use case tests."""
from __future__ import annotations

import numpy as np

from scattering_interferometer.core.domain.models import (
    CampaignParameter,
    CampaignResult,
    FitResult,
    InjectionMode,
    VelocityScan,
)


def make_fit(phi=-0.141, phi_err=0.01, signal_class="scattered"):
    return FitResult(
        phi=phi,
        amplitude=100.0,
        offset=1.0,
        phi_err=phi_err,
        amplitude_err=1.0,
        offset_err=0.5,
        covariance=((phi_err ** 2, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 0.25)),
        chi2_per_dof=1.0,
        dof=38,
        converged=True,
        signal_class=signal_class,
    )


class FakeRunner:
    """Records calls instead of running the simulation."""

    def __init__(self):
        self.calls = []

    def velocity_scan(self, scenario):
        self.calls.append(("velocity_scan", scenario))
        grid = np.linspace(-0.01, 0.01, 3)
        scan = VelocityScan(
            v_grid=grid,
            counts_collisions=np.ones(3),
            counts_no_collisions=np.zeros(3),
            background_collisions=np.zeros(3),
            background_no_collisions=np.zeros(3),
        )
        return "prepared", scan

    def fringes(self, scenario, probe_vz=0.0, seed=None, noise_seed=None):
        self.calls.append(("fringes", scenario, probe_vz))
        return "fringe-run"

    def fit(self, data, window):
        self.calls.append(("fit", data, window))
        return make_fit(signal_class=data.signal_class)

    def campaign(self, scenario, parameter, values, *, injection=InjectionMode.PHASE, frequency_shift_hz=0.0, seed=None):
        self.calls.append(("campaign", parameter, list(values), injection, frequency_shift_hz))
        return CampaignResult(
            parameter=CampaignParameter(parameter),
            injection=injection,
            points=(),
            pooled_phi=-0.141,
            pooled_phi_err=0.01,
            slope=0.0,
            slope_err=0.01,
            intercept=-0.141,
            chi2_flat=0.0,
            chi2_linear=0.0,
            delta_chi2=0.0,
            p_value_flat=1.0,
        )
