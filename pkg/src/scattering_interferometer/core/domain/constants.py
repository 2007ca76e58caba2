"""Physical constants shared by every module.

Gravity and the caesium mass are defaults only; the experiment config may
override them per run.
"""

from __future__ import annotations

import math

M_CS = 2.2069468e-25  # kg
HBAR = 1.054571817e-34  # J s
K_B = 1.380649e-23  # J/K
G_DEFAULT = 9.80  # m/s^2

CLOCK_FREQUENCY_HZ = 9.192631770e9

# Cs-Cs collisions: mu = m_Cs / 2 exactly
MU_CS = M_CS / 2.0

ANGSTROM = 1e-10

# Largest cold-collision clock frequency shift reported for a fountain clock.
LARGEST_COLD_COLLISION_SHIFT_HZ = -5.5e-3

REFERENCE_SCATTERING_LENGTH = 1291.2 * ANGSTROM

# Largest step of a tabulated phase shift between adjacent grid points (rad).
TABLE_MAX_STEP = 0.01

TWO_PI = 2.0 * math.pi
