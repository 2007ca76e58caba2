"""Partial-wave scattering: phase shifts, scattering lengths, amplitudes, cross sections.

Phase shifts are defined modulo pi (S = exp(2i delta)); a single solve returns
the principal value in (-pi/2, pi/2]. Tables unwrap along k so that adjacent
grid points stay continuous.

Every function here is pure and safe to call from several threads.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate, optimize, special

from ..domain.constants import HBAR, TABLE_MAX_STEP
from ..domain.exceptions import ParameterError, RangeError, ResonanceError, SolverError
from ..domain.models import (
    CrossSections,
    PhaseShiftTable,
    Potential,
    PotentialKind,
    ScatteringChannel,
    ScatteringLength,
)

DEFAULT_TOLERANCE = 1e-8
DEFAULT_MAX_STEPS = 1 << 22
MIN_STEPS = 256
STEPS_PER_RADIAN = 100
RENORMALIZE_ABOVE = 1e100


# ---------------------------------------------------------------------------
# kinematics helpers
# ---------------------------------------------------------------------------


def collision_wavenumber(v_r: float, reduced_mass: float) -> float:
    """k = mu v_r / hbar for a relative speed v_r."""
    return reduced_mass * v_r / HBAR


def energy_from_wavenumber(k: float, reduced_mass: float) -> float:
    return (HBAR * k) ** 2 / (2.0 * reduced_mass)


def wavenumber_from_energy(energy: float, reduced_mass: float) -> float:
    if energy < 0:
        raise ParameterError("energy", energy, "must be >= 0")
    return math.sqrt(2.0 * reduced_mass * energy) / HBAR


def _reduce(delta: float) -> float:
    """Map a phase shift onto the principal branch (-pi/2, pi/2]."""
    d = math.fmod(delta, math.pi)
    if d > math.pi / 2:
        d -= math.pi
    elif d <= -math.pi / 2:
        d += math.pi
    return d


def _branch_difference(a: float, b: float) -> float:
    return abs(_reduce(a - b))


def _riccati(l: int, x: float) -> tuple[float, float, float, float]:
    """Riccati-Bessel x j_l(x), x y_l(x) and their x-derivatives."""
    j = float(special.spherical_jn(l, x))
    jp = float(special.spherical_jn(l, x, derivative=True))
    y = float(special.spherical_yn(l, x))
    yp = float(special.spherical_yn(l, x, derivative=True))
    return x * j, j + x * jp, x * y, y + x * yp


def _match(k: float, r: float, l: int, u: float, du: float) -> float:
    """Phase shift from u and u' at r, with u ~ sin(kr - l pi/2 + delta) outside."""
    jh, jhp, nh, nhp = _riccati(l, k * r)
    num = k * jhp * u - jh * du
    den = k * nhp * u - nh * du
    return _reduce(math.atan2(num, den))


# ---------------------------------------------------------------------------
# radial integration
# ---------------------------------------------------------------------------


def _matching_radius(potential: Potential, k: float) -> float:
    if potential.cutoff is not None:
        return potential.cutoff
    return max(potential.match_factor * potential.length_scale, 10.0 / k)


def _max_local_wavenumber(potential: Potential, k: float) -> float:
    if potential.kind is PotentialKind.SQUARE_WELL:
        v_max = potential.depth
    else:
        v_max = potential.wall_factor * potential.well_depth
    return math.sqrt(k * k + 2.0 * potential.reduced_mass * v_max / HBAR ** 2)


def _numerov_phase(potential: Potential, k: float, l: int, steps: int) -> float:
    """One Numerov pass with ``steps`` intervals up to the matching radius.

    The grid runs one node beyond the matching radius so that the derivative
    there is a centred, fourth-order difference. For a square well the
    interior potential is continued across R; u' is continuous at the edge.
    """
    r_start = potential.inner_radius
    r_match = _matching_radius(potential, k)
    h = (r_match - r_start) / steps
    c = h * h / 12.0
    two_mu = 2.0 * potential.reduced_mass / HBAR ** 2
    centrifugal = float(l * (l + 1))

    r = r_start + h * np.arange(steps + 2)
    if potential.kind is PotentialKind.SQUARE_WELL:
        big_k = math.sqrt(k * k + two_mu * potential.depth)
        r = r[1:]  # node 0 sits on the origin
        with np.errstate(divide="ignore"):
            g = centrifugal / r ** 2 - big_k * big_k
        u0 = _riccati(l, big_k * r[0])[0]
        u1 = _riccati(l, big_k * r[1])[0]
        match_index = steps - 1
    else:
        g = centrifugal / r ** 2 + two_mu * potential.energy(r) - k * k
        u0, u1 = 0.0, h
        match_index = steps

    t = (1.0 - c * g).tolist()
    gl = g.tolist()
    h2 = h * h
    # w_i = (1 - c g_i) u_i obeys w_{i+1} = 2 w_i - w_{i-1} + h^2 g_i u_i
    w_back = 0.0
    w_prev = t[0] * u0
    w_cur = t[1] * u1
    for i in range(1, match_index + 1):
        w_next = 2.0 * w_cur - w_prev + h2 * gl[i] * (w_cur / t[i])
        w_back, w_prev, w_cur = w_prev, w_cur, w_next
        if abs(w_cur) > RENORMALIZE_ABOVE:
            w_back /= RENORMALIZE_ABOVE
            w_prev /= RENORMALIZE_ABOVE
            w_cur /= RENORMALIZE_ABOVE
    um = w_back / t[match_index - 1]
    u = w_prev / t[match_index]
    up = w_cur / t[match_index + 1]
    du = ((1.0 - 2.0 * c * gl[match_index + 1]) * up - (1.0 - 2.0 * c * gl[match_index - 1]) * um) / (2.0 * h)
    return _match(k, float(r[match_index]), l, u, du)


def solve_phase_shift(
    potential: Potential,
    k: float,
    l: int,
    *,
    tol: float = DEFAULT_TOLERANCE,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> float:
    """delta_l(k) by Numerov integration of the radial equation.

    The step count doubles until two successive passes agree to ``tol``
    (modulo pi); past ``max_steps`` a SolverError names (k, l).
    """
    if not (k > 0 and math.isfinite(k)):
        raise ParameterError("k", k, "must be finite and > 0")
    if l < 0 or int(l) != l:
        raise ParameterError("l", l, "must be a non-negative integer")
    if potential.kind is PotentialKind.SQUARE_WELL and potential.depth == 0:
        return 0.0

    span = _matching_radius(potential, k) - potential.inner_radius
    steps = max(MIN_STEPS, math.ceil(STEPS_PER_RADIAN * _max_local_wavenumber(potential, k) * span))
    previous: float | None = None
    change = math.inf
    while steps <= max_steps:
        delta = _numerov_phase(potential, k, int(l), steps)
        if previous is not None:
            change = _branch_difference(delta, previous)
            if change < tol:
                return delta
        previous = delta
        steps *= 2
    raise SolverError(k, int(l), steps // 2, change)


# ---------------------------------------------------------------------------
# analytic square-well oracle
# ---------------------------------------------------------------------------


def analytic_square_well_phase_shift(potential: Potential, k: float, l: int = 0) -> float:
    """Closed-form square-well delta_l from Riccati-Bessel matching at R."""
    if potential.kind is not PotentialKind.SQUARE_WELL:
        raise ParameterError("potential", potential.kind.value, "analytic phase shift needs a square well")
    if not k > 0:
        raise ParameterError("k", k, "must be > 0")
    big_k = math.sqrt(k * k + 2.0 * potential.reduced_mass * potential.depth / HBAR ** 2)
    r = potential.radius
    if l == 0:
        return _reduce(-k * r + math.atan2(k * math.tan(big_k * r), big_k))
    u, du_dx, _, _ = _riccati(l, big_k * r)
    return _match(k, r, l, u, big_k * du_dx)


def analytic_square_well_scattering_length(potential: Potential) -> float:
    """a = R (1 - tan(K0 R) / (K0 R))."""
    if potential.kind is not PotentialKind.SQUARE_WELL:
        raise ParameterError("potential", potential.kind.value, "analytic scattering length needs a square well")
    x = math.sqrt(2.0 * potential.reduced_mass * potential.depth) / HBAR * potential.radius
    if x == 0:
        return 0.0
    return potential.radius * (1.0 - math.tan(x) / x)


def square_well_depth_for_scattering_length(a: float, radius: float, reduced_mass: float) -> float:
    """Shallowest well depth giving scattering length ``a``.

    a < 0 needs K0 R in (0, pi/2), a > R needs (pi/2, pi) and 0 <= a <= R
    needs a bound state, (pi, 3 pi/2).
    """
    if not radius > 0:
        raise ParameterError("radius", radius, "must be > 0")
    ratio = a / radius
    eps = 1e-12
    if ratio < 0:
        bracket = (eps, math.pi / 2 - eps)
    elif ratio > 1:
        bracket = (math.pi / 2 + eps, math.pi - eps)
    else:
        bracket = (math.pi + eps, 1.5 * math.pi - eps)

    def residual(x: float) -> float:
        return 1.0 - math.tan(x) / x - ratio

    x = optimize.brentq(residual, *bracket, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    big_k0 = x / radius
    return (HBAR * big_k0) ** 2 / (2.0 * reduced_mass)


# ---------------------------------------------------------------------------
# scattering length
# ---------------------------------------------------------------------------


def scattering_length(
    potential: Potential,
    *,
    rel_tol: float = 1e-6,
    max_levels: int = 16,
    columns: int = 3,
) -> ScatteringLength:
    """a = lim_{k -> 0} -delta_0(k)/k by Richardson extrapolation.

    The sequence uses -tan(delta_0)/k at k_j = k0 / 2**j, which shares the
    limit, is even in k and insensitive to the pi ambiguity of delta.
    """
    if potential.kind is PotentialKind.SQUARE_WELL and potential.depth == 0:
        return ScatteringLength(value=0.0, relative_uncertainty=0.0, levels=0)

    scale = potential.length_scale
    k0 = 0.05 / scale
    table: list[list[float]] = []
    estimates: list[float] = []
    for j in range(max_levels):
        k = k0 / 2 ** j
        tol = max(1e-11, 1e-9 * k * scale)
        delta = solve_phase_shift(potential, k, 0, tol=tol)
        row = [-math.tan(delta) / k]
        for m in range(1, min(j, columns) + 1):
            factor = 4 ** m - 1
            row.append(row[m - 1] + (row[m - 1] - table[j - 1][m - 1]) / factor)
        table.append(row)
        estimates.append(row[-1])
        if j > columns:
            current, before = estimates[-1], estimates[-2]
            spread = abs(current - before)
            if spread <= rel_tol * abs(current) or spread <= 1e-12 * scale:
                rel = spread / abs(current) if current != 0 else 0.0
                return ScatteringLength(value=current, relative_uncertainty=rel, levels=j + 1)
    raise ResonanceError(estimates)


# ---------------------------------------------------------------------------
# tables
# ---------------------------------------------------------------------------


def tabulate_phase_shifts(
    potential: Potential,
    k_grid: np.ndarray | list[float],
    l_max: int,
    *,
    max_step: float = TABLE_MAX_STEP,
    max_points: int = 20_000,
    tol: float = DEFAULT_TOLERANCE,
) -> PhaseShiftTable:
    """Solve every (k, l), unwrap along k and refine until adjacent steps < max_step."""
    ks = sorted({float(k) for k in np.atleast_1d(k_grid)})
    if not ks:
        raise ParameterError("k_grid", ks, "must not be empty")
    if l_max < 0:
        raise ParameterError("l_max", l_max, "must be >= 0")
    if not 0 < max_step <= TABLE_MAX_STEP:
        raise ParameterError("max_step", max_step, f"must lie in (0, {TABLE_MAX_STEP}]")
    solved: dict[float, list[float]] = {}

    def solve_all(points: list[float]) -> None:
        for k in points:
            if k not in solved:
                solved[k] = [solve_phase_shift(potential, k, l, tol=tol) for l in range(l_max + 1)]

    solve_all(ks)
    while True:
        k_arr = np.array(ks)
        raw = np.array([solved[k] for k in ks]).T
        deltas = np.unwrap(raw, period=math.pi, axis=1)
        if k_arr.size < 2:
            break
        steps = np.max(np.abs(np.diff(deltas, axis=1)), axis=0)
        coarse = np.nonzero(steps >= max_step)[0]
        if coarse.size == 0:
            break
        extra = [0.5 * (ks[i] + ks[i + 1]) for i in coarse]
        if len(ks) + len(extra) > max_points:
            raise ParameterError("k_grid", len(ks) + len(extra), f"refinement exceeds {max_points} points")
        solve_all(extra)
        ks = sorted(ks + extra)
    return PhaseShiftTable(k_grid=k_arr, deltas=deltas)


def resolve_channel_table(
    channel: ScatteringChannel,
    k_min: float,
    k_max: float,
    l_max: int,
    *,
    points: int = 9,
) -> PhaseShiftTable:
    """Table covering [k_min, k_max] for a channel, truncated to l_max."""
    if channel.table is not None:
        table = channel.table
        if l_max < table.l_max:
            table = table.truncated(l_max)
        return table
    grid = np.linspace(k_min, k_max, points) if k_max > k_min else np.array([k_min])
    return tabulate_phase_shifts(channel.potential, grid, l_max)


# ---------------------------------------------------------------------------
# amplitudes and cross sections
# ---------------------------------------------------------------------------


def scattering_amplitude(table: PhaseShiftTable, k: float, theta: float | np.ndarray) -> complex | np.ndarray:
    """f(theta) = (1/k) sum_l (2l+1) exp(i delta_l) sin(delta_l) P_l(cos theta)."""
    deltas = table.delta_at(k)
    theta_arr = np.asarray(theta, dtype=float)
    x = np.cos(theta_arr)
    f = np.zeros(theta_arr.shape, dtype=complex)
    for l, delta in enumerate(deltas):
        if delta == 0.0:
            continue
        f = f + (2 * l + 1) * np.exp(1j * delta) * math.sin(delta) * special.eval_legendre(l, x)
    f = f / k
    return complex(f) if f.ndim == 0 else f


def scattering_amplitude_at(table: PhaseShiftTable, k: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Elementwise f(k_i, theta_i) for per-pair wavenumbers."""
    k = np.asarray(k, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if k.size and (k.min() < table.k_min or k.max() > table.k_max):
        bad = k.min() if k.min() < table.k_min else k.max()
        raise RangeError(float(bad), table.k_min, table.k_max)
    x = np.cos(theta)
    f = np.zeros(np.broadcast(k, theta).shape, dtype=complex)
    for l in range(table.l_max + 1):
        if table.k_grid.size == 1:
            delta = np.full(k.shape, table.deltas[l, 0])
        else:
            delta = np.interp(k, table.k_grid, table.deltas[l])
        f = f + (2 * l + 1) * np.exp(1j * delta) * np.sin(delta) * special.eval_legendre(l, x)
    return f / k


def cross_sections(table: PhaseShiftTable, k: float) -> CrossSections:
    deltas = table.delta_at(k)
    partial = tuple(float(4 * math.pi / k ** 2 * (2 * l + 1) * math.sin(d) ** 2) for l, d in enumerate(deltas))

    def differential(theta: float | np.ndarray) -> np.ndarray:
        return np.abs(scattering_amplitude(table, k, theta)) ** 2

    return CrossSections(k=k, partial=partial, total=float(math.fsum(partial)), differential=differential)


def coherence_factor(
    table3: PhaseShiftTable,
    table4: PhaseShiftTable,
    k: float,
    theta: float | np.ndarray,
) -> complex | np.ndarray:
    """c = f3(theta) conj(f4(theta)); arg c = delta3 - delta4 for s-wave only tables."""
    f3 = scattering_amplitude(table3, k, theta)
    f4 = scattering_amplitude(table4, k, theta)
    return f3 * np.conj(f4)


def effective_cross_section(table3: PhaseShiftTable, table4: PhaseShiftTable, k: float) -> float:
    """Integral of |f3 f4| over the sphere (m^2)."""
    if table3.l_max == 0 and table4.l_max == 0:
        return float(4 * math.pi * abs(scattering_amplitude(table3, k, 0.0)) * abs(scattering_amplitude(table4, k, 0.0)))

    def integrand(mu: float) -> float:
        theta = math.acos(mu)
        return float(abs(coherence_factor(table3, table4, k, theta)))

    value, _ = integrate.quad(integrand, -1.0, 1.0, limit=200)
    return 2 * math.pi * value
