from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .constants import G_DEFAULT, HBAR, K_B, M_CS, MU_CS, TABLE_MAX_STEP
from .exceptions import ParameterError, RangeError


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


# ---------------------------------------------------------------------------
# scatterlib
# ---------------------------------------------------------------------------


class PotentialKind(str, Enum):
    SQUARE_WELL = "square_well"
    LENNARD_JONES = "lennard_jones"


@dataclass(frozen=True)
class Potential:
    """Model interaction potential plus the reduced mass of the colliding pair.

    SquareWell: V(r) = -depth for r <= radius, 0 outside (depth > 0 attracts).
    LennardJones: V(r) = c12 / r**12 - c6 / r**6.
    """
    kind: PotentialKind
    reduced_mass: float = MU_CS
    depth: float = 0.0
    radius: float = 0.0
    c12: float = 0.0
    c6: float = 0.0
    wall_factor: float = 100.0  # LennardJones inner start: V(r_min) = wall_factor * well depth
    match_factor: float = 20.0  # LennardJones r_match >= match_factor * length_scale

    def __post_init__(self) -> None:
        if not self.reduced_mass > 0:
            raise ParameterError("reduced_mass", self.reduced_mass, "must be > 0")
        if self.kind is PotentialKind.SQUARE_WELL:
            if not self.radius > 0:
                raise ParameterError("radius", self.radius, "must be > 0")
            if not self.depth >= 0:
                raise ParameterError("depth", self.depth, "must be >= 0")
        else:
            if not self.c6 > 0:
                raise ParameterError("c6", self.c6, "must be > 0")
            if not self.c12 > 0:
                raise ParameterError("c12", self.c12, "must be > 0")
            if not self.wall_factor > 0:
                raise ParameterError("wall_factor", self.wall_factor, "must be > 0")

    @classmethod
    def square_well(cls, depth: float, radius: float, reduced_mass: float = MU_CS) -> "Potential":
        return cls(kind=PotentialKind.SQUARE_WELL, depth=depth, radius=radius, reduced_mass=reduced_mass)

    @classmethod
    def lennard_jones(cls, c12: float, c6: float, reduced_mass: float = MU_CS, **kwargs: float) -> "Potential":
        return cls(kind=PotentialKind.LENNARD_JONES, c12=c12, c6=c6, reduced_mass=reduced_mass, **kwargs)

    @property
    def cutoff(self) -> float | None:
        """Radius beyond which the potential vanishes identically, if any."""
        return self.radius if self.kind is PotentialKind.SQUARE_WELL else None

    @property
    def length_scale(self) -> float:
        if self.kind is PotentialKind.SQUARE_WELL:
            return self.radius
        return (self.c12 / self.c6) ** (1.0 / 6.0)

    @property
    def well_depth(self) -> float:
        if self.kind is PotentialKind.SQUARE_WELL:
            return self.depth
        return self.c6 ** 2 / (4.0 * self.c12)

    @property
    def inner_radius(self) -> float:
        """Start of the radial integration."""
        if self.kind is PotentialKind.SQUARE_WELL:
            return 0.0
        # V(r) = wall_factor * depth on the repulsive wall, closed form in x = r**-6
        x = self.c6 * (1.0 + math.sqrt(1.0 + self.wall_factor)) / (2.0 * self.c12)
        return x ** (-1.0 / 6.0)

    def energy(self, r: np.ndarray | float) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if self.kind is PotentialKind.SQUARE_WELL:
            return np.where(r <= self.radius, -self.depth, 0.0)
        inv6 = r ** -6
        return self.c12 * inv6 * inv6 - self.c6 * inv6


@dataclass(frozen=True, eq=False)
class PhaseShiftTable:
    """delta_l(k) on a strictly increasing wavenumber grid.

    ``deltas[l, i]`` is the phase shift (rad) of partial wave ``l`` at
    ``k_grid[i]``; rows exist for l = 0 .. l_max.
    """
    k_grid: np.ndarray
    deltas: np.ndarray

    def __post_init__(self) -> None:
        k = _frozen_array(self.k_grid)
        d = _frozen_array(np.atleast_2d(self.deltas))
        if k.ndim != 1 or k.size == 0:
            raise ParameterError("k_grid", k.shape, "must be a non-empty 1-D array")
        if d.shape[1] != k.size:
            raise ParameterError("deltas", d.shape, f"second axis must match k_grid ({k.size})")
        if not np.all(np.isfinite(k)) or np.any(k <= 0):
            raise ParameterError("k_grid", "...", "all wavenumbers must be finite and > 0")
        if np.any(np.diff(k) <= 0):
            raise ParameterError("k_grid", "...", "must be strictly increasing")
        if not np.all(np.isfinite(d)):
            raise ParameterError("deltas", "...", "must be finite")
        if d.shape[1] > 1:
            step = float(np.max(np.abs(np.diff(d, axis=1))))
            if step >= TABLE_MAX_STEP:
                raise ParameterError(
                    "deltas", step, f"adjacent phase shifts differ by >= {TABLE_MAX_STEP} rad; refine the grid"
                )
        object.__setattr__(self, "k_grid", k)
        object.__setattr__(self, "deltas", d)

    @classmethod
    def constant(cls, deltas: list[float] | tuple[float, ...], k_min: float, k_max: float) -> "PhaseShiftTable":
        """Injected table: delta_l independent of k over [k_min, k_max]."""
        if not k_max > k_min:
            raise ParameterError("k_max", k_max, "must exceed k_min")
        d = np.asarray(deltas, dtype=float).reshape(-1, 1)
        return cls(k_grid=np.array([k_min, k_max]), deltas=np.hstack([d, d]))

    @property
    def l_max(self) -> int:
        return self.deltas.shape[0] - 1

    @property
    def k_min(self) -> float:
        return float(self.k_grid[0])

    @property
    def k_max(self) -> float:
        return float(self.k_grid[-1])

    def covers(self, k: float) -> bool:
        return self.k_min <= k <= self.k_max

    def delta_at(self, k: float) -> np.ndarray:
        """Linearly interpolated delta_l(k) for every l; no extrapolation."""
        if not self.covers(k):
            raise RangeError(k, self.k_min, self.k_max)
        if self.k_grid.size == 1:
            return self.deltas[:, 0].copy()
        return np.array([np.interp(k, self.k_grid, row) for row in self.deltas])

    def max_adjacent_step(self) -> float:
        if self.k_grid.size < 2:
            return 0.0
        return float(np.max(np.abs(np.diff(self.deltas, axis=1))))

    def truncated(self, l_max: int) -> "PhaseShiftTable":
        return PhaseShiftTable(k_grid=self.k_grid, deltas=self.deltas[: l_max + 1])


@dataclass(frozen=True)
class ScatteringChannel:
    """One clock state colliding with the target state, e.g. "|3,0>+|4,4>"."""
    label: str
    potential: Potential | None = None
    table: PhaseShiftTable | None = None

    def __post_init__(self) -> None:
        if (self.potential is None) == (self.table is None):
            raise ParameterError("channel", self.label, "exactly one of potential / table must be given")


@dataclass(frozen=True)
class CrossSections:
    k: float
    partial: tuple[float, ...]
    total: float
    differential: Callable[[float | np.ndarray], np.ndarray] = field(repr=False, compare=False)
    """d(sigma)/d(Omega) = |f(theta)|**2 in m^2/sr."""


@dataclass(frozen=True)
class ScatteringLength:
    value: float  # m
    relative_uncertainty: float
    levels: int


# ---------------------------------------------------------------------------
# fountain
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LaunchPlan:
    """Launch schedule of the juggling fountain.

    Cloud 1 leaves at t = 0, Cloud 2 at t = dt_launch, both from z = 0.
    ``v_launch1=None`` means an equal launch unless ``t_collide`` is given,
    in which case the Cloud 1 velocity is derived from the requested time.
    """
    v_launch2: float
    dt_launch: float
    z_cavity: float
    v_launch1: float | None = None
    g: float = G_DEFAULT
    pulse_duration: float = 5e-3
    t_collide: float | None = None
    velocity_band: tuple[float, float] = (2.0, 4.0)
    require_after_apogee: bool = False
    detection_drop: float = 0.067  # detection region below the cavity (m)

    def __post_init__(self) -> None:
        lo, hi = self.velocity_band
        for name in ("v_launch2", "v_launch1"):
            v = getattr(self, name)
            if v is not None and not lo <= v <= hi:
                raise ParameterError(name, v, f"outside launch sanity band [{lo}, {hi}] m/s")
        if not self.dt_launch > 0:
            raise ParameterError("dt_launch", self.dt_launch, "must be > 0")
        if not self.z_cavity > 0:
            raise ParameterError("z_cavity", self.z_cavity, "must be > 0")
        if not self.g > 0:
            raise ParameterError("g", self.g, "must be > 0")
        if not self.pulse_duration >= 0:
            raise ParameterError("pulse_duration", self.pulse_duration, "must be >= 0")
        if self.t_collide is not None and not self.t_collide > self.dt_launch:
            raise ParameterError("t_collide", self.t_collide, "must be after the second launch")
        if not self.detection_drop >= 0:
            raise ParameterError("detection_drop", self.detection_drop, "must be >= 0")

    def with_launch_velocity(self, v_launch: float, cloud1_offset: float = 0.0) -> "LaunchPlan":
        """Cloud 2 at ``v_launch``, Cloud 1 at ``v_launch + cloud1_offset`` (equal launch for 0)."""
        v_launch1 = None if cloud1_offset == 0 else v_launch + cloud1_offset
        return replace(self, v_launch1=v_launch1, v_launch2=v_launch, t_collide=None)


@dataclass(frozen=True)
class CollisionGeometry:
    v_r: float
    energy: float
    energy_over_kb: float
    v_z1: float
    v_z2: float
    t_collide: float
    T: float
    t_detect_delay: float
    spread_diameter: float
    z_collide: float
    t_cavity_up: float
    t_cavity_down: float
    v_launch1: float
    v_launch2: float
    dt_launch: float
    mass: float = M_CS
    after_apogee: bool = False
    warnings: tuple[str, ...] = ()

    @property
    def reduced_mass(self) -> float:
        return self.mass / 2.0

    @property
    def wavenumber(self) -> float:
        """Collision wavenumber k = mu v_r / hbar."""
        return self.reduced_mass * self.v_r / HBAR

    @property
    def t_detect(self) -> float:
        return self.t_collide + self.t_detect_delay


# ---------------------------------------------------------------------------
# clock
# ---------------------------------------------------------------------------


class PulseKind(str, Enum):
    IDEAL = "ideal"
    FINITE_RABI = "finite_rabi"


class DetectState(str, Enum):
    P3 = "p3"
    P4 = "p4"


@dataclass(frozen=True)
class PulseModel:
    kind: PulseKind = PulseKind.IDEAL
    rabi_frequency: float = math.pi / (2 * 5e-3)  # rad/s
    pulse_duration: float = 5e-3
    area_tolerance: float = 0.05

    def __post_init__(self) -> None:
        if self.kind is PulseKind.FINITE_RABI:
            if not (self.rabi_frequency > 0 and self.pulse_duration > 0):
                raise ParameterError("pulse_model", self, "finite pulses need rabi_frequency and pulse_duration > 0")
            area = self.rabi_frequency * self.pulse_duration
            if abs(area - math.pi / 2) > self.area_tolerance:
                raise ParameterError("pulse_area", area, "rabi_frequency * pulse_duration must be close to pi/2")

    @classmethod
    def ideal(cls) -> "PulseModel":
        return cls()

    @classmethod
    def finite(cls, pulse_duration: float, rabi_frequency: float | None = None) -> "PulseModel":
        if rabi_frequency is None:
            rabi_frequency = math.pi / (2 * pulse_duration)
        return cls(kind=PulseKind.FINITE_RABI, rabi_frequency=rabi_frequency, pulse_duration=pulse_duration)


@dataclass(frozen=True)
class RamseySequence:
    """Two pulses separated by T (between pulse centres) with phase insertion."""
    T: float
    detuning_hz: float = 0.0
    pulse: PulseModel = field(default_factory=PulseModel)
    inserted_phase: float = 0.0
    pulse_phase_offset: float = 0.0
    frequency_shift_hz: float = 0.0
    insertion_time: float | None = None  # seconds after the first pulse centre

    def __post_init__(self) -> None:
        if not self.T > 0:
            raise ParameterError("T", self.T, "must be > 0")
        if self.pulse.kind is PulseKind.FINITE_RABI and self.pulse.pulse_duration >= self.T:
            raise ParameterError("T", self.T, "must exceed the pulse duration")
        if self.insertion_time is not None and not 0.0 <= self.insertion_time <= self.T:
            raise ParameterError("insertion_time", self.insertion_time, "must lie within [0, T]")


@dataclass(frozen=True, eq=False)
class ClockStateAmplitudes:
    """Amplitudes (c3, c4) of |3,0> and |4,0>; scalars or equal-shape arrays."""
    c3: complex | np.ndarray
    c4: complex | np.ndarray

    @classmethod
    def after_first_pulse(cls, size: int | None = None) -> "ClockStateAmplitudes":
        """State right after an ideal pi/2 pulse on |3,0>."""
        c3, c4 = 1 / math.sqrt(2) + 0j, -1j / math.sqrt(2)
        if size is None:
            return cls(c3=c3, c4=c4)
        return cls(c3=np.full(size, c3, dtype=complex), c4=np.full(size, c4, dtype=complex))

    def norm(self) -> float | np.ndarray:
        return np.abs(self.c3) ** 2 + np.abs(self.c4) ** 2

    def relative_phase(self) -> float | np.ndarray:
        """Phase of c3 relative to c4, measured from the post-pulse state."""
        return np.angle(self.c3 * np.conj(self.c4) * -2j)


@dataclass(frozen=True, eq=False)
class ScatteredBranch:
    amplitudes: ClockStateAmplitudes
    weight: float | np.ndarray


# ---------------------------------------------------------------------------
# collider
# ---------------------------------------------------------------------------


class StateKind(str, Enum):
    PURE = "pure"
    CLOCK_SUPERPOSITION = "clock_superposition"


@dataclass(frozen=True)
class CloudState:
    kind: StateKind
    f: int | None = None
    m: int | None = None

    @classmethod
    def pure(cls, f: int, m: int) -> "CloudState":
        return cls(kind=StateKind.PURE, f=f, m=m)

    @classmethod
    def clock_superposition(cls) -> "CloudState":
        return cls(kind=StateKind.CLOCK_SUPERPOSITION)

    @property
    def label(self) -> str:
        if self.kind is StateKind.PURE:
            return f"|{self.f},{self.m}>"
        return "|3,0>+|4,0>"


class LaunchSlot(str, Enum):
    CLOUD1 = "cloud1"
    CLOUD2 = "cloud2"


@dataclass(frozen=True)
class CloudSpec:
    """Gaussian cloud at launch.

    A target cloud may be empty (atoms = 0 and peak_density = 0); every other
    cloud needs positive atom number and density.
    """
    atoms: float
    temperature: float
    sigma_pos: float
    peak_density: float
    state: CloudState
    slot: LaunchSlot
    density_tolerance: float = 0.2

    def __post_init__(self) -> None:
        empty = self.atoms == 0 and self.peak_density == 0
        if empty and self.slot is not LaunchSlot.CLOUD1:
            raise ParameterError("atoms", self.atoms, "only the target cloud may be empty")
        if not empty:
            if not self.atoms > 0:
                raise ParameterError("atoms", self.atoms, "must be > 0")
            if not self.peak_density > 0:
                raise ParameterError("peak_density", self.peak_density, "must be > 0")
        if not self.temperature >= 0:
            raise ParameterError("temperature", self.temperature, "must be >= 0")
        if not self.sigma_pos > 0:
            raise ParameterError("sigma_pos", self.sigma_pos, "must be > 0")

    @property
    def is_empty(self) -> bool:
        return self.atoms == 0 and self.peak_density == 0

    @property
    def gaussian_peak_density(self) -> float:
        return self.atoms / ((2 * math.pi) ** 1.5 * self.sigma_pos ** 3)

    @property
    def density_mismatch(self) -> float:
        """Relative deviation of peak_density from the Gaussian N/((2 pi)^1.5 sigma^3)."""
        if self.is_empty:
            return 0.0
        return abs(self.peak_density / self.gaussian_peak_density - 1.0)

    @property
    def warnings(self) -> tuple[str, ...]:
        if self.density_mismatch > self.density_tolerance:
            return (
                f"{self.slot.value}: peak density {self.peak_density:.3g} m^-3 differs by "
                f"{100 * self.density_mismatch:.0f}% from the Gaussian value {self.gaussian_peak_density:.3g} m^-3",
            )
        return ()

    def velocity_rms(self, mass: float = M_CS) -> float:
        return math.sqrt(K_B * self.temperature / mass)

    def with_peak_density(self, density: float) -> "CloudSpec":
        """Same cloud size, atom number scaled to keep the Gaussian consistency."""
        scale = density / self.peak_density if self.peak_density > 0 else 0.0
        atoms = self.atoms * scale if self.peak_density > 0 else density * (2 * math.pi) ** 1.5 * self.sigma_pos ** 3
        return replace(self, peak_density=density, atoms=atoms)


class Lineshape(str, Enum):
    TOP_HAT = "top_hat"
    SINC_SQUARED = "sinc_squared"


class Clearing(str, Enum):
    EARLY = "early"
    LATE = "late"


@dataclass(frozen=True)
class DetectionSpec:
    probe_vz: float = 0.0
    probe_bandwidth: float = 1.4e-2
    lineshape: Lineshape = Lineshape.TOP_HAT
    aperture_height: float = 1e-2
    detection_beam_diameter: float = 2e-2
    cavity_aperture: float = 1.8e-2
    clearing: Clearing = Clearing.LATE
    prepare_cloud2: bool = True
    aperture_enabled: bool = True
    efficiency: float = 1.0
    impurity_fraction: float = 1e-3

    def __post_init__(self) -> None:
        if not self.probe_bandwidth > 0:
            raise ParameterError("probe_bandwidth", self.probe_bandwidth, "must be > 0")
        for name in ("aperture_height", "detection_beam_diameter", "cavity_aperture"):
            if not getattr(self, name) > 0:
                raise ParameterError(name, getattr(self, name), "must be > 0")
        if not 0 < self.efficiency <= 1:
            raise ParameterError("efficiency", self.efficiency, "must be in (0, 1]")
        if not 0 <= self.impurity_fraction <= 1:
            raise ParameterError("impurity_fraction", self.impurity_fraction, "must be in [0, 1]")

    @property
    def is_background(self) -> bool:
        return not self.prepare_cloud2

    def run(self, clearing: Clearing, *, background: bool = False, probe_vz: float | None = None) -> "DetectionSpec":
        return replace(
            self,
            clearing=clearing,
            prepare_cloud2=not background,
            probe_vz=self.probe_vz if probe_vz is None else probe_vz,
        )


@dataclass(frozen=True)
class AtomRecord:
    position: tuple[float, float, float]
    velocity: tuple[float, float, float]
    scattered: bool
    weight: float
    amplitudes: ClockStateAmplitudes
    scatter_angle: tuple[float, float] | None = None


@dataclass(frozen=True, eq=False)
class AtomEnsemble:
    """Structure-of-arrays ensemble in the free-falling CoM frame.

    Positions are taken at ``t_ref`` (the collision time), velocities are
    constant afterwards, ``weights`` count physical atoms per record.
    """
    positions: np.ndarray
    velocities: np.ndarray
    weights: np.ndarray
    scattered: np.ndarray
    theta: np.ndarray
    phi: np.ndarray
    c3: np.ndarray
    c4: np.ndarray
    t_ref: float
    state: CloudState

    def __len__(self) -> int:
        return int(self.weights.size)

    @property
    def total_weight(self) -> float:
        return float(np.sum(self.weights))

    @property
    def scattered_weight(self) -> float:
        return float(np.sum(self.weights[self.scattered]))

    def positions_at(self, t: float) -> np.ndarray:
        return self.positions + self.velocities * (t - self.t_ref)

    def record(self, i: int) -> AtomRecord:
        angle = (float(self.theta[i]), float(self.phi[i])) if self.scattered[i] else None
        return AtomRecord(
            position=tuple(float(x) for x in self.positions[i]),
            velocity=tuple(float(v) for v in self.velocities[i]),
            scattered=bool(self.scattered[i]),
            weight=float(self.weights[i]),
            amplitudes=ClockStateAmplitudes(c3=complex(self.c3[i]), c4=complex(self.c4[i])),
            scatter_angle=angle,
        )


@dataclass(frozen=True, eq=False)
class CloudEnsembles:
    cloud1: AtomEnsemble
    cloud2: AtomEnsemble
    atoms_per_sample2: float


@dataclass(frozen=True, eq=False)
class ScatterOutcome:
    ensemble: AtomEnsemble
    probabilities: np.ndarray
    expected_scattered: float
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True, eq=False)
class DetectionCounts:
    """Detected counts per probe setting; arrays share the probe/detuning axis."""
    scattered: np.ndarray
    unscattered: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.scattered + self.unscattered


@dataclass(frozen=True, eq=False)
class VelocityScan:
    v_grid: np.ndarray
    counts_collisions: np.ndarray
    counts_no_collisions: np.ndarray
    background_collisions: np.ndarray
    background_no_collisions: np.ndarray
    scattered_only: np.ndarray | None = None

    @property
    def difference(self) -> np.ndarray:
        return (self.counts_collisions - self.background_collisions) - (
            self.counts_no_collisions - self.background_no_collisions
        )


# ---------------------------------------------------------------------------
# analysis
# ---------------------------------------------------------------------------


class SignalClass(str, Enum):
    SCATTERED = "scattered"
    UNSCATTERED = "unscattered"
    BG_EARLY = "bg_early"
    BG_LATE = "bg_late"


@dataclass(frozen=True, eq=False)
class FringeData:
    detuning_hz: np.ndarray
    counts: np.ndarray
    sigma: np.ndarray
    T: float
    signal_class: str = SignalClass.SCATTERED.value

    def __post_init__(self) -> None:
        x = _frozen_array(self.detuning_hz)
        y = _frozen_array(self.counts)
        s = _frozen_array(self.sigma)
        if not (x.shape == y.shape == s.shape) or x.ndim != 1:
            raise ParameterError("fringe_data", (x.shape, y.shape, s.shape), "arrays must be 1-D and equal length")
        if x.size == 0:
            raise ParameterError("detuning_hz", x.size, "grid must not be empty")
        if not self.T > 0:
            raise ParameterError("T", self.T, "must be > 0")
        if np.any(s < 0) or not np.all(np.isfinite(s)):
            raise ParameterError("sigma", "...", "must be finite and >= 0")
        object.__setattr__(self, "detuning_hz", x)
        object.__setattr__(self, "counts", y)
        object.__setattr__(self, "sigma", s)

    def __len__(self) -> int:
        return int(self.detuning_hz.size)

    @property
    def periods_spanned(self) -> float:
        return float((self.detuning_hz.max() - self.detuning_hz.min()) * self.T)

    def central(self) -> "FringeData":
        """Points of the central fringe, |detuning| <= 1/(2T)."""
        keep = np.abs(self.detuning_hz) * self.T <= 0.5 + 1e-9
        return FringeData(
            detuning_hz=self.detuning_hz[keep],
            counts=self.counts[keep],
            sigma=self.sigma[keep],
            T=self.T,
            signal_class=self.signal_class,
        )


@dataclass(frozen=True, eq=False)
class FringeSet:
    scattered: FringeData
    unscattered: FringeData
    bg_early: FringeData
    bg_late: FringeData
    probe_vz: float
    geometry: CollisionGeometry

    def classes(self) -> dict[str, FringeData]:
        return {
            SignalClass.SCATTERED.value: self.scattered,
            SignalClass.UNSCATTERED.value: self.unscattered,
            SignalClass.BG_EARLY.value: self.bg_early,
            SignalClass.BG_LATE.value: self.bg_late,
        }


@dataclass(frozen=True)
class FitResult:
    phi: float
    amplitude: float
    offset: float
    phi_err: float
    amplitude_err: float
    offset_err: float
    covariance: tuple[tuple[float, float, float], ...]
    chi2_per_dof: float
    dof: int
    converged: bool
    signal_class: str = SignalClass.SCATTERED.value
    warnings: tuple[str, ...] = ()


class CampaignParameter(str, Enum):
    T = "T"
    DENSITY = "density"


class InjectionMode(str, Enum):
    PHASE = "phase"
    FREQUENCY = "frequency"


@dataclass(frozen=True)
class CampaignPoint:
    value: float
    fit: FitResult
    flagged: bool = False


@dataclass(frozen=True)
class CampaignResult:
    parameter: CampaignParameter
    injection: InjectionMode
    points: tuple[CampaignPoint, ...]
    pooled_phi: float
    pooled_phi_err: float
    slope: float
    slope_err: float
    intercept: float
    chi2_flat: float
    chi2_linear: float
    delta_chi2: float
    p_value_flat: float
    frequency_model_slope: float | None = None
    amplitude_slope: float | None = None
    amplitude_slope_err: float | None = None
    amplitude_r2: float | None = None
    rejected: tuple[float, ...] = ()
    warnings: tuple[str, ...] = ()

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(p.value for p in self.points)

    @property
    def fits(self) -> tuple[FitResult, ...]:
        return tuple(p.fit for p in self.points)


# ---------------------------------------------------------------------------
# run description
# ---------------------------------------------------------------------------


class FitWindow(str, Enum):
    FULL = "full"
    CENTRAL = "central"


@dataclass(frozen=True)
class RamseyPlan:
    """Ramsey settings that do not depend on the launch (T comes from geometry)."""
    pulse_kind: PulseKind = PulseKind.IDEAL
    rabi_frequency: float | None = None
    points: int = 161
    span_periods: float = 2.0
    pulse_phase_offset: float = 0.0
    injection: InjectionMode = InjectionMode.PHASE
    frequency_shift_hz: float = 0.0

    def pulse_model(self, pulse_duration: float) -> PulseModel:
        if self.pulse_kind is PulseKind.IDEAL:
            return PulseModel.ideal()
        return PulseModel.finite(pulse_duration, self.rabi_frequency)

    def detuning_grid(self, T: float) -> np.ndarray:
        """Default grid: ``points`` values spanning +-span_periods/T around 0."""
        if self.points < 1:
            raise ParameterError("points", self.points, "must be >= 1")
        half = self.span_periods / T
        return np.linspace(-half, half, self.points)


@dataclass(frozen=True)
class SimulationSettings:
    seed: int = 0
    noise: bool = True
    samples: int = 100_000
    max_samples: int = 1_000_000
    repetitions: int = 4
    thermal_average: bool = False

    def __post_init__(self) -> None:
        if not 0 <= self.seed < 2 ** 64:
            raise ParameterError("seed", self.seed, "must be a 64-bit unsigned integer")
        if self.samples < 1:
            raise ParameterError("samples", self.samples, "must be >= 1")
        if self.repetitions < 1:
            raise ParameterError("repetitions", self.repetitions, "must be >= 1")


@dataclass(frozen=True, eq=False)
class Scenario:
    """Everything one simulated run needs, free of any config framework."""
    launch: LaunchPlan
    cloud1: CloudSpec
    cloud2: CloudSpec
    channel3: ScatteringChannel
    channel4: ScatteringChannel
    detection: DetectionSpec
    ramsey: RamseyPlan = field(default_factory=RamseyPlan)
    simulation: SimulationSettings = field(default_factory=SimulationSettings)
    mass: float = M_CS
    l_max: int = 0
    velocity_grid: np.ndarray = field(default_factory=lambda: np.linspace(-0.08, 0.08, 81))
    fit_window: FitWindow = FitWindow.FULL

    def replace(self, **changes) -> "Scenario":
        return replace(self, **changes)
