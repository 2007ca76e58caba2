from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any, ClassVar, Literal

import numpy as np
from platformdirs import PlatformDirs
from pydantic import BaseModel, ConfigDict, Field, ValidationError, computed_field, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from ..core.domain.constants import G_DEFAULT, M_CS
from ..core.domain.exceptions import ConfigurationError
from ..core.domain.models import (
    CloudSpec,
    CloudState,
    DetectionSpec,
    FitWindow,
    InjectionMode,
    LaunchPlan,
    LaunchSlot,
    Lineshape,
    PhaseShiftTable,
    Potential,
    PulseKind,
    RamseyPlan,
    ScatteringChannel,
    Scenario,
    SimulationSettings,
)
from ..core.services import scatterlib
from ..infra.table_io import read_phase_table


APP_NAME = "scattering_interferometer"

# Injected tables hold for every wavenumber a run can reach.
INJECTED_K_MIN = 1.0
INJECTED_K_MAX = 1e12

PUBLISHED = "[paper]"
ASSUMPTION = "[assumption]"


def _default_home() -> Path:
    """Get default home directory using platformdirs."""
    return Path(PlatformDirs(appname=APP_NAME, appauthor=False).user_cache_dir)


# ---------------------------------------------------------------------------
# application settings (environment)
# ---------------------------------------------------------------------------


class DirectoryConfig(BaseSettings):
    """Directory configuration with computed paths."""

    home: Path = Field(
        default_factory=_default_home,
        description="Base directory for logs and default outputs",
    )

    @computed_field
    @property
    def results_dir(self) -> Path:
        """Default output directory when --out is not given."""
        path = self.home / "results"
        path.mkdir(parents=True, exist_ok=True)
        return path

    @computed_field
    @property
    def logs_dir(self) -> Path:
        """JSON Lines run logs."""
        path = self.home / "logs"
        path.mkdir(parents=True, exist_ok=True)
        return path


class LoggingConfig(BaseSettings):
    """Logging configuration."""

    logger_name: str = Field(
        default="scattering_interferometer",
        description="Logger name for the application",
    )

    console_output: bool = Field(
        default=False,
        description="Enable human-readable console output",
    )

    level: str = Field(
        default="INFO",
        description="Logging level (DEBUG, INFO, WARNING, ERROR)",
    )


class RuntimeConfig(BaseSettings):
    """Runtime configuration.

    ``run_id`` is set programmatically by the CLI; ``workers`` may come from
    the environment.
    """

    model_config = SettingsConfigDict(
        frozen=False,
        extra="allow",
    )

    run_id: str | None = Field(
        default=None,
        description="Identifier of the current run; names the JSONL log file",
    )

    workers: int = Field(
        default=1,
        ge=1,
        description="Threads for block-parallel Monte Carlo (results do not depend on it)",
    )


class AppConfig(BaseSettings):
    """Root application configuration.

    Loaded from environment variables with the SCATTERING_INTERFEROMETER_
    prefix; nested keys use a double underscore.

    Example env vars:
        export SCATTERING_INTERFEROMETER_DIRECTORIES__HOME=/custom/path
        export SCATTERING_INTERFEROMETER_LOGGING__LEVEL=DEBUG
        export SCATTERING_INTERFEROMETER_RUNTIME__WORKERS=4
    """

    model_config = SettingsConfigDict(
        env_prefix="SCATTERING_INTERFEROMETER_",
        env_nested_delimiter="__",
        frozen=False,
        extra="forbid",
    )

    directories: DirectoryConfig = Field(default_factory=DirectoryConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)
    runtime: RuntimeConfig = Field(default_factory=RuntimeConfig)


# ---------------------------------------------------------------------------
# experiment configuration (one JSON document per run)
# ---------------------------------------------------------------------------


def _field(default: Any, description: str, tag: str, **kwargs: Any) -> Any:
    return Field(default=default, description=f"{description} {tag}", **kwargs)


class Section(BaseModel):
    """Strict config section; velocity fields also accept ``<name>_cm_per_s``."""

    model_config = ConfigDict(extra="forbid")

    velocity_fields: ClassVar[tuple[str, ...]] = ()

    @model_validator(mode="before")
    @classmethod
    def _accept_cm_per_s(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)
        for name in cls.velocity_fields:
            alias = f"{name}_cm_per_s"
            if alias not in data:
                continue
            if name in data:
                raise ValueError(f"give either {name} or {alias}, not both")
            value = data.pop(alias)
            if value is None:
                data[name] = None
                continue
            try:
                data[name] = float(value) / 100.0
            except (TypeError, ValueError) as exc:
                raise ValueError(f"{alias} must be a number") from exc
        return data


class ConstantsSection(Section):
    g: float = _field(G_DEFAULT, "Gravitational acceleration (m/s^2); gives v_r = g dt = 9.80 cm/s for dt = 10 ms", PUBLISHED, gt=0)
    m_cs: float = _field(M_CS, "Caesium atomic mass (kg)", ASSUMPTION, gt=0)


class LaunchSection(Section):
    velocity_fields: ClassVar[tuple[str, ...]] = ("v_launch1", "v_launch2")

    v_launch2: float = _field(2.50909, "Cloud 2 launch velocity (m/s); gives T = 0.115 s", PUBLISHED)
    dt_launch: float = _field(0.010122, "Delay between the launches (s); gives v_r = 9.92 cm/s", PUBLISHED, gt=0)
    z_cavity: float = _field(0.305, "Height of the clock cavity above the launch point (m)", ASSUMPTION, gt=0)
    v_launch1: float | None = _field(None, "Cloud 1 launch velocity (m/s); null means equal launches", ASSUMPTION)
    t_collide: float | None = _field(None, "Requested collision time (s); derives v_launch1", ASSUMPTION)
    pulse_duration: float = _field(5e-3, "Microwave pulse duration (s)", ASSUMPTION, ge=0)
    velocity_band: tuple[float, float] = _field((2.0, 4.0), "Accepted launch velocity band (m/s)", ASSUMPTION)
    require_after_apogee: bool = _field(False, "Warn when the collision precedes both apogees", ASSUMPTION)
    detection_drop: float = _field(0.067, "Detection region below the cavity (m)", ASSUMPTION, ge=0)


class CloudSection(Section):
    atoms: float = _field(3e8, "Atom number", PUBLISHED, ge=0)
    temperature: float = _field(250e-9, "Temperature (K)", PUBLISHED, ge=0)
    sigma_pos: float = _field(2.513e-3, "Initial rms radius (m), Gaussian-consistent with atoms and peak_density", ASSUMPTION, gt=0)
    peak_density: float = _field(1.2e15, "Peak density at launch (m^-3)", PUBLISHED, ge=0)
    state: Literal["pure", "clock_superposition"] = _field("clock_superposition", "Internal state", PUBLISHED)
    f: int | None = _field(None, "Hyperfine F of a pure state", PUBLISHED)
    m: int | None = _field(None, "Magnetic sublevel m of a pure state", PUBLISHED)
    density_tolerance: float = _field(0.2, "Allowed deviation from the Gaussian peak density", ASSUMPTION, gt=0)

    @model_validator(mode="after")
    def _pure_needs_quantum_numbers(self) -> "CloudSection":
        if self.state == "pure" and (self.f is None or self.m is None):
            raise ValueError("a pure state needs f and m")
        return self

    def to_spec(self, slot: LaunchSlot) -> CloudSpec:
        state = CloudState.pure(self.f, self.m) if self.state == "pure" else CloudState.clock_superposition()
        return CloudSpec(
            atoms=self.atoms,
            temperature=self.temperature,
            sigma_pos=self.sigma_pos,
            peak_density=self.peak_density,
            state=state,
            slot=slot,
            density_tolerance=self.density_tolerance,
        )


def _default_cloud1() -> CloudSection:
    return CloudSection(
        atoms=1.6e9,
        temperature=500e-9,
        sigma_pos=2.567e-3,
        peak_density=6e15,
        state="pure",
        f=4,
        m=4,
    )


class ChannelSection(Section):
    kind: Literal["square_well", "lennard_jones", "injected", "table"] = _field(
        "injected", "How the channel's phase shifts are obtained", ASSUMPTION
    )
    deltas: list[float] = _field([0.0], "Injected phase shift per partial wave, l = 0 first (rad)", ASSUMPTION)
    depth: float | None = _field(None, "Square-well depth (J)", ASSUMPTION)
    radius: float | None = _field(None, "Square-well radius (m)", ASSUMPTION)
    scattering_length: float | None = _field(None, "Square-well target scattering length (m); sets the depth", ASSUMPTION)
    c12: float | None = _field(None, "Lennard-Jones repulsive coefficient (J m^12)", ASSUMPTION)
    c6: float | None = _field(None, "Lennard-Jones dispersion coefficient (J m^6)", ASSUMPTION)
    path: Path | None = _field(None, "Phase-shift table CSV; relative to the config file", ASSUMPTION)

    @model_validator(mode="after")
    def _check_kind(self) -> "ChannelSection":
        if self.kind == "square_well":
            if self.radius is None:
                raise ValueError("square_well needs radius")
            if (self.depth is None) == (self.scattering_length is None):
                raise ValueError("square_well needs exactly one of depth or scattering_length")
        elif self.kind == "lennard_jones":
            if self.c12 is None or self.c6 is None:
                raise ValueError("lennard_jones needs c12 and c6")
        elif self.kind == "injected":
            if not self.deltas:
                raise ValueError("injected needs at least one delta")
        elif self.path is None:
            raise ValueError("table needs path")
        return self

    def to_channel(self, label: str, reduced_mass: float, base_dir: Path | None = None) -> ScatteringChannel:
        if self.kind == "injected":
            table = PhaseShiftTable.constant(self.deltas, INJECTED_K_MIN, INJECTED_K_MAX)
            return ScatteringChannel(label=label, table=table)
        if self.kind == "table":
            path = self.path if self.path.is_absolute() or base_dir is None else base_dir / self.path
            return ScatteringChannel(label=label, table=read_phase_table(path))
        if self.kind == "square_well":
            depth = self.depth
            if depth is None:
                depth = scatterlib.square_well_depth_for_scattering_length(self.scattering_length, self.radius, reduced_mass)
            return ScatteringChannel(label=label, potential=Potential.square_well(depth, self.radius, reduced_mass))
        return ScatteringChannel(label=label, potential=Potential.lennard_jones(self.c12, self.c6, reduced_mass))


class ChannelsSection(Section):
    clock3: ChannelSection = Field(
        default_factory=lambda: ChannelSection(deltas=[0.600]),
        description="|3,0> colliding with the target state",
    )
    clock4: ChannelSection = Field(
        default_factory=lambda: ChannelSection(deltas=[0.741]),
        description="|4,0> colliding with the target state",
    )
    l_max: int = _field(0, "Highest partial wave kept", ASSUMPTION, ge=0)


class RamseySection(Section):
    pulse_kind: Literal["ideal", "finite_rabi"] = _field("ideal", "Pulse model", ASSUMPTION)
    rabi_frequency: float | None = _field(None, "Rabi frequency (rad/s); null gives a pi/2 area", ASSUMPTION)
    points: int = _field(161, "Detuning points per fringe scan", ASSUMPTION, ge=1)
    span_periods: float = _field(2.0, "Scan half-width in fringe periods 1/T", ASSUMPTION, gt=0)
    pulse_phase_offset: float = _field(0.0, "Static microwave phase of the second pulse (rad)", ASSUMPTION)
    injection: Literal["phase", "frequency"] = _field("phase", "Scattered-branch control: phase or frequency shift", ASSUMPTION)
    frequency_shift_hz: float = _field(0.0, "Frequency shift of the scattered branch in frequency mode (Hz)", ASSUMPTION)


class DetectionSection(Section):
    velocity_fields: ClassVar[tuple[str, ...]] = ("probe_vz", "probe_bandwidth", "scan_vz_min", "scan_vz_max")

    probe_vz: float = _field(0.0, "Probe velocity for scattered fringes (m/s)", PUBLISHED)
    probe_bandwidth: float = _field(1.4e-2, "Raman probe FWHM (m/s)", PUBLISHED, gt=0)
    lineshape: Literal["top_hat", "sinc_squared"] = _field("top_hat", "Raman probe lineshape", ASSUMPTION)
    aperture_height: float = _field(1e-2, "Vertical aperture height (m)", PUBLISHED, gt=0)
    detection_beam_diameter: float = _field(2e-2, "Detection beam diameter (m)", PUBLISHED, gt=0)
    cavity_aperture: float = _field(1.8e-2, "Cavity aperture diameter (m)", PUBLISHED, gt=0)
    aperture_enabled: bool = _field(True, "Apply the detection aperture", PUBLISHED)
    efficiency: float = _field(1.0, "Fraction of probed atoms that become counts", ASSUMPTION, gt=0, le=1)
    impurity_fraction: float = _field(1e-3, "Cloud 2 fraction in |3,0> when its preparation is inhibited", ASSUMPTION, ge=0, le=1)
    scan_vz_min: float = _field(-0.08, "Velocity scan start (m/s)", ASSUMPTION)
    scan_vz_max: float = _field(0.08, "Velocity scan end (m/s)", ASSUMPTION)
    scan_points: int = _field(81, "Velocity scan points", ASSUMPTION, ge=1)

    def to_spec(self) -> DetectionSpec:
        return DetectionSpec(
            probe_vz=self.probe_vz,
            probe_bandwidth=self.probe_bandwidth,
            lineshape=Lineshape(self.lineshape),
            aperture_height=self.aperture_height,
            detection_beam_diameter=self.detection_beam_diameter,
            cavity_aperture=self.cavity_aperture,
            aperture_enabled=self.aperture_enabled,
            efficiency=self.efficiency,
            impurity_fraction=self.impurity_fraction,
        )


class SimulationSection(Section):
    seed: int = _field(0, "Master seed (64-bit unsigned)", ASSUMPTION, ge=0, lt=2 ** 64)
    noise: bool = _field(True, "Apply Poisson shot noise", ASSUMPTION)
    samples: int = _field(100_000, "Monte Carlo samples per cloud", ASSUMPTION, ge=1)
    max_samples: int = _field(1_000_000, "Sample budget", ASSUMPTION, ge=1)
    repetitions: int = _field(4, "Repetitions of the four-measurement difference", PUBLISHED, ge=1)
    thermal_average: bool = _field(False, "Use each pair's own relative velocity", ASSUMPTION)


class FitSection(Section):
    window: Literal["full", "central"] = _field("full", "Fit the full scan or the central fringe only", ASSUMPTION)


class ExperimentConfig(Section):
    """Full description of one simulated experiment."""

    constants: ConstantsSection = Field(default_factory=ConstantsSection)
    launch: LaunchSection = Field(default_factory=LaunchSection)
    cloud1: CloudSection = Field(default_factory=_default_cloud1)
    cloud2: CloudSection = Field(default_factory=CloudSection)
    channels: ChannelsSection = Field(default_factory=ChannelsSection)
    ramsey: RamseySection = Field(default_factory=RamseySection)
    detection: DetectionSection = Field(default_factory=DetectionSection)
    simulation: SimulationSection = Field(default_factory=SimulationSection)
    fit: FitSection = Field(default_factory=FitSection)

    def with_overrides(self, *, seed: int | None = None, noise: bool | None = None) -> "ExperimentConfig":
        update: dict[str, Any] = {}
        if seed is not None:
            update["seed"] = seed
        if noise is not None:
            update["noise"] = noise
        if not update:
            return self
        simulation = SimulationSection.model_validate({**self.simulation.model_dump(), **update})
        return self.model_copy(update={"simulation": simulation})

    def to_scenario(self, base_dir: Path | None = None) -> Scenario:
        """Plain core dataclasses for this config; domain validation runs here."""
        mass = self.constants.m_cs
        mu = mass / 2.0
        launch = self.launch
        sim = self.simulation
        det = self.detection
        return Scenario(
            launch=LaunchPlan(
                v_launch2=launch.v_launch2,
                dt_launch=launch.dt_launch,
                z_cavity=launch.z_cavity,
                v_launch1=launch.v_launch1,
                g=self.constants.g,
                pulse_duration=launch.pulse_duration,
                t_collide=launch.t_collide,
                velocity_band=launch.velocity_band,
                require_after_apogee=launch.require_after_apogee,
                detection_drop=launch.detection_drop,
            ),
            cloud1=self.cloud1.to_spec(LaunchSlot.CLOUD1),
            cloud2=self.cloud2.to_spec(LaunchSlot.CLOUD2),
            channel3=self.channels.clock3.to_channel("|3,0>", mu, base_dir),
            channel4=self.channels.clock4.to_channel("|4,0>", mu, base_dir),
            detection=det.to_spec(),
            ramsey=RamseyPlan(
                pulse_kind=PulseKind(self.ramsey.pulse_kind),
                rabi_frequency=self.ramsey.rabi_frequency,
                points=self.ramsey.points,
                span_periods=self.ramsey.span_periods,
                pulse_phase_offset=self.ramsey.pulse_phase_offset,
                injection=InjectionMode(self.ramsey.injection),
                frequency_shift_hz=self.ramsey.frequency_shift_hz,
            ),
            simulation=SimulationSettings(
                seed=sim.seed,
                noise=sim.noise,
                samples=sim.samples,
                max_samples=sim.max_samples,
                repetitions=sim.repetitions,
                thermal_average=sim.thermal_average,
            ),
            mass=mass,
            l_max=self.channels.l_max,
            velocity_grid=np.linspace(det.scan_vz_min, det.scan_vz_max, det.scan_points),
            fit_window=FitWindow(self.fit.window),
        )


def _format_validation_error(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        loc = ".".join(str(p) for p in err["loc"]) or "<root>"
        parts.append(f"{loc}: {err['msg']}")
    return "; ".join(parts)


def load_experiment_config(path: Path | None) -> ExperimentConfig:
    """Read and validate a JSON experiment config; ``None`` gives the defaults."""
    if path is None:
        return ExperimentConfig()
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read {path}: {exc.strerror or exc}", field="config") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(
            f"invalid JSON in {path} at line {exc.lineno} column {exc.colno}: {exc.msg}", field="config"
        ) from exc
    try:
        return ExperimentConfig.model_validate(raw)
    except ValidationError as exc:
        raise ConfigurationError(_format_validation_error(exc), field="config") from exc


def config_sha256(config: ExperimentConfig) -> str:
    canonical = json.dumps(config.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def defaults_listing(model: BaseModel | None = None, prefix: str = "") -> list[tuple[str, Any, str]]:
    """(dotted path, default, description) for every leaf of the experiment config."""
    model = ExperimentConfig() if model is None else model
    rows: list[tuple[str, Any, str]] = []
    for name, info in type(model).model_fields.items():
        value = getattr(model, name)
        path = f"{prefix}{name}"
        if isinstance(value, BaseModel):
            rows.extend(defaults_listing(value, f"{path}."))
        else:
            rows.append((path, value, info.description or ""))
    return rows
