"""Monte Carlo synthesis of the colliding-cloud experiment.

Everything happens in the free-falling centre-of-mass frame of the two
clouds; both cloud centres meet at the origin at t_collide. Cloud 1 moves
at v_z1 = -v_r/2, Cloud 2 at v_z2 = +v_r/2.

Each Cloud 2 sample splits into an unscattered branch of weight w (1 - p) and
a scattered branch of weight w p, so scattered + unscattered weight is the
Cloud 2 weight exactly and every signal is linear in the target density.

Random numbers come from ``SeedSequence(seed, spawn_key=(repetition, stream,
block))`` for fixed blocks of atoms; blocks may run on a thread pool and are
joined in block order, so results do not depend on the worker count.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Any, TypeVar

import numpy as np
from scipy import integrate

from ..domain.constants import HBAR, K_B, TWO_PI
from ..domain.exceptions import ConfigurationError
from ..domain.models import (
    AtomEnsemble,
    Clearing,
    ClockStateAmplitudes,
    CloudEnsembles,
    CloudSpec,
    CollisionGeometry,
    DetectionCounts,
    DetectionSpec,
    FringeData,
    FringeSet,
    InjectionMode,
    Lineshape,
    PhaseShiftTable,
    RamseySequence,
    Scenario,
    ScatterOutcome,
    SignalClass,
    StateKind,
    VelocityScan,
)
from ..ports import LoggerPort
from . import clock, scatterlib

BLOCK_SIZE = 16_384
QUADRATURE_NODES = 64
MULTIPLE_SCATTERING_LIMIT = 0.1
OVERLAP_HALF_WIDTH = 6.0  # in units of sigma_1(t_collide) / v_r
SINC_FWHM = 0.8858929413  # sinc(x)^2 = 1/2 at x = this / 2

STREAM_CLOUD1 = 0
STREAM_CLOUD2 = 1
STREAM_SCATTER = 2
STREAM_NOISE = 3

T = TypeVar("T")


def lineshape_weight(lineshape: Lineshape, dv: np.ndarray, bandwidth: float) -> np.ndarray:
    """Raman probe response to a velocity offset dv for a FWHM ``bandwidth``."""
    if lineshape is Lineshape.TOP_HAT:
        return (np.abs(dv) <= 0.5 * bandwidth).astype(float)
    return np.sinc(SINC_FWHM * dv / bandwidth) ** 2


def wavenumber_range(
    geometry: CollisionGeometry,
    cloud1: CloudSpec,
    cloud2: CloudSpec,
    *,
    thermal_average: bool = False,
    margin: float = 8.0,
) -> tuple[float, float]:
    """Wavenumbers a run can sample; a single point unless pairs use their own relative velocity."""
    k0 = geometry.wavenumber
    if not thermal_average:
        return k0, k0
    sigma_rel = math.sqrt(K_B * (cloud1.temperature + cloud2.temperature) / geometry.mass)
    lo = max(geometry.v_r - margin * sigma_rel, 1e-3 * geometry.v_r)
    hi = geometry.v_r + margin * sigma_rel
    to_k = geometry.reduced_mass / HBAR
    return lo * to_k, hi * to_k


def _rotate_from_z(vectors: np.ndarray, axes: np.ndarray) -> np.ndarray:
    """Rotate each vector by the rotation that takes z-hat onto the matching unit axis."""
    cos_a = axes[:, 2]
    k = np.stack([-axes[:, 1], axes[:, 0], np.zeros(len(axes))], axis=1)  # z-hat x axis
    sin_a = np.linalg.norm(k, axis=1)
    safe = sin_a > 1e-12
    k[safe] /= sin_a[safe, None]
    k_dot_v = np.sum(k * vectors, axis=1)
    rotated = (
        vectors * cos_a[:, None]
        + np.cross(k, vectors) * sin_a[:, None]
        + k * (k_dot_v * (1.0 - cos_a))[:, None]
    )
    flipped = ~safe & (cos_a < 0)
    rotated[~safe] = vectors[~safe]
    rotated[flipped] = -vectors[flipped]
    return rotated


class Collider:
    """Samples both clouds, decides scattering events and simulates detection."""

    def __init__(
        self,
        *,
        logger: LoggerPort,
        workers: int = 1,
        block_size: int = BLOCK_SIZE,
        quadrature_nodes: int = QUADRATURE_NODES,
    ) -> None:
        if workers < 1:
            raise ConfigurationError("must be >= 1", field="workers")
        self._logger = logger
        self._workers = workers
        self._block_size = block_size
        self._nodes, self._node_weights = np.polynomial.legendre.leggauss(quadrature_nodes)

    # ------------------------------------------------------------------
    # plumbing
    # ------------------------------------------------------------------

    @staticmethod
    def _rng(seed: int, *key: int) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=key))

    def _blocks(self, n: int) -> list[tuple[int, int, int]]:
        return [(i, start, min(start + self._block_size, n)) for i, start in enumerate(range(0, n, self._block_size))]

    def _map_blocks(self, fn: Callable[[tuple[int, int, int]], T], n: int) -> list[T]:
        blocks = self._blocks(n)
        if self._workers == 1 or len(blocks) == 1:
            return [fn(b) for b in blocks]
        with ThreadPoolExecutor(max_workers=self._workers) as pool:
            return list(pool.map(fn, blocks))

    # ------------------------------------------------------------------
    # sampling
    # ------------------------------------------------------------------

    def _sample_cloud(
        self,
        spec: CloudSpec,
        centre_vz: float,
        age: float,
        seed: int,
        key: tuple[int, int],
        samples: int,
        weight: float,
        mass: float,
    ) -> AtomEnsemble:
        sigma_v = spec.velocity_rms(mass)

        def block(b: tuple[int, int, int]) -> tuple[np.ndarray, np.ndarray]:
            index, start, stop = b
            rng = self._rng(seed, *key, index)
            x0 = rng.normal(0.0, spec.sigma_pos, size=(stop - start, 3))
            v_th = rng.normal(0.0, sigma_v, size=(stop - start, 3))
            return x0 + v_th * age, v_th

        parts = self._map_blocks(block, samples)
        positions = np.concatenate([p for p, _ in parts])
        velocities = np.concatenate([v for _, v in parts])
        velocities[:, 2] += centre_vz

        if spec.state.kind is StateKind.CLOCK_SUPERPOSITION:
            amps = ClockStateAmplitudes.after_first_pulse(samples)
            c3, c4 = amps.c3, amps.c4
        else:
            c3 = np.ones(samples, dtype=complex)
            c4 = np.zeros(samples, dtype=complex)
        return AtomEnsemble(
            positions=positions,
            velocities=velocities,
            weights=np.full(samples, weight),
            scattered=np.zeros(samples, dtype=bool),
            theta=np.zeros(samples),
            phi=np.zeros(samples),
            c3=c3,
            c4=c4,
            t_ref=0.0,
            state=spec.state,
        )

    def sample_clouds(
        self,
        cloud1: CloudSpec,
        cloud2: CloudSpec,
        geometry: CollisionGeometry,
        seed: int,
        *,
        samples: int,
        max_samples: int,
        repetition: int = 0,
    ) -> CloudEnsembles:
        """Gaussian positions and Maxwell-Boltzmann velocities at t_collide.

        Times in the ensembles are measured from t_collide; each sample stands
        for ``atoms / samples`` physical atoms.
        """
        if samples > max_samples:
            raise ConfigurationError(f"{samples} samples exceed the budget of {max_samples}", field="samples")
        if samples < 1:
            raise ConfigurationError("must be >= 1", field="samples")
        mass = geometry.mass
        age1 = geometry.t_collide
        age2 = geometry.t_collide - geometry.dt_launch
        ens1 = self._sample_cloud(
            cloud1, geometry.v_z1, age1, seed, (repetition, STREAM_CLOUD1), samples, cloud1.atoms / samples, mass
        )
        per_sample2 = cloud2.atoms / samples
        ens2 = self._sample_cloud(
            cloud2, geometry.v_z2, age2, seed, (repetition, STREAM_CLOUD2), samples, per_sample2, mass
        )
        self._logger.debug(
            "sample_clouds",
            type="sample_clouds",
            samples=samples,
            repetition=repetition,
            atoms_per_sample2=per_sample2,
        )
        return CloudEnsembles(cloud1=ens1, cloud2=ens2, atoms_per_sample2=per_sample2)

    # ------------------------------------------------------------------
    # scattering
    # ------------------------------------------------------------------

    @staticmethod
    def _effective_atoms(cloud: CloudSpec) -> float:
        """Gaussian atom number that reproduces the peak density at launch."""
        return cloud.peak_density * (2 * math.pi) ** 1.5 * cloud.sigma_pos ** 3

    def _column_integral(
        self,
        positions: np.ndarray,
        velocities: np.ndarray,
        cloud1: CloudSpec,
        geometry: CollisionGeometry,
    ) -> tuple[np.ndarray, np.ndarray]:
        """Per-atom integral of n1 along the straight path, and its mean time."""
        n_atoms = positions.shape[0]
        if cloud1.is_empty or n_atoms == 0:
            return np.zeros(n_atoms), np.zeros(n_atoms)

        t_c = geometry.t_collide
        var_v1 = K_B * cloud1.temperature / geometry.mass
        sigma1_c = math.sqrt(cloud1.sigma_pos ** 2 + var_v1 * t_c ** 2)
        half = OVERLAP_HALF_WIDTH * sigma1_c / geometry.v_r
        earliest = -(t_c - geometry.dt_launch)

        closing = velocities[:, 2] - geometry.v_z1
        centre = np.where(np.abs(closing) > 1e-12, -positions[:, 2] / np.where(closing == 0, 1.0, closing), 0.0)
        lo = np.maximum(centre - half, earliest)
        hi = np.maximum(centre + half, lo)
        mid = 0.5 * (hi + lo)
        rad = 0.5 * (hi - lo)

        tau = mid[:, None] + rad[:, None] * self._nodes[None, :]
        rel = positions[:, None, :] + velocities[:, None, :] * tau[:, :, None]
        rel[:, :, 2] -= geometry.v_z1 * tau
        var1 = cloud1.sigma_pos ** 2 + var_v1 * (t_c + tau) ** 2
        n_eff = self._effective_atoms(cloud1)
        density = n_eff / ((2 * math.pi * var1) ** 1.5) * np.exp(-np.sum(rel * rel, axis=2) / (2 * var1))
        weighted = density * self._node_weights[None, :] * rad[:, None]
        column = np.sum(weighted, axis=1)
        mean_t = np.divide(np.sum(weighted * tau, axis=1), column, out=np.zeros(n_atoms), where=column > 0)
        return column, mean_t

    def scatter_events(
        self,
        ensembles: CloudEnsembles,
        table3: PhaseShiftTable,
        table4: PhaseShiftTable,
        geometry: CollisionGeometry,
        seed: int,
        *,
        cloud1: CloudSpec,
        clearing: Clearing = Clearing.LATE,
        clock_superposition: bool = True,
        thermal_average: bool = False,
        repetition: int = 0,
        probe_vz: float | None = None,
    ) -> ScatterOutcome:
        """Split every Cloud 2 sample into unscattered and scattered branches.

        With ``clock_superposition`` the angular flux is |f3||f4| and the
        scattered coherence picks up arg(f3 f4*); otherwise Cloud 2 is pure
        |3,0> and the flux is |f3|^2. Early clearing removes Cloud 1 before
        the overlap, so nothing scatters.

        ``probe_vz`` fixes the detection angle, cos(theta_p) = probe_vz / (v_r / 2):
        the coherence phase of every scattered sample is then arg(f3 f4*) at
        theta_p while the flux keeps the sampled angle. Probing at v_z = 0 is
        90 degree scattering, where every odd partial wave drops out of the phase.
        """
        ens2 = ensembles.cloud2
        ens1 = ensembles.cloud1
        n = len(ens2)
        k_nominal = scatterlib.collision_wavenumber(geometry.v_r, geometry.reduced_mass)
        if clock_superposition:
            sigma = scatterlib.effective_cross_section(table3, table4, k_nominal)
        else:
            sigma = scatterlib.cross_sections(table3, k_nominal).total
        mean_flux = sigma / (4 * math.pi)
        table_k_min = max(table3.k_min, table4.k_min)
        table_k_max = min(table3.k_max, table4.k_max)
        active = clearing is Clearing.LATE and sigma > 0 and not cloud1.is_empty
        probe_angle = None if probe_vz is None else math.acos(min(1.0, max(-1.0, probe_vz / (0.5 * geometry.v_r))))

        def block(b: tuple[int, int, int]) -> dict[str, Any]:
            index, start, stop = b
            pos = ens2.positions[start:stop]
            vel = ens2.velocities[start:stop]
            size = stop - start
            if not active:
                zeros = np.zeros(size)
                return {"p": zeros, "t": zeros, "theta": zeros, "phi": zeros,
                        "v": vel.copy(), "x": pos.copy(), "factor": zeros, "c": np.ones(size, dtype=complex), "outside": 0}
            column, t_coll = self._column_integral(pos, vel, cloud1, geometry)
            p = sigma * geometry.v_r * column

            rng = self._rng(seed, repetition, STREAM_SCATTER, index)
            cos_t = rng.uniform(-1.0, 1.0, size)
            theta = np.arccos(cos_t)
            phi = rng.uniform(0.0, TWO_PI, size)
            partner = ens1.velocities[rng.integers(0, len(ens1), size)]

            centre = 0.5 * (vel + partner)
            if thermal_average:
                rel = vel - partner
                speed = np.linalg.norm(rel, axis=1)
                axes = rel / speed[:, None]
                k_raw = geometry.reduced_mass * speed / HBAR
                outside = int(np.count_nonzero((k_raw < table_k_min) | (k_raw > table_k_max)))
                k = np.clip(k_raw, table_k_min, table_k_max)
            else:
                speed = np.full(size, geometry.v_r)
                axes = np.tile([0.0, 0.0, 1.0], (size, 1))
                k = np.full(size, k_nominal)
                outside = 0
            sin_t = np.sin(theta)
            n_hat = np.stack([sin_t * np.cos(phi), sin_t * np.sin(phi), cos_t], axis=1)
            if thermal_average:
                n_hat = _rotate_from_z(n_hat, axes)
            v_out = centre + 0.5 * speed[:, None] * n_hat

            f3 = scatterlib.scattering_amplitude_at(table3, k, theta)
            if clock_superposition:
                f4 = scatterlib.scattering_amplitude_at(table4, k, theta)
                c = f3 * np.conj(f4)
                if probe_angle is not None:
                    theta_p = np.full(size, probe_angle)
                    at_probe = scatterlib.scattering_amplitude_at(table3, k, theta_p) * np.conj(
                        scatterlib.scattering_amplitude_at(table4, k, theta_p)
                    )
                    c = np.abs(c) * np.exp(1j * np.angle(at_probe))
            else:
                c = np.abs(f3) ** 2 + 0j
            x_at_collision = pos + vel * t_coll[:, None]
            x_ref = x_at_collision - v_out * t_coll[:, None]
            return {"p": p, "t": t_coll, "theta": theta, "phi": phi, "v": v_out, "x": x_ref,
                    "factor": np.ones(size), "c": c, "outside": outside}

        parts = self._map_blocks(block, n)
        p = np.concatenate([part["p"] for part in parts])
        c = np.concatenate([part["c"] for part in parts])
        factor = np.concatenate([part["factor"] for part in parts])

        amps2 = ClockStateAmplitudes(c3=ens2.c3, c4=ens2.c4)
        if clock_superposition:
            branch = clock.insert_scattering_phase(amps2, c, weight=ens2.weights * p * factor, reference=mean_flux or 1.0)
            sc_c3, sc_c4, sc_w = branch.amplitudes.c3, branch.amplitudes.c4, branch.weight
        else:
            sc_c3, sc_c4 = ens2.c3.copy(), ens2.c4.copy()
            sc_w = ens2.weights * p * factor * np.abs(c) / (mean_flux or 1.0)
        sc_w = np.asarray(sc_w, dtype=float)

        ensemble = AtomEnsemble(
            positions=np.concatenate([ens2.positions, np.concatenate([part["x"] for part in parts])]),
            velocities=np.concatenate([ens2.velocities, np.concatenate([part["v"] for part in parts])]),
            weights=np.concatenate([ens2.weights * (1.0 - p), sc_w]),
            scattered=np.concatenate([np.zeros(n, dtype=bool), np.ones(n, dtype=bool)]),
            theta=np.concatenate([np.zeros(n), np.concatenate([part["theta"] for part in parts])]),
            phi=np.concatenate([np.zeros(n), np.concatenate([part["phi"] for part in parts])]),
            c3=np.concatenate([ens2.c3, sc_c3]),
            c4=np.concatenate([ens2.c4, sc_c4]),
            t_ref=ens2.t_ref,
            state=ens2.state,
        )

        warnings: list[str] = []
        p_max = float(p.max()) if n else 0.0
        if p_max > MULTIPLE_SCATTERING_LIMIT:
            warnings.append(f"scattering probability up to {p_max:.3f} exceeds single-scattering limit {MULTIPLE_SCATTERING_LIMIT}")
            self._logger.warning("multiple_scattering", type="multiple_scattering", p_max=p_max)
        outside = sum(part["outside"] for part in parts)
        if outside:
            warnings.append(
                f"{outside} pair wavenumbers outside the table range [{table_k_min:.4g}, {table_k_max:.4g}] were clamped"
            )
            self._logger.warning(
                "wavenumber_clamped", type="wavenumber_clamped", pairs=outside, k_min=table_k_min, k_max=table_k_max
            )
        expected = float(np.sum(ens2.weights * p))
        self._logger.debug(
            "scatter_events",
            type="scatter_events",
            clearing=clearing.value,
            cross_section_m2=sigma,
            expected_scattered=expected,
            p_max=p_max,
            repetition=repetition,
        )
        return ScatterOutcome(ensemble=ensemble, probabilities=p, expected_scattered=expected, warnings=tuple(warnings))

    def expected_scattered_atoms(
        self,
        cloud1: CloudSpec,
        cloud2: CloudSpec,
        geometry: CollisionGeometry,
        cross_section: float,
    ) -> float:
        """sigma v_r times the time-integrated overlap of the two ballistic Gaussians."""
        if cloud1.is_empty or cross_section == 0:
            return 0.0
        t_c = geometry.t_collide
        var_v1 = K_B * cloud1.temperature / geometry.mass
        var_v2 = K_B * cloud2.temperature / geometry.mass
        n1 = self._effective_atoms(cloud1)
        n2 = cloud2.atoms

        def overlap(tau: float) -> float:
            var = (
                cloud1.sigma_pos ** 2 + var_v1 * (t_c + tau) ** 2
                + cloud2.sigma_pos ** 2 + var_v2 * (t_c - geometry.dt_launch + tau) ** 2
            )
            d = geometry.v_r * tau
            return n1 * n2 / (2 * math.pi * var) ** 1.5 * math.exp(-d * d / (2 * var))

        earliest = -(t_c - geometry.dt_launch)
        value, _ = integrate.quad(overlap, earliest, 1.0, points=[0.0], limit=200)
        return cross_section * geometry.v_r * value

    # ------------------------------------------------------------------
    # detection
    # ------------------------------------------------------------------

    def detect(
        self,
        ensemble: AtomEnsemble,
        det: DetectionSpec,
        geometry: CollisionGeometry,
        *,
        ramsey: RamseySequence | None = None,
        detunings: np.ndarray | None = None,
        scattered_frequency_shift_hz: float = 0.0,
        noise_rng: np.random.Generator | None = None,
    ) -> DetectionCounts:
        """Expected (or Poisson-sampled) counts in F=4 after the velocity-selective probe.

        Without a Ramsey sequence every probed |3,0> atom counts; with one, each
        atom contributes its |3,0> probability at every detuning.
        """
        if ramsey is not None and ensemble.state.kind is StateKind.PURE:
            raise ConfigurationError("Ramsey sequence requested for a pure-state cloud", field="cloud2.state")

        x = ensemble.positions_at(geometry.t_detect_delay)
        weight = ensemble.weights * lineshape_weight(det.lineshape, ensemble.velocities[:, 2] - det.probe_vz, det.probe_bandwidth)
        if det.aperture_enabled:
            radius = 0.5 * min(det.detection_beam_diameter, det.cavity_aperture)
            inside = (np.abs(x[:, 2]) < 0.5 * det.aperture_height) & (np.hypot(x[:, 0], x[:, 1]) < radius)
            weight = weight * inside
        weight = weight * det.efficiency
        if det.is_background:
            weight = weight * det.impurity_fraction

        sc = ensemble.scattered
        if ramsey is None:
            scattered = np.array([np.sum(weight[sc])])
            unscattered = np.array([np.sum(weight[~sc])])
        else:
            grid = ramsey.detuning_hz if detunings is None else detunings
            phasors = np.exp(1j * ClockStateAmplitudes(c3=ensemble.c3, c4=ensemble.c4).relative_phase())
            a, b = clock.ramsey_coefficients(ramsey, grid)
            unscattered = clock.ensemble_signal(a, b, float(np.sum(weight[~sc])), complex(np.sum(weight[~sc] * phasors[~sc])))
            shifted = replace(ramsey, frequency_shift_hz=ramsey.frequency_shift_hz + scattered_frequency_shift_hz)
            a_s, b_s = clock.ramsey_coefficients(shifted, grid)
            scattered = clock.ensemble_signal(a_s, b_s, float(np.sum(weight[sc])), complex(np.sum(weight[sc] * phasors[sc])))

        if noise_rng is not None:
            scattered = noise_rng.poisson(scattered).astype(float)
            unscattered = noise_rng.poisson(unscattered).astype(float)
        return DetectionCounts(scattered=scattered, unscattered=unscattered)

    # ------------------------------------------------------------------
    # runs
    # ------------------------------------------------------------------

    def _clouds_and_outcomes(
        self,
        scenario: Scenario,
        geometry: CollisionGeometry,
        table3: PhaseShiftTable,
        table4: PhaseShiftTable,
        seed: int,
        repetition: int,
        clock_superposition: bool,
        probe_vz: float | None = None,
    ) -> tuple[ScatterOutcome, ScatterOutcome]:
        sim = scenario.simulation
        clouds = self.sample_clouds(
            scenario.cloud1, scenario.cloud2, geometry, seed,
            samples=sim.samples, max_samples=sim.max_samples, repetition=repetition,
        )
        kwargs = dict(
            cloud1=scenario.cloud1,
            clock_superposition=clock_superposition,
            thermal_average=sim.thermal_average,
            repetition=repetition,
            probe_vz=probe_vz,
        )
        late = self.scatter_events(clouds, table3, table4, geometry, seed, clearing=Clearing.LATE, **kwargs)
        early = self.scatter_events(clouds, table3, table4, geometry, seed, clearing=Clearing.EARLY, **kwargs)
        return late, early

    def velocity_scan(
        self,
        scenario: Scenario,
        geometry: CollisionGeometry,
        table3: PhaseShiftTable,
        table4: PhaseShiftTable,
        seed: int | None = None,
    ) -> VelocityScan:
        """Probe-velocity sweep with microwaves off: collisions, no-collisions and both backgrounds."""
        seed = scenario.simulation.seed if seed is None else seed
        late, early = self._clouds_and_outcomes(scenario, geometry, table3, table4, seed, 0, False)
        grid = np.asarray(scenario.velocity_grid, dtype=float)
        det = scenario.detection
        noise = scenario.simulation.noise

        columns: dict[str, list[float]] = {name: [] for name in ("col", "nocol", "bg_col", "bg_nocol", "sc")}
        for i, v in enumerate(grid):
            runs = (
                ("col", late.ensemble, det.run(Clearing.LATE, probe_vz=v)),
                ("nocol", early.ensemble, det.run(Clearing.EARLY, probe_vz=v)),
                ("bg_col", late.ensemble, det.run(Clearing.LATE, background=True, probe_vz=v)),
                ("bg_nocol", early.ensemble, det.run(Clearing.EARLY, background=True, probe_vz=v)),
            )
            for j, (name, ensemble, spec) in enumerate(runs):
                rng = self._rng(seed, 0, STREAM_NOISE, i, j) if noise else None
                counts = self.detect(ensemble, spec, geometry, noise_rng=rng)
                columns[name].append(float(counts.total[0]))
                if name == "col":
                    expected = counts if rng is None else self.detect(ensemble, spec, geometry)
                    columns["sc"].append(float(expected.scattered[0]))

        scan = VelocityScan(
            v_grid=grid,
            counts_collisions=np.array(columns["col"]),
            counts_no_collisions=np.array(columns["nocol"]),
            background_collisions=np.array(columns["bg_col"]),
            background_no_collisions=np.array(columns["bg_nocol"]),
            scattered_only=np.array(columns["sc"]),
        )
        self._logger.info(
            "velocity_scan",
            type="velocity_scan",
            points=int(grid.size),
            expected_scattered=late.expected_scattered,
            difference_sum=float(np.sum(scan.difference)),
        )
        return scan

    def detected_scattered_fraction(
        self,
        scenario: Scenario,
        geometry: CollisionGeometry,
        table3: PhaseShiftTable,
        table4: PhaseShiftTable,
        seed: int | None = None,
        probe_vz: float = 0.0,
    ) -> float:
        """Scattered Cloud 2 atoms inside the probe window at ``probe_vz`` over all Cloud 2 atoms."""
        seed = scenario.simulation.seed if seed is None else seed
        late, _ = self._clouds_and_outcomes(scenario, geometry, table3, table4, seed, 0, False)
        spec = replace(scenario.detection.run(Clearing.LATE, probe_vz=probe_vz), efficiency=1.0)
        counts = self.detect(late.ensemble, spec, geometry)
        return float(counts.scattered[0]) / scenario.cloud2.atoms

    def ramsey_sequence(self, scenario: Scenario, geometry: CollisionGeometry) -> RamseySequence:
        plan = scenario.ramsey
        return RamseySequence(
            T=geometry.T,
            pulse=plan.pulse_model(scenario.launch.pulse_duration),
            pulse_phase_offset=plan.pulse_phase_offset,
            insertion_time=geometry.t_collide - geometry.t_cavity_up,
        )

    def synthesize_fringes(
        self,
        scenario: Scenario,
        geometry: CollisionGeometry,
        table3: PhaseShiftTable,
        table4: PhaseShiftTable,
        probe_vz: float = 0.0,
        seed: int | None = None,
        detunings: np.ndarray | None = None,
        noise_seed: int | None = None,
    ) -> FringeSet:
        """Scattered (at ``probe_vz``), unscattered (at v_z2) and background fringes.

        Scattered = mean over repetitions of (Late - LateBackground) - (Early - EarlyBackground);
        unscattered = Late - LateBackground at v_z2. Within a repetition all
        four measurements share the same atoms. Counts are Poisson, so each
        measurement contributes its own count as variance; shot noise draws
        from ``noise_seed`` when given.
        The scattered coherence phase is taken at the angle ``probe_vz`` selects.
        """
        if scenario.cloud2.state.kind is not StateKind.CLOCK_SUPERPOSITION:
            raise ConfigurationError("fringes need Cloud 2 in the clock superposition", field="cloud2.state")
        seed = scenario.simulation.seed if seed is None else seed
        sim = scenario.simulation
        noise_seed = seed if noise_seed is None else noise_seed
        det = scenario.detection
        seq = self.ramsey_sequence(scenario, geometry)
        grid = scenario.ramsey.detuning_grid(geometry.T) if detunings is None else np.asarray(detunings, dtype=float)
        shift = scenario.ramsey.frequency_shift_hz if scenario.ramsey.injection is InjectionMode.FREQUENCY else 0.0

        sums = {cls: np.zeros(grid.size) for cls in SignalClass}
        variances = {cls: np.zeros(grid.size) for cls in SignalClass}
        for rep in range(sim.repetitions):
            late, early = self._clouds_and_outcomes(scenario, geometry, table3, table4, seed, rep, True, probe_vz)

            def measure(index: int, ensemble: AtomEnsemble, spec: DetectionSpec) -> tuple[np.ndarray, np.ndarray]:
                rng = self._rng(noise_seed, rep, STREAM_NOISE, index) if sim.noise else None
                counts = self.detect(
                    ensemble, spec, geometry, ramsey=seq, detunings=grid,
                    scattered_frequency_shift_hz=shift, noise_rng=rng,
                )
                return counts.total, np.maximum(counts.total, 0.0)

            l_s, var_l_s = measure(0, late.ensemble, det.run(Clearing.LATE, probe_vz=probe_vz))
            e_s, var_e_s = measure(1, early.ensemble, det.run(Clearing.EARLY, probe_vz=probe_vz))
            bl_s, var_bl_s = measure(2, late.ensemble, det.run(Clearing.LATE, background=True, probe_vz=probe_vz))
            be_s, var_be_s = measure(3, early.ensemble, det.run(Clearing.EARLY, background=True, probe_vz=probe_vz))
            l_u, var_l_u = measure(4, late.ensemble, det.run(Clearing.LATE, probe_vz=geometry.v_z2))
            bl_u, var_bl_u = measure(5, late.ensemble, det.run(Clearing.LATE, background=True, probe_vz=geometry.v_z2))

            sums[SignalClass.SCATTERED] += (l_s - bl_s) - (e_s - be_s)
            variances[SignalClass.SCATTERED] += var_l_s + var_e_s + var_bl_s + var_be_s
            sums[SignalClass.UNSCATTERED] += l_u - bl_u
            variances[SignalClass.UNSCATTERED] += var_l_u + var_bl_u
            sums[SignalClass.BG_EARLY] += be_s
            variances[SignalClass.BG_EARLY] += var_be_s
            sums[SignalClass.BG_LATE] += bl_s
            variances[SignalClass.BG_LATE] += var_bl_s

        reps = sim.repetitions
        data = {
            cls: FringeData(
                detuning_hz=grid,
                counts=sums[cls] / reps,
                sigma=np.sqrt(np.maximum(variances[cls], 1.0)) / reps,
                T=geometry.T,
                signal_class=cls.value,
            )
            for cls in SignalClass
        }
        self._logger.info(
            "synthesize_fringes",
            type="synthesize_fringes",
            points=int(grid.size),
            repetitions=reps,
            probe_vz=probe_vz,
            T=geometry.T,
            scattered_peak=float(np.max(data[SignalClass.SCATTERED].counts)),
            unscattered_peak=float(np.max(data[SignalClass.UNSCATTERED].counts)),
        )
        return FringeSet(
            scattered=data[SignalClass.SCATTERED],
            unscattered=data[SignalClass.UNSCATTERED],
            bg_early=data[SignalClass.BG_EARLY],
            bg_late=data[SignalClass.BG_LATE],
            probe_vz=probe_vz,
            geometry=geometry,
        )
