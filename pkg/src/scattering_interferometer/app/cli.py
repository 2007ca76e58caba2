from __future__ import annotations

import json
from collections.abc import Iterator
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

import typer

from .config import AppConfig, ExperimentConfig, config_sha256, defaults_listing, load_experiment_config
from .container import Container
from .cli_formatter import (
    campaign_document,
    fit_document,
    format_campaign_result,
    format_defaults,
    format_fit_result,
    format_fringe_run,
    format_phase_table_report,
    format_velocity_scan,
)
from ..core.domain.exceptions import ConfigurationError, InterferometerError, ParameterError
from ..core.domain.models import CampaignParameter, FitWindow, InjectionMode, Scenario, SignalClass
from ..core.ports import OutputWriterPort
from ..core.services import fountain
from ..infra.table_io import (
    FLOAT,
    FRINGE_HEADER,
    PHASE_TABLE_HEADER,
    VELOCITY_HEADER,
    fringe_rows,
    phase_table_rows,
    read_fringes,
    velocity_rows,
)

app = typer.Typer(add_completion=False, no_args_is_help=True)

EXIT_RUNTIME = 1
EXIT_CONFIG = 2


@dataclass
class RunContext:
    """Global options shared by every subcommand."""

    experiment: ExperimentConfig
    config_path: Path | None
    out: Path | None
    timestamp: bool

    @property
    def sha256(self) -> str:
        return config_sha256(self.experiment)

    @property
    def seed(self) -> int:
        return self.experiment.simulation.seed

    def run_id(self, command: str) -> str:
        return f"{command}_{self.sha256[:12]}_{self.seed}"

    def scenario(self) -> Scenario:
        base_dir = self.config_path.parent if self.config_path else None
        return self.experiment.to_scenario(base_dir)

    def output_path(self, container: Container, command: str, suffix: str) -> Path:
        if self.out is not None:
            return self.out
        return Path(container.config.directories.results_dir()) / f"{self.run_id(command)}{suffix}"


@contextmanager
def _session(state: RunContext, command: str) -> Iterator[Container]:
    """Container with an initialised run logger; domain errors become exit codes."""
    config = AppConfig()
    config.runtime.run_id = state.run_id(command)
    config.logging.console_output = True
    container = Container()
    container.config.from_pydantic(config)
    try:
        container.init_resources()
        logger = container.logger()
        logger.info(
            "run_started",
            type="run_started",
            command=command,
            config_sha256=state.sha256,
            seed=state.seed,
        )
        yield container
    except (ParameterError, ConfigurationError) as e:
        typer.echo(f"Error: {e}", err=True)
        raise typer.Exit(code=EXIT_CONFIG)
    except InterferometerError as e:
        container.logger().error("run_failed", type="run_failed", error=str(e))
        typer.echo(f"Error: {e}", err=True)
        raise typer.Exit(code=EXIT_RUNTIME)
    finally:
        container.shutdown_resources()


def _writer(container: Container, state: RunContext) -> OutputWriterPort:
    return container.output_writer(config_sha256=state.sha256, seed=state.seed, timestamp=state.timestamp)


@app.callback(invoke_without_command=True)
def main(
    ctx: typer.Context,
    config: Path | None = typer.Option(None, "--config", help="Experiment config (JSON)"),
    seed: int | None = typer.Option(None, "--seed", min=0, help="Override simulation.seed"),
    out: Path | None = typer.Option(None, "--out", help="Output file (default: results dir, named by run id)"),
    no_noise: bool = typer.Option(False, "--no-noise", help="Disable Poisson shot noise"),
    print_defaults: bool = typer.Option(False, "--print-defaults", help="List every config default with its provenance tag"),
    no_timestamp: bool = typer.Option(False, "--no-timestamp", help="Omit the generated_at line from outputs"),
):
    """Simulate the colliding-cloud scattering interferometer."""
    if print_defaults:
        typer.echo(format_defaults(defaults_listing()))
        raise typer.Exit()
    if ctx.invoked_subcommand is None:
        typer.echo(ctx.get_help())
        raise typer.Exit(code=EXIT_CONFIG)

    try:
        experiment = load_experiment_config(config)
        experiment = experiment.with_overrides(seed=seed, noise=False if no_noise else None)
    except (ConfigurationError, ParameterError) as e:
        typer.echo(f"Error: {e}", err=True)
        raise typer.Exit(code=EXIT_CONFIG)
    ctx.obj = RunContext(experiment=experiment, config_path=config, out=out, timestamp=not no_timestamp)


@app.command()
def phaseshifts(
    ctx: typer.Context,
    k_min: float | None = typer.Option(None, "--k-min", help="Smallest wavenumber (1/m); default half the collision k"),
    k_max: float | None = typer.Option(None, "--k-max", help="Largest wavenumber (1/m); default twice the collision k"),
    k_points: int = typer.Option(31, "--k-points", help="Grid points before refinement"),
    l_max: int | None = typer.Option(None, "--l-max", help="Highest partial wave (default: channels.l_max)"),
    channel: int = typer.Option(3, "--channel", help="Clock state of the channel: 3 or 4"),
):
    """Tabulate phase shifts of one channel and write the table CSV."""
    state: RunContext = ctx.obj
    if channel not in (3, 4):
        typer.echo("Error: --channel must be 3 or 4", err=True)
        raise typer.Exit(code=EXIT_CONFIG)

    with _session(state, "phaseshifts") as container:
        scenario = state.scenario()
        if k_min is None or k_max is None:
            k_c = fountain.collision_geometry(scenario.launch, scenario.mass).wavenumber
            k_min = 0.5 * k_c if k_min is None else k_min
            k_max = 2.0 * k_c if k_max is None else k_max
        uc = container.phaseshifts_uc()
        report = uc.execute(
            channel=scenario.channel3 if channel == 3 else scenario.channel4,
            k_min=k_min,
            k_max=k_max,
            k_points=k_points,
            l_max=scenario.l_max if l_max is None else l_max,
        )
        path = _writer(container, state).write_csv(
            state.output_path(container, "phaseshifts", ".csv"),
            PHASE_TABLE_HEADER,
            phase_table_rows(report.table),
            formats=[FLOAT, "%d", FLOAT],
        )
        typer.echo(format_phase_table_report(report))
        typer.echo(f"Table: {path}")


@app.command()
def veldist(ctx: typer.Context):
    """Probe-velocity scan with the microwaves off."""
    state: RunContext = ctx.obj
    with _session(state, "veldist") as container:
        uc = container.veldist_uc()
        run, scan = uc.execute(scenario=state.scenario())
        path = _writer(container, state).write_csv(
            state.output_path(container, "veldist", ".csv"),
            VELOCITY_HEADER,
            velocity_rows(scan),
            formats=[FLOAT] * len(VELOCITY_HEADER),
        )
        typer.echo(format_velocity_scan(run.geometry, scan))
        typer.echo(f"Scan: {path}")


@app.command()
def fringes(
    ctx: typer.Context,
    probe_vz: float = typer.Option(0.0, "--probe-vz", help="Probe velocity for the scattered class (m/s)"),
):
    """Synthesize scattered, unscattered and background fringes."""
    state: RunContext = ctx.obj
    with _session(state, "fringes") as container:
        scenario = state.scenario()
        run = container.fringes_uc().execute(scenario=scenario, probe_vz=probe_vz)
        unscattered = container.fit_uc().execute(data=run.fringes.unscattered, window=scenario.fit_window)
        path = _writer(container, state).write_csv(
            state.output_path(container, "fringes", ".csv"),
            FRINGE_HEADER,
            fringe_rows(run.fringes),
            formats=[FLOAT, None, FLOAT, FLOAT],
        )
        typer.echo(format_fringe_run(run, unscattered))
        typer.echo(f"Fringes: {path}")


def _parse_values(values: str) -> list[float]:
    try:
        return [float(v) for v in values.split(",") if v.strip()]
    except ValueError as exc:
        raise ParameterError("values", values, "must be comma-separated numbers") from exc


@app.command()
def campaign(
    ctx: typer.Context,
    vary: CampaignParameter = typer.Option(..., "--vary", help="Parameter to vary"),
    values: str = typer.Option(..., "--values", help="Comma-separated values (s for T, m^-3 for density)"),
    inject: InjectionMode = typer.Option(InjectionMode.PHASE, "--inject", help="Scattered-branch control"),
    frequency_shift_hz: float = typer.Option(0.0, "--frequency-shift-hz", help="Shift for --inject frequency (Hz)"),
    json_output: bool = typer.Option(False, "--json", help="Output result as JSON"),
):
    """Fit the scattered phase across T values or target densities."""
    state: RunContext = ctx.obj
    with _session(state, "campaign") as container:
        uc = container.campaign_uc()
        result = uc.execute(
            scenario=state.scenario(),
            parameter=vary,
            values=_parse_values(values),
            injection=inject,
            frequency_shift_hz=frequency_shift_hz,
        )
        writer = _writer(container, state)
        document = campaign_document(result)
        json_path = writer.write_json(state.output_path(container, "campaign", ".json"), document)
        rows = [
            [p.value, p.fit.phi, p.fit.phi_err, p.fit.amplitude, p.fit.amplitude_err, p.fit.offset,
             p.fit.chi2_per_dof, int(p.flagged)]
            for p in result.points
        ]
        writer.write_csv(
            json_path.with_suffix(".points.csv"),
            ["value", "phi_rad", "phi_err_rad", "amp", "amp_err", "offset", "chi2_per_dof", "flagged"],
            rows,
            formats=[FLOAT] * 7 + ["%d"],
        )
        if json_output:
            typer.echo(json.dumps(json.loads(json_path.read_text(encoding="utf-8")), ensure_ascii=False, indent=2))
        else:
            typer.echo(format_campaign_result(result))


@app.command()
def fit(
    ctx: typer.Context,
    input_csv: Path = typer.Argument(..., help="Fringe CSV (detuning_hz,class,counts,sigma)"),
    T: float = typer.Option(..., "--T", help="Interrogation time (s)"),
    signal_class: SignalClass = typer.Option(SignalClass.SCATTERED, "--class", help="Fringe class to fit"),
    window: FitWindow = typer.Option(FitWindow.FULL, "--window", help="Fit window"),
    json_output: bool = typer.Option(False, "--json", help="Output result as JSON"),
):
    """Fit one fringe class of a CSV file."""
    state: RunContext = ctx.obj
    with _session(state, "fit") as container:
        data = read_fringes(input_csv, T=T, signal_class=signal_class.value)
        result = container.fit_uc().execute(data=data, window=window)
        path = _writer(container, state).write_json(state.output_path(container, "fit", ".json"), fit_document(result))
        if json_output:
            typer.echo(json.dumps(json.loads(path.read_text(encoding="utf-8")), ensure_ascii=False, indent=2))
        else:
            typer.echo(format_fit_result(result, T))


if __name__ == "__main__":
    app()
