"""Tests for the 'phaseshifts' CLI command."""
from typer.testing import CliRunner

from scattering_interferometer.app.cli import app
from tests.scattering_interferometer.app.conftest import data_rows, small_experiment, write_config

runner = CliRunner()


def test_phaseshifts_for_square_well_channel(home, tmp_path):
    config = write_config(
        tmp_path / "well.json",
        small_experiment(channels={"clock3": {"kind": "square_well", "radius": 1e-8, "scattering_length": -5e-9}}),
    )
    out = tmp_path / "t3.csv"

    result = runner.invoke(app, ["--config", str(config), "--out", str(out), "phaseshifts", "--k-points", "5"])

    assert result.exit_code == 0, result.output
    rows = data_rows(out)
    assert rows[0] == "k_per_m,l,delta_rad"
    assert len(rows) - 1 >= 5
    assert {row.split(",")[1] for row in rows[1:]} == {"0"}
    assert "Scattering length" in result.stdout


def test_phaseshifts_for_injected_channel(home, small_config, tmp_path):
    out = tmp_path / "t4.csv"

    result = runner.invoke(app, ["--config", str(small_config), "--out", str(out), "phaseshifts", "--channel", "4"])

    assert result.exit_code == 0, result.output
    deltas = {float(row.split(",")[2]) for row in data_rows(out)[1:]}
    assert deltas == {0.741}
    assert "PHASE SHIFTS |4,0>" in result.stdout


def test_phaseshifts_rejects_unknown_channel(home):
    result = runner.invoke(app, ["phaseshifts", "--channel", "5"])
    assert result.exit_code == 2


def test_phaseshifts_rejects_inverted_range(home, small_config):
    result = runner.invoke(app, ["--config", str(small_config), "phaseshifts", "--k-min", "2e8", "--k-max", "1e8"])
    assert result.exit_code == 2
