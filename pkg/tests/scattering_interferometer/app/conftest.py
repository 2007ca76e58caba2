"""Shared fixtures for app-level tests."""
import json
from pathlib import Path

import pytest

DATA_DIR = Path(__file__).parent / "data"
GOLDEN_FRINGES = DATA_DIR / "golden_fringes.csv"


def small_experiment(**sections) -> dict:
    """Default experiment with a small, noise-free Monte Carlo."""
    config = {
        "ramsey": {"points": 41},
        "detection": {"scan_vz_min": -0.06, "scan_vz_max": 0.06, "scan_points": 25},
        "simulation": {"seed": 7, "noise": False, "samples": 2000, "max_samples": 100000, "repetitions": 1},
    }
    for name, values in sections.items():
        config[name] = {**config.get(name, {}), **values}
    return config


def write_config(path: Path, document: dict | str) -> Path:
    text = document if isinstance(document, str) else json.dumps(document, indent=2)
    path.write_text(text, encoding="utf-8")
    return path


def data_rows(path: Path) -> list[str]:
    """CSV lines after the provenance comments."""
    return [line for line in path.read_text(encoding="utf-8").splitlines() if not line.startswith("#")]


@pytest.fixture
def home(tmp_path, monkeypatch):
    """Isolated home directory for logs and default outputs."""
    home_dir = tmp_path / "home"
    monkeypatch.setenv("SCATTERING_INTERFEROMETER_DIRECTORIES__HOME", str(home_dir))
    return home_dir


@pytest.fixture
def small_config(tmp_path):
    return write_config(tmp_path / "experiment.json", small_experiment())
