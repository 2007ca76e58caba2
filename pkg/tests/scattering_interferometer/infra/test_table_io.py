import numpy as np
import pytest

from scattering_interferometer.core.domain.exceptions import ParameterError
from scattering_interferometer.core.domain.models import PhaseShiftTable, VelocityScan
from scattering_interferometer.infra.result_store import OutputWriter
from scattering_interferometer.infra.table_io import (
    FLOAT,
    PHASE_TABLE_HEADER,
    phase_table_rows,
    read_fringes,
    read_phase_table,
    velocity_rows,
)
from tests.scattering_interferometer.core.conftest import FakeLogger


def test_phase_table_written_by_output_writer_reads_back(tmp_path):
    table = PhaseShiftTable(
        k_grid=np.array([1e8, 1.5e8, 2e8]),
        deltas=np.array([[0.600, 0.596, 0.590], [0.010, 0.012, 0.015]]),
    )
    path = OutputWriter(logger=FakeLogger(), config_sha256="abc", seed=1).write_csv(
        tmp_path / "t3.csv", PHASE_TABLE_HEADER, phase_table_rows(table), formats=[FLOAT, "%d", FLOAT]
    )

    loaded = read_phase_table(path)
    assert np.array_equal(loaded.k_grid, table.k_grid)
    assert np.array_equal(loaded.deltas, table.deltas)


def test_phase_table_with_coarse_steps_is_rejected(tmp_path):
    """A loaded table must step by less than 0.01 rad between adjacent wavenumbers."""
    path = tmp_path / "coarse.csv"
    path.write_text("k_per_m,l,delta_rad\n1e8,0,0.60\n2e8,0,0.58\n", encoding="utf-8")
    with pytest.raises(ParameterError, match="adjacent phase shifts"):
        read_phase_table(path)


def test_phase_table_partial_waves_must_be_contiguous(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("k_per_m,l,delta_rad\n1e8,0,0.6\n1e8,2,0.1\n", encoding="utf-8")
    with pytest.raises(ParameterError):
        read_phase_table(path)


def test_phase_table_grids_must_match(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("k_per_m,l,delta_rad\n1e8,0,0.6\n2e8,0,0.5\n1e8,1,0.1\n", encoding="utf-8")
    with pytest.raises(ParameterError):
        read_phase_table(path)


def test_read_fringes_filters_class_and_sorts(tmp_path):
    path = tmp_path / "fringes.csv"
    path.write_text(
        "# config_sha256=abc seed=1\n"
        "detuning_hz,class,counts,sigma\n"
        "2.0,scattered,30,5\n"
        "-2.0,scattered,10,3\n"
        "0.0,unscattered,1000,31\n"
        "0.0,scattered,20,4\n",
        encoding="utf-8",
    )

    data = read_fringes(path, T=0.115)
    assert data.detuning_hz.tolist() == [-2.0, 0.0, 2.0]
    assert data.counts.tolist() == [10.0, 20.0, 30.0]
    assert data.sigma.tolist() == [3.0, 4.0, 5.0]

    other = read_fringes(path, T=0.115, signal_class="unscattered")
    assert other.signal_class == "unscattered"
    assert len(other) == 1


def test_read_fringes_without_class_or_sigma(tmp_path):
    path = tmp_path / "plain.csv"
    path.write_text("detuning_hz,counts\n1.0,5\n0.5,4\n", encoding="utf-8")

    data = read_fringes(path, T=0.2)
    assert data.detuning_hz.tolist() == [0.5, 1.0]
    assert np.all(data.sigma == 0)


@pytest.mark.parametrize(
    "content",
    [
        "",
        "detuning_hz,class,sigma\n1.0,scattered,1\n",
        "detuning_hz,class,counts\n1.0,scattered,abc\n",
        "detuning_hz,class,counts\n1.0,bg_early,3\n",
    ],
)
def test_read_fringes_rejects_bad_files(tmp_path, content):
    path = tmp_path / "bad.csv"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(ParameterError):
        read_fringes(path, T=0.1)


def test_read_fringes_missing_file(tmp_path):
    with pytest.raises(ParameterError):
        read_fringes(tmp_path / "absent.csv", T=0.1)


def test_velocity_rows_include_difference():
    scan = VelocityScan(
        v_grid=np.array([0.0, 0.05]),
        counts_collisions=np.array([10.0, 100.0]),
        counts_no_collisions=np.array([0.0, 120.0]),
        background_collisions=np.array([0.01, 0.1]),
        background_no_collisions=np.array([0.0, 0.12]),
    )
    rows = velocity_rows(scan)
    assert rows[0] == pytest.approx([0.0, 10.0, 0.0, 0.01, 0.0, 9.99])
    assert rows[1][-1] == pytest.approx(99.9 - 119.88)
