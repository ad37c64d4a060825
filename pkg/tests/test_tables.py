import numpy as np
import pytest

from qptscale import InputError
from qptscale.tables import ResultTable, read_table, write_table


def sample_table():
    return ResultTable(
        columns={
            "n": [1, 2, 30000000000],
            "value": [0.1, -3.5e-120, 1.0],
            "tag": ["a", "b", "c"],
        },
        units={"n": "1", "value": "energy", "tag": "label"},
        provenance={"config_hash": "deadbeef", "package_version": "0.1.0"},
    )


def test_round_trip_is_lossless(tmp_path):
    path = tmp_path / "t.csv"
    table = sample_table()
    write_table(table, str(path))
    back = read_table(str(path))
    assert back.columns == table.columns
    assert back.units == table.units
    assert back.provenance == table.provenance
    # int stays int, float stays float
    assert isinstance(back.columns["n"][0], int)
    assert isinstance(back.columns["value"][2], float)


def test_floats_round_trip_exactly(tmp_path):
    rng = np.random.default_rng(3)
    values = [float(x) for x in rng.standard_normal(50) * 10.0 ** rng.integers(-30, 30, 50)]
    table = ResultTable(columns={"x": values}, provenance={"k": "v"})
    path = tmp_path / "f.csv"
    write_table(table, str(path))
    assert read_table(str(path)).columns["x"] == values


def test_mismatched_column_lengths_rejected():
    with pytest.raises(InputError):
        ResultTable(columns={"a": [1], "b": [1, 2]}, provenance={"k": "v"})


def test_provenance_required():
    with pytest.raises(InputError):
        ResultTable(columns={"a": [1]}, provenance={})


def test_cells_that_break_the_dialect_rejected(tmp_path):
    table = ResultTable(columns={"a": ["x,y"]}, provenance={"k": "v"})
    with pytest.raises(InputError):
        write_table(table, str(tmp_path / "bad.csv"))


def test_write_creates_parent_directories(tmp_path):
    path = tmp_path / "deep" / "nested" / "t.csv"
    write_table(sample_table(), str(path))
    assert path.exists()


def test_no_temp_files_left_behind(tmp_path):
    path = tmp_path / "t.csv"
    write_table(sample_table(), str(path))
    leftovers = [p for p in tmp_path.iterdir() if p.name != "t.csv"]
    assert leftovers == []
