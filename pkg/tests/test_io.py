import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from jsnlse.grid import DensityField, WaveField, centered_grid
from jsnlse.io import (SnapshotFormatError, decode_snapshot, encode_snapshot, read_field,
                       write_field_csv, write_snapshot)

GRID = centered_grid(3.2, 16)
finite = st.floats(-1e6, 1e6, allow_nan=False)


@settings(max_examples=30)
@given(arrays(float, 16, elements=finite), arrays(float, 16, elements=finite))
def test_wave_snapshot_round_trip(re, im):
    kind, values = decode_snapshot(encode_snapshot(WaveField(GRID, re + 1j * im)))
    assert kind == "wave"
    assert np.array_equal(values, re + 1j * im)


def test_density_snapshot_and_csv_round_trip(tmp_path):
    rho = DensityField(GRID, np.linspace(0.1, 1.0, 16))
    write_snapshot(tmp_path / "r.bin", rho)
    assert np.array_equal(read_field(tmp_path / "r.bin", GRID).values, rho.values)
    write_field_csv(tmp_path / "r.csv", rho)
    back = read_field(tmp_path / "r.csv")
    assert np.array_equal(back.values, rho.values)
    assert back.grid.n_points == 16 and back.grid.length == pytest.approx(3.2)


def test_bad_snapshots(tmp_path):
    with pytest.raises(SnapshotFormatError):
        decode_snapshot(b"XXXX" + bytes(12))
    with pytest.raises(SnapshotFormatError):
        decode_snapshot(b"JS")
    good = encode_snapshot(DensityField(GRID, np.ones(16)))
    with pytest.raises(SnapshotFormatError):
        decode_snapshot(good[:-8])
    (tmp_path / "a.bin").write_bytes(good)
    with pytest.raises(SnapshotFormatError):
        read_field(tmp_path / "a.bin")
