"""Field snapshot files (binary and CSV).

Binary layout, all little-endian::

    bytes 0-3    magic  b"JSNL"
    bytes 4-7    u32    format version (1)
    bytes 8-11   u32    number of grid points N
    bytes 12-15  u32    reserved (0)
    payload      N float64 (density) or 2N float64 interleaved re, im (wave)

The grid length is not stored; readers are given it or infer it from CSV x.
"""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .grid import DensityField, Grid, WaveField

MAGIC = b"JSNL"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIII")
FLOAT_FMT = "{:.16e}"


class SnapshotFormatError(ValueError):
    pass


def encode_snapshot(field: DensityField | WaveField) -> bytes:
    n = field.grid.n_points
    if isinstance(field, WaveField):
        payload = np.empty(2 * n, dtype="<f8")
        payload[0::2] = field.values.real
        payload[1::2] = field.values.imag
    else:
        payload = np.asarray(field.values, dtype="<f8")
    return _HEADER.pack(MAGIC, FORMAT_VERSION, n, 0) + payload.tobytes()


def decode_snapshot(data: bytes) -> tuple[str, np.ndarray]:
    """Return ``(kind, values)`` with kind ``"density"`` or ``"wave"``."""
    if len(data) < _HEADER.size:
        raise SnapshotFormatError("file shorter than header")
    magic, version, n, _ = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise SnapshotFormatError(f"bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise SnapshotFormatError(f"unsupported format version {version}")
    body = np.frombuffer(data, dtype="<f8", offset=_HEADER.size)
    if body.size == n:
        return "density", body.astype(float)
    if body.size == 2 * n:
        return "wave", body[0::2] + 1j * body[1::2]
    raise SnapshotFormatError(f"payload of {body.size} values does not match N={n}")


def write_snapshot(path, field: DensityField | WaveField) -> None:
    Path(path).write_bytes(encode_snapshot(field))


def read_snapshot(path, grid: Grid) -> DensityField | WaveField:
    kind, values = decode_snapshot(Path(path).read_bytes())
    if values.size != grid.n_points:
        raise SnapshotFormatError(f"snapshot has N={values.size}, grid has {grid.n_points}")
    return DensityField(grid, values) if kind == "density" else WaveField(grid, values)


def fmt(v: float) -> str:
    return FLOAT_FMT.format(float(v))


def write_field_csv(path, field: DensityField | WaveField) -> None:
    x = field.grid.x
    with open(path, "w", newline="") as fh:
        if isinstance(field, WaveField):
            fh.write("x,re,im\n")
            for xi, v in zip(x, field.values):
                fh.write(f"{fmt(xi)},{fmt(v.real)},{fmt(v.imag)}\n")
        else:
            fh.write("x,value\n")
            for xi, v in zip(x, field.values):
                fh.write(f"{fmt(xi)},{fmt(v)}\n")


def read_field_csv(path) -> DensityField | WaveField:
    """Read a field CSV, inferring the grid from the (uniform) x column."""
    rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    x = rows[:, 0]
    dx = (x[-1] - x[0]) / (len(x) - 1)
    grid = Grid(n_points=len(x), length=dx * len(x), origin=x[0])
    if rows.shape[1] == 3:
        return WaveField(grid, rows[:, 1] + 1j * rows[:, 2])
    if rows.shape[1] == 2:
        return DensityField(grid, rows[:, 1])
    raise SnapshotFormatError(f"expected 2 or 3 CSV columns, got {rows.shape[1]}")


def read_field(path, grid: Grid | None = None) -> DensityField | WaveField:
    """Read a ``.csv`` or binary snapshot; binary files need ``grid``."""
    if str(path).lower().endswith(".csv"):
        f = read_field_csv(path)
        if grid is not None and f.grid.n_points != grid.n_points:
            raise SnapshotFormatError("CSV point count disagrees with the configured grid")
        return f
    if grid is None:
        raise SnapshotFormatError("binary snapshots need an explicit grid (length is not stored)")
    return read_snapshot(path, grid)
