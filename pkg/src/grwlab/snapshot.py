"""QSL1 binary snapshot format for wavefunctions.

Layout (little-endian): magic b"QSL1", u32 version = 1, u64 n_points,
f64 x_min, f64 dx, f64 mass, f64 length_unit_m, f64 mass_unit_kg, then
n_points interleaved (re, im) f64 pairs.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import SnapshotFormatError
from .qstate import Grid1D, WaveFunction
from .units import UnitSystem

MAGIC = b"QSL1"
VERSION = 1
_HEADER = struct.Struct("<4sIQddddd")


def snapshot_bytes(psi: WaveFunction, units: UnitSystem) -> bytes:
    header = _HEADER.pack(
        MAGIC,
        VERSION,
        psi.grid.n_points,
        psi.grid.x_min,
        psi.grid.dx,
        psi.mass,
        units.length_unit_m,
        units.mass_unit_kg,
    )
    payload = np.empty(2 * psi.grid.n_points, dtype="<f8")
    payload[0::2] = psi.amps.real
    payload[1::2] = psi.amps.imag
    return header + payload.tobytes()


def write_snapshot(psi: WaveFunction, path, units: UnitSystem) -> None:
    Path(path).write_bytes(snapshot_bytes(psi, units))


def parse_snapshot(data: bytes) -> tuple[WaveFunction, UnitSystem]:
    if len(data) < 4 or data[:4] != MAGIC:
        raise SnapshotFormatError(f"bad magic {data[:4]!r}, expected {MAGIC!r}", 0)
    if len(data) < _HEADER.size:
        raise SnapshotFormatError("truncated header", len(data))
    _, version, n, x_min, dx, mass, length_unit_m, mass_unit_kg = _HEADER.unpack_from(
        data
    )
    if version != VERSION:
        raise SnapshotFormatError(f"unsupported version {version}", 4)
    expected = _HEADER.size + 16 * n
    if len(data) < expected:
        raise SnapshotFormatError(
            f"truncated payload: have {len(data)} bytes, need {expected}", len(data)
        )
    raw = np.frombuffer(data, dtype="<f8", count=2 * n, offset=_HEADER.size)
    amps = raw[0::2] + 1j * raw[1::2]
    grid = Grid1D(n_points=int(n), x_min=x_min, dx=dx)
    psi = WaveFunction(grid, amps, mass)
    units = UnitSystem(length_unit_m=length_unit_m, mass_unit_kg=mass_unit_kg)
    return psi, units


def read_snapshot(path) -> tuple[WaveFunction, UnitSystem]:
    return parse_snapshot(Path(path).read_bytes())
