"""Bit-exact file formats: binary field snapshots and the CSV time series.

Snapshot layout (all little-endian):
    magic "MHD2" | version u32 | nx u64 | ny u64 | time f64 | nfields u32
    then per field: name length u32 | name bytes (utf-8)
    then the payloads in declared order, row-major f64.
Field shapes are implied by their names (rho/b at centers, ux/uy on
faces), and the reader checks every declared length, so a truncated or
resized file fails loudly instead of shearing arrays.
"""

from __future__ import annotations

import struct
from typing import Iterable

import numpy as np

from .core import Grid, State
from .diagnostics import CSV_COLUMNS, DiagnosticsRecord, DiagnosticsSeries
from .errors import FormatError, ParseError

__all__ = [
    "write_snapshot",
    "read_snapshot",
    "write_timeseries_csv",
    "read_timeseries_csv",
    "snapshot_header",
]

MAGIC = b"MHD2"
VERSION = 1

_FIELD_ORDER = ("rho", "b", "ux", "uy")


def _field_shape(name: str, nx: int, ny: int) -> tuple[int, int]:
    if name in ("rho", "b"):
        return (nx, ny)
    if name == "ux":
        return (nx + 1, ny)
    if name == "uy":
        return (nx, ny + 1)
    raise FormatError(f"unknown field name {name!r} in snapshot")


def write_snapshot(state: State, path) -> None:
    nx, ny = state.rho.shape
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", VERSION))
        fh.write(struct.pack("<QQ", nx, ny))
        fh.write(struct.pack("<d", state.t))
        fh.write(struct.pack("<I", len(_FIELD_ORDER)))
        for name in _FIELD_ORDER:
            raw = name.encode("utf-8")
            fh.write(struct.pack("<I", len(raw)))
            fh.write(raw)
        for name in _FIELD_ORDER:
            arr = getattr(state, name)
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def snapshot_header(path) -> dict:
    """Parse just the header: magic, version, dims, time, field names."""
    with open(path, "rb") as fh:
        head = fh.read(4)
        if head != MAGIC:
            raise FormatError(f"bad magic {head!r}, expected {MAGIC!r}")
        (version,) = struct.unpack("<I", _read_exact(fh, 4))
        if version != VERSION:
            raise FormatError(f"unsupported snapshot version {version}")
        nx, ny = struct.unpack("<QQ", _read_exact(fh, 16))
        (t,) = struct.unpack("<d", _read_exact(fh, 8))
        (nf,) = struct.unpack("<I", _read_exact(fh, 4))
        names = []
        for _ in range(nf):
            (ln,) = struct.unpack("<I", _read_exact(fh, 4))
            names.append(_read_exact(fh, ln).decode("utf-8"))
        offset = fh.tell()
    return {
        "version": version,
        "nx": int(nx),
        "ny": int(ny),
        "time": t,
        "fields": names,
        "payload_offset": offset,
    }


def _read_exact(fh, n: int) -> bytes:
    buf = fh.read(n)
    if len(buf) != n:
        raise FormatError(f"truncated snapshot: wanted {n} bytes, got {len(buf)}")
    return buf


def read_snapshot(path, grid: Grid | None = None) -> State:
    """Read a snapshot back, bit-exactly; checks dims against `grid` if given."""
    hdr = snapshot_header(path)
    nx, ny = hdr["nx"], hdr["ny"]
    if grid is not None and (nx, ny) != (grid.nx, grid.ny):
        raise FormatError(
            f"snapshot dims ({nx}, {ny}) do not match grid ({grid.nx}, {grid.ny})"
        )
    arrays = {}
    with open(path, "rb") as fh:
        fh.seek(hdr["payload_offset"])
        for name in hdr["fields"]:
            shape = _field_shape(name, nx, ny)
            count = shape[0] * shape[1]
            buf = _read_exact(fh, count * 8)
            arrays[name] = np.frombuffer(buf, dtype="<f8").reshape(shape).copy()
        extra = fh.read(1)
        if extra:
            raise FormatError("snapshot has trailing bytes beyond declared payload")
    missing = [n for n in _FIELD_ORDER if n not in arrays]
    if missing:
        raise FormatError(f"snapshot lacks fields {missing}")
    return State(
        rho=arrays["rho"], b=arrays["b"], ux=arrays["ux"], uy=arrays["uy"], t=hdr["time"]
    )


# ------------------------------------------------------------------
# CSV time series
# ------------------------------------------------------------------

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_timeseries_csv(series: DiagnosticsSeries | Iterable[DiagnosticsRecord], path) -> None:
    """Header plus one row per record, 17 significant digits per value."""
    records = series.records if isinstance(series, DiagnosticsSeries) else list(series)
    try:
        with open(path, "w", newline="") as fh:
            fh.write(",".join(CSV_COLUMNS) + "\n")
            for rec in records:
                fh.write(",".join(_fmt(v) for v in rec.as_row()) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write time series to {path}: {exc}") from exc


def read_timeseries_csv(path) -> DiagnosticsSeries:
    series = DiagnosticsSeries()
    with open(path, "r", newline="") as fh:
        header = fh.readline().rstrip("\n")
        if header.split(",") != list(CSV_COLUMNS):
            raise ParseError(f"{path}: unexpected CSV header {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != len(CSV_COLUMNS):
                raise ParseError(f"{path}:{lineno}: expected {len(CSV_COLUMNS)} columns")
            try:
                vals = [float(p) for p in parts]
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from exc
            series.append(DiagnosticsRecord(*vals))
    return series
