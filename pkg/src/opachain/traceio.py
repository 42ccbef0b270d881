"""Spectrum-trace CSV files.

Format: a literal header line ``wavelength_nm,value,unit`` followed by one
row per sample, ``<wavelength>,<value>,<db|ratio>``.  Values use the decimal
point (no locale), LF line endings, and 12 significant digits, so a
write/read cycle is lossless at that precision and a second write reproduces
the file byte for byte.  The unit must be the same on every row and
wavelengths must increase strictly.
"""

import numpy as np

from .calibration import SweepPoint
from .dispersion import SpectrumTrace
from .errors import DomainError, TraceFormatError

__all__ = ["read_trace", "write_trace", "read_sweep", "write_sweep",
           "HEADER", "SWEEP_HEADER"]

HEADER = "wavelength_nm,value,unit"
SWEEP_HEADER = "pump_w,r_minus_db,r_plus_db"


def _format_row(wl, value, unit):
    return f"{wl:.12g},{value:.12g},{unit}\n"


def write_trace(trace, destination):
    """Write a trace to a path or text file object."""
    if hasattr(destination, "write"):
        _write(trace, destination)
        return
    with open(destination, "w", encoding="utf-8", newline="") as fh:
        _write(trace, fh)


def _write(trace, fh):
    fh.write(HEADER + "\n")
    for wl, value in zip(trace.wavelength_nm, trace.values):
        fh.write(_format_row(wl, value, trace.unit))


def read_trace(source):
    """Read a trace from a path or text file object.

    Raises :class:`TraceFormatError` with the offending 1-based row number on
    any malformed content.
    """
    if hasattr(source, "read"):
        return _read(source)
    with open(source, "r", encoding="utf-8") as fh:
        return _read(fh)


def _read(fh):
    lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise TraceFormatError("empty file")
    if lines[0].strip() != HEADER:
        raise TraceFormatError(f"expected header {HEADER!r}, got {lines[0]!r}", row=1)
    wavelengths, values = [], []
    unit = None
    for row_no, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 3:
            raise TraceFormatError(f"expected 3 fields, got {len(parts)}", row=row_no)
        try:
            wl = float(parts[0])
            value = float(parts[1])
        except ValueError:
            raise TraceFormatError(f"non-numeric field in {line!r}", row=row_no) from None
        row_unit = parts[2].strip()
        if row_unit not in ("db", "ratio"):
            raise TraceFormatError(f"unit must be 'db' or 'ratio', got {row_unit!r}",
                                   row=row_no)
        if unit is None:
            unit = row_unit
        elif row_unit != unit:
            raise TraceFormatError(f"mixed units: {row_unit!r} after {unit!r}", row=row_no)
        if wavelengths and wl <= wavelengths[-1]:
            raise TraceFormatError(
                f"wavelengths must increase strictly ({wl} after {wavelengths[-1]})",
                row=row_no)
        wavelengths.append(wl)
        values.append(value)
    if not wavelengths:
        raise TraceFormatError("no data rows")
    try:
        return SpectrumTrace(np.array(wavelengths), np.array(values), unit)
    except DomainError as exc:
        raise TraceFormatError(str(exc)) from None


def read_sweep(source):
    """Read pump-sweep samples from ``pump_w,r_minus_db,r_plus_db`` CSV."""
    if not hasattr(source, "read"):
        with open(source, "r", encoding="utf-8") as fh:
            return read_sweep(fh)
    lines = source.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0].strip() != SWEEP_HEADER:
        raise TraceFormatError(
            f"expected header {SWEEP_HEADER!r}, got {(lines[0] if lines else '')!r}",
            row=1)
    points = []
    for row_no, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 3:
            raise TraceFormatError(f"expected 3 fields, got {len(parts)}", row=row_no)
        try:
            values = [float(part) for part in parts]
        except ValueError:
            raise TraceFormatError(f"non-numeric field in {line!r}", row=row_no) from None
        try:
            points.append(SweepPoint(*values))
        except DomainError as exc:
            raise TraceFormatError(str(exc), row=row_no) from None
    if not points:
        raise TraceFormatError("no data rows")
    return points


def write_sweep(points, destination):
    """Write pump-sweep samples as ``pump_w,r_minus_db,r_plus_db`` CSV."""
    if not hasattr(destination, "write"):
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            write_sweep(points, fh)
            return
    destination.write(SWEEP_HEADER + "\n")
    for pt in points:
        destination.write(
            f"{pt.pump_w:.12g},{pt.r_minus_db:.12g},{pt.r_plus_db:.12g}\n")
