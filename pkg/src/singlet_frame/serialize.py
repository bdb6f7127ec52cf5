"""File formats: CSV/JSON emitters and parsers for records, counts, curves.

All text output is UTF-8 with LF line endings and a header row on CSV.
Floats are written with 17 significant digits in CSV; JSON floats use
Python's shortest round-trip representation.  Files are written
atomically (temp file + rename in the target directory).

Outcome-record CSV: header ``index,a,b``; one row per pair with a 0-based
index and outcomes in {-1, +1}.  Settings are not carried by the CSV
form; the JSON form stores them under ``x`` and ``y``.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .bayes import SignTally, posterior_theta_density
from .core import Direction
from .sampler import OutcomeRecord

__all__ = [
    "ParseError",
    "format_float",
    "write_text_atomic",
    "write_csv_atomic",
    "write_json_atomic",
    "record_to_csv",
    "read_record_arrays_csv",
    "record_to_json",
    "record_from_json",
    "write_density_curve_csv",
]

RECORD_CSV_HEADER = ["index", "a", "b"]


class ParseError(ValueError):
    """Input file violates the documented format; message carries the location."""


def format_float(value: float) -> str:
    """17-significant-digit text form, enough to round-trip a double."""
    return "%.17g" % value


def write_text_atomic(path, text: str) -> None:
    """Write UTF-8 text via a temp file and rename, so readers never see partial files."""
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=target.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_csv_atomic(path, header: list[str], rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    write_text_atomic(path, buf.getvalue())


def write_json_atomic(path, obj) -> None:
    """Canonical JSON: sorted keys, 2-space indent, trailing newline."""
    write_text_atomic(path, json.dumps(obj, sort_keys=True, indent=2) + "\n")


def record_to_csv(record: OutcomeRecord, path) -> None:
    rows = ((i, int(a), int(b)) for i, (a, b) in enumerate(record.pairs()))
    write_csv_atomic(path, RECORD_CSV_HEADER, rows)


def read_record_arrays_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Parse an outcome CSV back into (a, b) arrays.

    Raises ParseError naming the 1-based line of the first offending row.
    """
    path = Path(path)
    a_vals: list[int] = []
    b_vals: list[int] = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != RECORD_CSV_HEADER:
            raise ParseError(f"{path}: line 1: expected header 'index,a,b', got {header!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ParseError(f"{path}: line {lineno}: expected 3 fields, got {len(row)}")
            try:
                a = int(row[1])
                b = int(row[2])
            except ValueError:
                raise ParseError(f"{path}: line {lineno}: outcomes must be integers") from None
            if a not in (-1, 1) or b not in (-1, 1):
                raise ParseError(f"{path}: line {lineno}: outcomes must be -1 or +1")
            a_vals.append(a)
            b_vals.append(b)
    if not a_vals:
        raise ParseError(f"{path}: no outcome rows")
    return np.array(a_vals, dtype=np.int8), np.array(b_vals, dtype=np.int8)


def _direction_to_list(d: Direction) -> list[float]:
    return [d.x, d.y, d.z]


def record_to_json(record: OutcomeRecord, path) -> None:
    obj = {
        "x": _direction_to_list(record.x),
        "y": _direction_to_list(record.y),
        "a": record.a.tolist(),
        "b": record.b.tolist(),
    }
    write_json_atomic(path, obj)


def write_density_curve_csv(tally: SignTally, path, resolution: int = 2001) -> None:
    """Single angle-form posterior curve: CSV ``theta,density`` on [-pi, pi]."""
    thetas = np.linspace(-math.pi, math.pi, resolution)
    dens = posterior_theta_density(thetas, tally)
    rows = ((format_float(t), format_float(d)) for t, d in zip(thetas, dens))
    write_csv_atomic(path, ["theta", "density"], rows)


def record_from_json(path) -> OutcomeRecord:
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: line {e.lineno}: {e.msg}") from None
    try:
        return OutcomeRecord(
            a=np.array(obj["a"], dtype=np.int8),
            b=np.array(obj["b"], dtype=np.int8),
            x=Direction.from_array(obj["x"]),
            y=Direction.from_array(obj["y"]),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"{path}: invalid outcome record: {e}") from None
