"""Sampled scenario output and its CSV form.

The CSV starts with ``# key=value`` metadata lines, then a header of
unit-suffixed column names, then one row per sample.  Floats are written
with 17 significant digits so reading a file back reproduces every value
bit for bit.
"""
from __future__ import annotations

import io
import os
from dataclasses import dataclass, field
from typing import TextIO, Union

import numpy as np

PathLike = Union[str, "os.PathLike[str]"]


@dataclass
class TimeSeries:
    metadata: dict[str, str]
    columns: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        lengths = {len(v) for v in self.columns.values()}
        if len(lengths) > 1:
            raise ValueError(f"columns differ in length: {sorted(lengths)}")
        t = self.columns.get("t_ps")
        if t is not None and np.any(np.diff(t) <= 0):
            raise ValueError("t_ps must be strictly increasing")

    @property
    def names(self) -> list[str]:
        return list(self.columns)

    def __len__(self) -> int:
        return len(next(iter(self.columns.values()))) if self.columns else 0

    def __getitem__(self, name: str) -> np.ndarray:
        return self.columns[name]

    def identical(self, other: "TimeSeries") -> bool:
        """Bitwise equality of metadata, column order and every value."""
        if self.metadata != other.metadata or self.names != other.names:
            return False
        return all(
            self.columns[k].dtype == other.columns[k].dtype
            and self.columns[k].tobytes() == other.columns[k].tobytes()
            for k in self.names
        )


def _format(x: float) -> str:
    return format(float(x), ".17g")


def write_csv(ts: TimeSeries, dest: Union[PathLike, TextIO]) -> None:
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", encoding="utf-8", newline="") as fh:
            _write(ts, fh)
    else:
        _write(ts, dest)


def _write(ts: TimeSeries, fh: TextIO) -> None:
    for key, value in ts.metadata.items():
        if "\n" in key or "=" in key or "\n" in str(value):
            raise ValueError(f"metadata entry {key!r} cannot be written on one line")
        fh.write(f"# {key}={value}\n")
    fh.write(",".join(ts.names) + "\n")
    cols = [ts.columns[k] for k in ts.names]
    for row in zip(*cols):
        fh.write(",".join(_format(v) for v in row) + "\n")


def to_csv_string(ts: TimeSeries) -> str:
    buf = io.StringIO()
    _write(ts, buf)
    return buf.getvalue()


def read_csv(src: Union[PathLike, TextIO]) -> TimeSeries:
    if isinstance(src, (str, os.PathLike)):
        with open(src, encoding="utf-8") as fh:
            return _read(fh)
    return _read(src)


def _read(fh: TextIO) -> TimeSeries:
    metadata: dict[str, str] = {}
    header = None
    rows = []
    for lineno, line in enumerate(fh, start=1):
        line = line.rstrip("\r\n")
        if header is None and line.startswith("#"):
            key, sep, value = line[1:].strip().partition("=")
            if not sep:
                raise ValueError(f"line {lineno}: metadata line without '='")
            metadata[key] = value
        elif header is None:
            header = line.split(",")
        elif line:
            fields = line.split(",")
            if len(fields) != len(header):
                raise ValueError(
                    f"line {lineno}: {len(fields)} fields, header has {len(header)}")
            rows.append([float(v) for v in fields])
    if header is None:
        raise ValueError("no header row")
    data = np.array(rows, dtype=float).reshape(len(rows), len(header))
    return TimeSeries(metadata, {name: data[:, i].copy() for i, name in enumerate(header)})
