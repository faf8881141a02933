"""Readers and writers for the on-disk formats (see ``docs/formats.md``)."""
from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

from .levy_core import CrinkledRange, JumpSet
from .metric import FiniteMetricSpace, FinitePointSet
from .walks import WalkPath

MAGIC = b"CRNK"
VERSION = 1
_HEADER = struct.Struct("<4sIQQ")


def _g(x) -> str:
    return format(float(x), ".17g")


def write_jumps_csv(jumps: JumpSet, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y"])
        w.writerows([_g(x), _g(y)] for x, y in zip(jumps.times, jumps.sizes))


def read_jumps_csv(path, horizon: float, threshold: float = 0.0) -> JumpSet:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.size == 0:
        return JumpSet(horizon, threshold, np.empty(0), np.empty(0))
    return JumpSet(horizon, threshold, data[:, 0], data[:, 1])


def write_range_csv(crange: CrinkledRange, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "time", "cumulative"])
        w.writerows(
            [i, _g(t), _g(c)] for i, (t, c) in enumerate(zip(crange.times, crange.cumulative))
        )


def write_norms_csv(walk: WalkPath, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "norm_sq"])
        w.writerows([k + 1, _g(v)] for k, v in enumerate(walk.step_norms_sq))


def write_array(array, path) -> None:
    """Header ``<4sIQQ>`` (magic, version, columns, rows) then float64 rows."""
    data = np.ascontiguousarray(np.atleast_2d(array), dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, data.shape[1], data.shape[0]))
        fh.write(data.tobytes(order="C"))


def write_partial_sums(walk: WalkPath, path) -> None:
    """Binary dump of the partial sums.

    Axis walks store only their touched coordinates, so ``columns`` is the
    stored width, not the ambient dimension.
    """
    write_array(walk.partial_sums, path)


def write_point_set(points: FinitePointSet, path) -> None:
    write_array(points.points, path)


def read_point_set(path) -> FinitePointSet:
    return FinitePointSet(read_array(path))


def read_array(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError("file too short for a CRNK header")
    magic, version, cols, rows = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValueError(f"bad magic {magic!r}")
    if version != VERSION:
        raise ValueError(f"unsupported version {version}")
    body = raw[_HEADER.size :]
    if len(body) != 8 * rows * cols:
        raise ValueError(f"payload is {len(body)} bytes, expected {8 * rows * cols}")
    return np.frombuffer(body, dtype="<f8").reshape(rows, cols).copy()


def write_metric_csv(space: FiniteMetricSpace, path) -> None:
    np.savetxt(path, space.dist, delimiter=",", fmt="%.17g")


def read_metric_csv(path) -> FiniteMetricSpace:
    return FiniteMetricSpace.checked(np.loadtxt(path, delimiter=",", ndmin=2))


def read_partial_sums(path) -> np.ndarray:
    return read_array(path)
