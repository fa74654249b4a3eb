"""Gridded distribution curves and their CSV / JSON serialization."""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field

import numpy as np


@dataclass
class DistributionCurve:
    r: np.ndarray
    value: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.r = np.asarray(self.r, dtype=float)
        self.value = np.asarray(self.value, dtype=float)
        if self.r.shape != self.value.shape or self.r.ndim != 1:
            raise ValueError("r and value must be 1-D arrays of equal length")
        if np.any(np.diff(self.r) < 0):
            raise ValueError("grid must be nondecreasing")

    def __len__(self):
        return self.r.size

    def is_cdf_like(self, slack: float = 0.0) -> bool:
        v = self.value
        return bool(np.all(v >= -slack) and np.all(v <= 1 + slack) and np.all(np.diff(v) >= -slack))

    def mean_from_cdf(self) -> float:
        """Trapezoid integral of the survival function over the grid (starting at r[0])."""
        return float(self.r[0] + np.trapezoid(1.0 - self.value, self.r))

    def to_csv(self) -> str:
        buf = io.StringIO()
        for k, v in self.meta.items():
            buf.write(f"# {k}={json.dumps(v)}\n")
        buf.write("r,value\n")
        for a, b in zip(self.r, self.value):
            buf.write(f"{a:.12g},{b:.12g}\n")
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(
            {"meta": self.meta, "r": [float(f"{x:.12g}") for x in self.r],
             "value": [float(f"{x:.12g}") for x in self.value]},
            indent=1,
        )

    def dump(self, fmt: str = "csv") -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json()
        raise ValueError(f"unknown format {fmt!r}")


def read_csv(text: str) -> DistributionCurve:
    meta, rows = {}, []
    header_seen = False
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            k, _, v = line[1:].strip().partition("=")
            meta[k] = json.loads(v)
        elif not header_seen:
            if line.strip() != "r,value":
                raise ValueError(f"unexpected header {line!r}")
            header_seen = True
        else:
            a, b = line.split(",")
            rows.append((float(a), float(b)))
    arr = np.array(rows, dtype=float).reshape(-1, 2)
    return DistributionCurve(arr[:, 0], arr[:, 1], meta)


def read_json(text: str) -> DistributionCurve:
    obj = json.loads(text)
    return DistributionCurve(obj["r"], obj["value"], obj.get("meta", {}))


def parse_grid(spec: str) -> np.ndarray:
    """'min:max:steps' -> linspace grid."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must look like min:max:steps, got {spec!r}")
    lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
    if steps < 2 or not hi > lo or lo < 0:
        raise ValueError(f"invalid grid {spec!r}: need 0 <= min < max and steps >= 2")
    return np.linspace(lo, hi, steps)
