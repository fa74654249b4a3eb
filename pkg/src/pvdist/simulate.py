"""Monte Carlo oracle: Poisson points, Voronoi cell membership, uniform points in cells.

A cell containing the origin as nucleus is {y : y.x <= |x|^2 / 2 for all x}.
Its circumradius is read off the convex hull of the inverted points
2x/|x|^2 (each hull facet is dual to a cell vertex). Once 2 * circumradius
fits inside the window the cell is exact, since points beyond the window
have bisectors that miss the circumscribed ball. Uniform points are then
drawn by rejection from that ball.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .geometry import uniform_directions, uniform_in_ball
from .streams import Stream, as_stream, map_chunks
from .zerocell import ModelParams

log = logging.getLogger(__name__)

MAX_EXPANSIONS = 12
_BATCH = 64


@dataclass
class PppSample:
    window_radius: float
    points: np.ndarray
    intensity: float


class EmpiricalCdf:
    """Right-continuous step function of a sample."""

    def __init__(self, samples):
        x = np.sort(np.asarray(samples, dtype=float).ravel())
        if x.size == 0:
            raise ValueError("need at least one sample")
        self.values = x
        self.n = x.size

    def __call__(self, r):
        return np.searchsorted(self.values, np.asarray(r, dtype=float), side="right") / self.n

    def mean(self) -> float:
        return float(self.values.mean())

    def var(self) -> float:
        return float(self.values.var(ddof=1)) if self.n > 1 else 0.0


def default_window(m: ModelParams) -> float:
    return 4.0 * m.scale


def sample_ppp(m: ModelParams, window_radius: float, stream) -> PppSample:
    if not window_radius > 0:
        raise ValueError("window_radius must be positive")
    rng = stream if isinstance(stream, np.random.Generator) else as_stream(stream).generator()
    n = rng.poisson(m.lam * m.kappa * window_radius**m.d)
    pts = uniform_in_ball(rng, n, m.d, window_radius) if m.d > 1 else window_radius * (2.0 * rng.random((n, 1)) - 1.0)
    return PppSample(window_radius, pts, m.lam)


def _annulus(rng, m: ModelParams, r_in: float, r_out: float) -> np.ndarray:
    d = m.d
    k = rng.poisson(m.lam * m.kappa * (r_out**d - r_in**d))
    rad = (r_in**d + rng.random(k) * (r_out**d - r_in**d)) ** (1.0 / d)
    return uniform_directions(rng, k, d) * rad[:, None]


def in_typical_cell(y, ppp: PppSample) -> bool:
    """True iff no point of the sample is strictly closer to y than the origin."""
    y = np.asarray(y, dtype=float)
    ny = float(np.linalg.norm(y))
    if 2.0 * ny > ppp.window_radius:
        raise ValueError(
            f"|y|={ny:.4g} needs a window of radius >= {2 * ny:.4g}, got {ppp.window_radius:.4g}"
        )
    if len(ppp.points) == 0:
        return True
    dist2 = np.sum((ppp.points - y) ** 2, axis=1)
    return bool(np.all(dist2 >= ny * ny))


def cell_circumradius(points: np.ndarray) -> float | None:
    """Circumradius of the cell of the origin w.r.t. ``points``; None if unbounded or degenerate."""
    n, d = points.shape
    if n <= d:
        return None
    n2 = np.einsum("ij,ij->i", points, points)
    inv = 2.0 * points / n2[:, None]
    try:
        hull = ConvexHull(inv)
    except (QhullError, ValueError):
        return None
    off = -hull.equations[:, -1]
    lo = off.min()
    if not lo > 0:
        return None
    return 1.0 / lo


def _bounded_cell(rng, m: ModelParams, center_fn):
    """Grow the window until the relevant cell is provably complete.

    ``center_fn(points, W)`` returns (shifted points, usable radius, extra) where
    usable radius is how far around the nucleus the sample is complete.
    """
    W = default_window(m)
    pts = sample_ppp(m, W, rng).points
    for _ in range(MAX_EXPANSIONS):
        if len(pts):
            shifted, usable, extra = center_fn(pts, W)
            rc = cell_circumradius(shifted)
            if rc is not None and 2.0 * rc <= usable:
                return shifted, rc, extra
        W2 = 2.0 * W
        pts = np.vstack([pts, _annulus(rng, m, W, W2)]) if len(pts) else sample_ppp(m, W2, rng).points
        W = W2
        log.debug("window extended to %.3g", W)
    raise RuntimeError(f"cell not contained after {MAX_EXPANSIONS} window doublings (window {W:.3g})")


def _uniform_in_cell(rng, pts: np.ndarray, rc: float, d: int) -> np.ndarray:
    near = pts[np.einsum("ij,ij->i", pts, pts) <= 4.0 * rc * rc * (1 + 1e-12)]
    half = 0.5 * np.einsum("ij,ij->i", near, near)
    while True:
        y = uniform_in_ball(rng, _BATCH, d, rc)
        ok = np.all(y @ near.T <= half, axis=1)
        if ok.any():
            return y[np.argmax(ok)]


def _typical_center(pts, W):
    return pts, W, None


def _zero_center(pts, W):
    n2 = np.einsum("ij,ij->i", pts, pts)
    i = int(np.argmin(n2))
    x0 = pts[i]
    return np.delete(pts, i, axis=0) - x0, W - math.sqrt(n2[i]), x0


def _typical_chunk_1d(n: int, st: Stream, lam: float):
    rng = st.generator()
    a = rng.exponential(1.0 / lam, n)
    b = rng.exponential(1.0 / lam, n)
    y = -0.5 * a + rng.random(n) * 0.5 * (a + b)
    return np.abs(y), 0.5 * np.maximum(a, b)


def _typical_chunk(n: int, st: Stream, d: int, lam: float):
    m = ModelParams(d, lam)
    if d == 1:
        return _typical_chunk_1d(n, st, lam)
    rng = st.generator()
    out = np.empty(n)
    rcs = np.empty(n)
    for i in range(n):
        pts, rc, _ = _bounded_cell(rng, m, _typical_center)
        out[i] = np.linalg.norm(_uniform_in_cell(rng, pts, rc, d))
        rcs[i] = rc
    return out, rcs


def _zero_chunk_1d(n: int, st: Stream, lam: float):
    rng = st.generator()
    l1 = rng.exponential(1.0 / lam, n)
    r1 = rng.exponential(1.0 / lam, n)
    gap = rng.exponential(1.0 / lam, n)
    # nucleus is the nearer of the two; its outer neighbour lies a further gap away
    dn = np.minimum(l1, r1)
    inner = l1 + r1
    lo = -0.5 * inner
    hi = 0.5 * gap
    y = lo + rng.random(n) * (hi - lo)
    return np.abs(y), dn


def _zero_chunk(n: int, st: Stream, d: int, lam: float):
    m = ModelParams(d, lam)
    if d == 1:
        return _zero_chunk_1d(n, st, lam)
    rng = st.generator()
    out = np.empty(n)
    nuc = np.empty(n)
    for i in range(n):
        pts, rc, x0 = _bounded_cell(rng, m, _zero_center)
        out[i] = np.linalg.norm(_uniform_in_cell(rng, pts, rc, d))
        nuc[i] = np.linalg.norm(x0)
    return out, nuc


def _collect(fn, m: ModelParams, n: int, stream, tag: int):
    if n < 1:
        raise ValueError("n must be >= 1")
    st = as_stream(stream).child(tag, m.d)
    parts = map_chunks(fn, n, st, m.d, m.lam)
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def sample_typical_distance(m: ModelParams, n: int, stream=0, with_circumradius: bool = False):
    """Distances from the nucleus of the typical cell to n independent uniform points of it."""
    r, rc = _collect(_typical_chunk, m, n, stream, 1)
    return (r, rc) if with_circumradius else r


def sample_zerocell_distance(m: ModelParams, n: int, stream=0, with_nucleus: bool = False):
    """Distances from the nucleus to a uniform point of the cell covering the origin."""
    r, nuc = _collect(_zero_chunk, m, n, stream, 2)
    return (r, nuc) if with_nucleus else r


def ks_statistic(samples, cdf) -> float:
    """sup |ECDF - cdf| over the sample, both one-sided gaps included."""
    ecdf = samples if isinstance(samples, EmpiricalCdf) else EmpiricalCdf(samples)
    x = ecdf.values
    n = ecdf.n
    f = np.asarray(cdf(x), dtype=float) * np.ones(n)
    # left limits, so that step-function references are handled exactly
    f_left = np.asarray(cdf(np.nextafter(x, -np.inf)), dtype=float) * np.ones(n)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f_left - (i - 1) / n), 0.0))


def farthest_point_quantile(m: ModelParams, q: float, n: int, stream=0) -> float:
    """q-quantile of the typical-cell circumradius (farthest cell point from the nucleus)."""
    if not (0.0 <= q < 1.0):
        raise ValueError("q must lie in [0, 1)")
    if q == 0.0:
        return 0.0
    if m.d == 1:
        _, rc = _collect(_typical_chunk, m, n, stream, 3)
    else:
        _, rc = sample_typical_distance(m, n, as_stream(stream).child(3), with_circumradius=True)
    return float(np.quantile(rc, q))
