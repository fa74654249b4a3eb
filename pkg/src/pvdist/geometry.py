"""Hyperspherical coordinates, spherical caps and two-ball unions.

Coordinate convention: x_1 = r cos(a_1), x_n = r sin(a_1)...sin(a_{n-1}) cos(a_n)
for 1 < n < d, x_d = r sin(a_1)...sin(a_{d-1}). The first d-2 angles live in
[0, pi], the last in [0, 2 pi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .specfun import dim_constants, reg_inc_beta, sin_power_integral, unit_ball_volume


@dataclass(frozen=True)
class PolarPoint:
    radius: float
    angles: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError(f"radius must be nonnegative, got {self.radius}")
        object.__setattr__(self, "angles", tuple(float(a) for a in self.angles))

    @property
    def dim(self) -> int:
        return len(self.angles) + 1


@dataclass(frozen=True)
class TwoBallGeometry:
    v1: float
    v2: float
    u: float
    psi1: float
    psi2: float


def _check_angles(p: PolarPoint, d: int) -> None:
    if len(p.angles) != d - 1:
        raise ValueError(f"expected {d - 1} angles for d={d}, got {len(p.angles)}")
    for a in p.angles[:-1]:
        if not (0.0 <= a <= math.pi):
            raise ValueError(f"polar angle {a} outside [0, pi]")
    if d >= 2 and not (0.0 <= p.angles[-1] < 2.0 * math.pi):
        raise ValueError(f"azimuth {p.angles[-1]} outside [0, 2pi)")


def polar_to_cartesian(p: PolarPoint, d: int) -> np.ndarray:
    if d < 2:
        raise ValueError("hyperspherical coordinates need d >= 2")
    _check_angles(p, d)
    out = np.empty(d)
    sin_prod = 1.0
    for n, a in enumerate(p.angles):
        out[n] = p.radius * sin_prod * math.cos(a)
        sin_prod *= math.sin(a)
    out[d - 1] = p.radius * sin_prod
    return out


def cartesian_to_polar(x) -> PolarPoint:
    """Inverse of :func:`polar_to_cartesian` (d >= 2)."""
    x = np.asarray(x, dtype=float)
    d = x.size
    if d < 2:
        raise ValueError("hyperspherical coordinates need d >= 2")
    r = float(np.linalg.norm(x))
    if r == 0.0:
        return PolarPoint(0.0, (0.0,) * (d - 1))
    angles = []
    for n in range(d - 2):
        tail = float(np.linalg.norm(x[n:]))
        angles.append(math.atan2(math.sqrt(max(tail**2 - x[n] ** 2, 0.0)), x[n]) if tail > 0 else 0.0)
    phi = math.atan2(x[d - 1], x[d - 2]) % (2.0 * math.pi)
    angles.append(phi)
    return PolarPoint(r, tuple(angles))


def pair_distance(y: PolarPoint, x: PolarPoint, d: int) -> float:
    if y.dim != d or x.dim != d:
        raise ValueError(f"dimension mismatch: points have dims {y.dim}, {x.dim}, expected {d}")
    return float(np.linalg.norm(polar_to_cartesian(y, d) - polar_to_cartesian(x, d)))


def uniform_directions(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    g = rng.standard_normal((n, d))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def uniform_in_ball(rng: np.random.Generator, n: int, d: int, radius: float) -> np.ndarray:
    """``n`` points i.i.d. uniform in the origin-centered ball of the given radius."""
    return uniform_directions(rng, n, d) * (radius * rng.random(n) ** (1.0 / d))[:, None]


def cap_surface_area(d: int, ball_radius: float, cap_base_distance: float) -> float:
    """Surface area of the cap of a sphere cut off at distance ``cap_base_distance`` from the center."""
    if d < 2:
        raise ValueError("spherical caps need d >= 2")
    if ball_radius <= 0:
        raise ValueError("ball_radius must be positive")
    if not (0.0 <= cap_base_distance <= ball_radius):
        raise ValueError(f"cap_base_distance {cap_base_distance} outside [0, {ball_radius}]")
    chi = dim_constants(d).chi_d
    t = cap_base_distance / ball_radius
    z = (1.0 - t) * (1.0 + t)
    return 0.5 * chi * ball_radius ** (d - 1) * reg_inc_beta(z, 0.5 * (d - 1), 0.5)


def psi_split(v1: float, v2: float, u: float, tol: float = 1e-12) -> tuple[float, float]:
    """Split angles with psi1 + psi2 = pi - u and v1 sin(psi1) = v2 sin(psi2).

    Solved by bisection on f(psi1) = v1 sin(psi1) - v2 sin(pi - u - psi1),
    which is <= 0 at psi1 = 0 and >= 0 at psi1 = pi - u.
    """
    if v1 < 0 or v2 < 0 or v1 + v2 <= 0:
        raise ValueError("radii must be nonnegative and not both zero")
    if not (0.0 <= u <= math.pi):
        raise ValueError(f"u must lie in [0, pi], got {u}")
    span = math.pi - u
    if span == 0.0:
        return 0.0, 0.0
    if u == 0.0:
        # collinear centers: the smaller ball sits inside the larger one
        if v1 > v2:
            return 0.0, math.pi
        if v1 < v2:
            return math.pi, 0.0
        return 0.5 * math.pi, 0.5 * math.pi

    def f(p):
        return v1 * math.sin(p) - v2 * math.sin(span - p)

    lo, hi = 0.0, span
    flo, fhi = f(lo), f(hi)
    if flo > 0 or fhi < 0:
        raise ArithmeticError(f"psi_split: no sign change (f(0)={flo}, f(pi-u)={fhi})")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    p1 = 0.5 * (lo + hi)
    return p1, span - p1


def psi_split_array(v1, v2, u):
    """Closed-form vectorized split: tan(psi1) = v2 sin u / (v1 - v2 cos u)."""
    v1 = np.asarray(v1, dtype=float)
    v2 = np.asarray(v2, dtype=float)
    u = np.asarray(u, dtype=float)
    p1 = np.arctan2(v2 * np.sin(u), v1 - v2 * np.cos(u))
    return p1, np.pi - u - p1


def union_volume_psi(v1, v2, u, d: int):
    """Volume of the union of two origin-touching balls via the angle split (vectorized)."""
    kappa = unit_ball_volume(d)
    kappa_m1 = unit_ball_volume(d - 1)
    v1 = np.asarray(v1, dtype=float)
    v2 = np.asarray(v2, dtype=float)
    p1, p2 = psi_split_array(v1, v2, u)
    # kappa_d * alpha_d = kappa_{d-1}
    return kappa * (v1**d + v2**d) - kappa_m1 * (
        v1**d * sin_power_integral(p1, d) + v2**d * sin_power_integral(p2, d)
    )


def ball_cap_volume(d: int, radius: float, offset: float) -> float:
    """Volume of the part of a ball lying beyond a hyperplane at signed distance ``offset`` from its center."""
    if radius == 0.0:
        return 0.0
    kappa = unit_ball_volume(d)
    t = min(abs(offset) / radius, 1.0)
    small = 0.5 * kappa * radius**d * reg_inc_beta((1.0 - t) * (1.0 + t), 0.5 * (d + 1), 0.5)
    return small if offset >= 0 else kappa * radius**d - small


def lens_volume(d: int, r1: float, r2: float, center_distance: float) -> float:
    """Intersection volume of two balls with given radii and center distance."""
    kappa = unit_ball_volume(d)
    delta = center_distance
    if delta >= r1 + r2:
        return 0.0
    if delta <= abs(r1 - r2):
        return kappa * min(r1, r2) ** d
    a1 = (delta**2 + r1**2 - r2**2) / (2.0 * delta)
    return ball_cap_volume(d, r1, a1) + ball_cap_volume(d, r2, delta - a1)


def union_volume_lens(v1: float, v2: float, u: float, d: int) -> float:
    delta = math.sqrt(max(v1 * v1 + v2 * v2 - 2.0 * v1 * v2 * math.cos(u), 0.0))
    kappa = unit_ball_volume(d)
    return kappa * (v1**d + v2**d) - lens_volume(d, v1, v2, delta)


def union_volume(v1: float, v2: float, u: float, d: int, method: str = "psi") -> float:
    """Volume of B_{v1}(c1) U B_{v2}(c2), both balls passing through the origin.

    The centers sit at distances v1, v2 from the origin and subtend angle u.
    ``method`` is ``"psi"`` (angle split) or ``"lens"`` (inclusion-exclusion).
    """
    if v1 < 0 or v2 < 0:
        raise ValueError("radii must be nonnegative")
    if not (0.0 <= u <= math.pi):
        raise ValueError(f"u must lie in [0, pi], got {u}")
    if method == "lens":
        return union_volume_lens(v1, v2, u, d)
    if method != "psi":
        raise ValueError(f"unknown method {method!r}")
    if v1 + v2 == 0.0:
        return 0.0
    p1, p2 = psi_split(v1, v2, u)
    kappa = unit_ball_volume(d)
    kappa_m1 = unit_ball_volume(d - 1)
    return float(
        kappa * (v1**d + v2**d)
        - kappa_m1 * (v1**d * sin_power_integral(p1, d) + v2**d * sin_power_integral(p2, d))
    )


def two_ball_geometry(v1: float, v2: float, u: float) -> TwoBallGeometry:
    p1, p2 = psi_split(v1, v2, u)
    return TwoBallGeometry(v1=v1, v2=v2, u=u, psi1=p1, psi2=p2)


def union_volume_mc(
    v1: float, v2: float, u: float, d: int, n: int, rng: np.random.Generator
) -> tuple[float, float]:
    """Hit-or-miss estimate of the union volume; returns (estimate, standard error)."""
    c1 = np.zeros(d)
    c1[0] = v1
    c2 = np.zeros(d)
    c2[0] = v2 * math.cos(u)
    if d >= 2:
        c2[1] = v2 * math.sin(u)
    lo = np.minimum(c1 - v1, c2 - v2)
    hi = np.maximum(c1 + v1, c2 + v2)
    box = float(np.prod(hi - lo))
    hits = 0
    done = 0
    chunk = 200_000
    while done < n:
        m = min(chunk, n - done)
        y = lo + (hi - lo) * rng.random((m, d))
        inside = (np.sum((y - c1) ** 2, axis=1) <= v1 * v1) | (np.sum((y - c2) ** 2, axis=1) <= v2 * v2)
        hits += int(inside.sum())
        done += m
    frac = hits / n
    return box * frac, box * math.sqrt(frac * (1.0 - frac) / n)
