"""Cap-coverage probabilities for a typical cell with a large inball.

Given inradius R, the Poisson points whose half-way points fall in the
annulus R < l <= R + eps each cut a spherical cap off the sphere of radius
R + eps. A uniform point of that sphere escapes the cap of a half-way point
at distance l with probability 1 - 1/2 I_{1-l^2/(R+eps)^2}((d-1)/2, 1/2).
Averaging over l gives p; the inradius-defining point itself gives p0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .geometry import uniform_directions
from .specfun import beta_fn, inc_beta, reg_inc_beta, unit_ball_volume

_SMALL_X = 1e-5


@dataclass(frozen=True)
class InballCondition:
    R: float
    eps: float
    d: int
    lam: float = 1.0

    def __post_init__(self):
        if not (self.R > 0 and self.eps > 0):
            raise ValueError("R and eps must be positive")
        if int(self.d) != self.d or self.d < 1:
            raise ValueError("d must be a positive integer")
        if self.lam < 0:
            raise ValueError("lambda must be nonnegative")

    @property
    def x(self) -> float:
        """1 - R^2/(R+eps)^2, written without cancellation."""
        R, e = self.R, self.eps
        return e * (2.0 * R + e) / (R + e) ** 2

    def shell_volume_factor(self) -> float:
        """(R+eps)^d - R^d, stable for small eps/R."""
        return self.R**self.d * math.expm1(self.d * math.log1p(self.eps / self.R))


def _need_caps(c: InballCondition) -> None:
    if c.d < 2:
        raise ValueError("spherical caps need d >= 2")


def annulus_radius_cdf(l: float, c: InballCondition) -> float:
    R, e, d = c.R, c.eps, c.d
    if not (R <= l <= R + e):
        raise ValueError(f"l={l} outside [{R}, {R + e}]")
    return (l**d - R**d) / ((R + e) ** d - R**d)


def cap0_hit_probability(c: InballCondition) -> float:
    _need_caps(c)
    return 0.5 * reg_inc_beta(c.x, 0.5 * (c.d - 1), 0.5)


def _h_closed(c: InballCondition) -> float:
    a = 0.5 * (c.d - 1)
    x = c.x
    outer = (c.R + c.eps) ** c.d * inc_beta(x, a, 0.5 * (c.d + 1)) / beta_fn(a, 0.5)
    return outer - c.R**c.d * reg_inc_beta(x, a, 0.5)


def _h_quadrature(c: InballCondition) -> float:
    """(R+eps)^d * d * int_{R/(R+eps)}^1 t^(d-1) I_{1-t^2}(a, 1/2) dt."""
    a = 0.5 * (c.d - 1)
    d = c.d
    Re = c.R + c.eps
    # write t = 1 - s so the short interval near 1 is resolved without rounding
    s1 = c.eps / Re

    def f(s):
        t = 1.0 - s
        return t ** (d - 1) * reg_inc_beta(s * (2.0 - s), a, 0.5)

    val, _ = integrate.quad(f, 0.0, s1, epsabs=0.0, epsrel=1e-13, limit=200)
    return Re**d * d * val


def h_function(c: InballCondition) -> float:
    _need_caps(c)
    if c.x < _SMALL_X:
        return _h_quadrature(c)
    return _h_closed(c)


def cap_hit_probability(c: InballCondition) -> float:
    """Probability that a uniform sphere point lies in the cap of one annulus point."""
    return h_function(c) / (2.0 * c.shell_volume_factor())


def cap_hit_probability_quadrature(c: InballCondition) -> float:
    _need_caps(c)
    return _h_quadrature(c) / (2.0 * c.shell_volume_factor())


def q_probability(c: InballCondition) -> float:
    """1 - (1 - p0) exp(-lambda kappa_d h / 2)."""
    p0 = cap0_hit_probability(c)
    if c.lam == 0:
        return p0
    h = h_function(c)
    q = 1.0 - (1.0 - p0) * math.exp(-0.5 * c.lam * unit_ball_volume(c.d) * h)
    return min(max(q, 0.0), 1.0)


def h_growth_diagnostic(d: int, eps: float, R_grid) -> dict:
    """Least-squares slope of log h against log R."""
    R = np.asarray(R_grid, dtype=float)
    if R.size < 2 or np.any(np.diff(R) <= 0) or R[-1] / R[0] < 100.0:
        raise ValueError("R_grid must be increasing and span at least two decades")
    h = np.array([h_function(InballCondition(float(r), eps, d)) for r in R])
    if np.any(h <= 0):
        raise ArithmeticError("h lost all precision (nonpositive value)")
    slope, intercept = np.polyfit(np.log(R), np.log(h), 1)
    return {"slope": float(slope), "intercept": float(intercept), "h": h, "R": R,
            "increasing": bool(np.all(np.diff(h) > 0))}


def cap_coverage_mc(c: InballCondition, k: int, trials: int, rng: np.random.Generator) -> tuple[float, float]:
    """Fraction of trials in which a uniform sphere point is covered by the inradius cap or one of k annulus caps."""
    _need_caps(c)
    d = c.d
    Re = c.R + c.eps
    y = uniform_directions(rng, trials, d)
    # inradius point on the first axis; y is isotropic so any direction works
    covered = y[:, 0] * Re >= c.R
    for _ in range(k):
        u = rng.random(trials)
        l = (c.R**d + u * (Re**d - c.R**d)) ** (1.0 / d)
        dirs = uniform_directions(rng, trials, d)
        covered |= np.einsum("ij,ij->i", y, dirs) * Re >= l
    frac = float(covered.mean())
    return frac, math.sqrt(frac * (1.0 - frac) / trials)
