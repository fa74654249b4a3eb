"""Exact typical-cell distance law on the line.

The typical cell is [-R1, R2] with R1, R2 i.i.d. Exp(2 lambda); conditioning on
the ordered half-gaps and integrating out gives a closed form in terms of E1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate

from .specfun import exp_integral_e1


@dataclass(frozen=True)
class OrderedGaps:
    r1: float
    r2: float

    def __post_init__(self):
        if self.r1 < 0 or self.r2 < 0:
            raise ValueError("half-gaps must be nonnegative")


def joint_pdf_ordered(g: OrderedGaps, lam: float) -> float:
    if g.r1 > g.r2:
        return 0.0
    return 8.0 * lam * lam * math.exp(-2.0 * lam * (g.r1 + g.r2))


def cond_cdf_1d(r: float, g: OrderedGaps) -> float:
    """P(R_o <= r | min half-gap r1, max half-gap r2)."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    r1, r2 = g.r1, g.r2
    if r1 > r2:
        raise ValueError("expected r1 <= r2")
    if r1 + r2 == 0.0:
        return 1.0 if r > 0 else 0.0
    if r <= r1:
        return 2.0 * r / (r1 + r2)
    if r <= r2:
        return (r + r1) / (r1 + r2)
    return 1.0


def typical1d_cdf(r, lam: float = 1.0):
    """1 - e^{-2 lam r} + 2 lam r e^{-2 lam r} - 4 lam^2 r^2 E1(2 lam r)."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("r must be nonnegative")
    x = 2.0 * lam * r
    out = np.zeros_like(x)
    pos = x > 0
    xp = x[pos]
    e = np.exp(-xp)
    out[pos] = -np.expm1(-xp) + xp * e - xp * xp * exp_integral_e1(xp)
    return float(out) if out.ndim == 0 else out


def typical1d_moment(n: int, lam: float = 1.0) -> float:
    """E[R_o^n] = int_0^inf n r^(n-1) (1 - F(r)) dr, by adaptive quadrature."""
    if n < 1:
        raise ValueError("moment order must be >= 1")
    val, _ = integrate.quad(
        lambda r: n * r ** (n - 1) * (1.0 - typical1d_cdf(r, lam)), 0.0, np.inf,
        epsabs=1e-13, epsrel=1e-12, limit=200,
    )
    return val


class DeconditioningIntegrals(NamedTuple):
    int1: float
    int2: float
    int3: float
    total: float
    abserr: float


def deconditioning_int1_closed(r: float, lam: float = 1.0) -> float:
    return 1.0 + math.exp(-4.0 * lam * r) - 2.0 * math.exp(-2.0 * lam * r)


def appendix_a_numeric(r: float, lam: float = 1.0, tol: float = 1e-12) -> DeconditioningIntegrals:
    """Deconditioning integrals for the d=1 CDF by direct 2-D adaptive quadrature.

    Int1 covers r2 <= r (both gaps short), Int2 r1 <= r < r2, Int3 r < r1 <= r2.
    The r2 range is cut where exp(-2 lam (r2 - r)) drops below 1e-16.
    """
    if r <= 0:
        raise ValueError("r must be positive")
    c = 8.0 * lam * lam
    top = r + math.log(1e16) / (2.0 * lam)

    def w(r1, r2):
        return c * math.exp(-2.0 * lam * (r1 + r2))

    opts = dict(epsabs=tol, epsrel=tol)
    # dblquad integrates func(inner, outer); outer variable is r2 throughout.
    i1, e1 = integrate.dblquad(lambda r1, r2: w(r1, r2), 0.0, r, 0.0, lambda r2: r2, **opts)
    i2, e2 = integrate.dblquad(
        lambda r1, r2: (r + r1) / (r1 + r2) * w(r1, r2), r, top, 0.0, r, **opts
    )
    i3, e3 = integrate.dblquad(
        lambda r1, r2: 2.0 * r / (r1 + r2) * w(r1, r2), r, top, r, lambda r2: r2, **opts
    )
    err = e1 + e2 + e3
    if not math.isfinite(err) or err > 1e-6:
        raise ArithmeticError(f"deconditioning quadrature did not converge (error estimate {err:.3g})")
    return DeconditioningIntegrals(i1, i2, i3, i1 + i2 + i3, err)
