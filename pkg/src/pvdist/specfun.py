"""Special functions and dimensional constants.

Gamma-family values go through ``math.lgamma`` so that ball volumes and beta
functions stay finite for the dimensions used here (d up to ~10 and beyond).
The regularized incomplete beta uses the classical continued fraction with
the symmetry switch; E1 uses the power series below 1 and a continued
fraction above.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

EULER_GAMMA = 0.57721566490153286061
_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 10_000


@dataclass(frozen=True)
class DimConstants:
    """Constants attached to dimension ``d``.

    kappa_d is the unit-ball volume, chi_d the unit-sphere surface area,
    alpha_d = kappa_{d-1}/kappa_d and c_d2 = C_{d,2} (None for d = 1).
    """

    d: int
    kappa_d: float
    chi_d: float
    alpha_d: float
    c_d2: Optional[float]


def log_unit_ball_volume(d: int) -> float:
    return 0.5 * d * math.log(math.pi) - math.lgamma(0.5 * d + 1.0)


def unit_ball_volume(d: int) -> float:
    if d < 0:
        raise ValueError(f"dimension must be >= 0, got {d}")
    return math.exp(log_unit_ball_volume(d))


def dim_constants(d: int) -> DimConstants:
    if int(d) != d or d < 1:
        raise ValueError(f"dimension must be an integer >= 1, got {d}")
    d = int(d)
    kappa = unit_ball_volume(d)
    chi = d * kappa
    alpha = math.exp(
        math.lgamma(0.5 * d + 1.0) - math.lgamma(0.5) - math.lgamma(0.5 * (d + 1))
    )
    c_d2 = None
    if d >= 2:
        # d!/(2(d-2)!) = d(d-1)/2
        c_d2 = 0.5 * d * (d - 1) * kappa * unit_ball_volume(d - 1) / (
            unit_ball_volume(2) * unit_ball_volume(1)
        )
    return DimConstants(d=d, kappa_d=kappa, chi_d=chi, alpha_d=alpha, c_d2=c_d2)


def log_beta(a: float, b: float) -> float:
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def beta_fn(a: float, b: float) -> float:
    return math.exp(log_beta(a, b))


def _betacf(z: float, a: float, b: float) -> float:
    """Modified Lentz evaluation of the incomplete-beta continued fraction."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    dd = 1.0 - qab * z / qap
    if abs(dd) < _TINY:
        dd = _TINY
    dd = 1.0 / dd
    h = dd
    for m in range(1, _MAX_ITER):
        m2 = 2 * m
        aa = m * (b - m) * z / ((qam + m2) * (a + m2))
        dd = 1.0 + aa * dd
        if abs(dd) < _TINY:
            dd = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        dd = 1.0 / dd
        h *= dd * c
        aa = -(a + m) * (qab + m) * z / ((a + m2) * (qap + m2))
        dd = 1.0 + aa * dd
        if abs(dd) < _TINY:
            dd = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        dd = 1.0 / dd
        delta = dd * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (z={z}, a={a}, b={b})")


def _reg_inc_beta_scalar(z: float, a: float, b: float) -> float:
    if not (0.0 <= z <= 1.0):
        raise ValueError(f"z must lie in [0, 1], got {z}")
    if not (a > 0.0 and b > 0.0):
        raise ValueError(f"a and b must be positive, got a={a}, b={b}")
    if z == 0.0:
        return 0.0
    if z == 1.0:
        return 1.0
    log_front = a * math.log(z) + b * math.log1p(-z) - log_beta(a, b)
    if z < (a + 1.0) / (a + b + 2.0):
        return math.exp(log_front) * _betacf(z, a, b) / a
    return 1.0 - math.exp(log_front) * _betacf(1.0 - z, b, a) / b


def reg_inc_beta(z, a, b):
    """Regularized incomplete beta I_z(a, b).

    Accepts scalars or broadcastable arrays; returns a float for scalar input.
    """
    if np.ndim(z) == 0 and np.ndim(a) == 0 and np.ndim(b) == 0:
        return _reg_inc_beta_scalar(float(z), float(a), float(b))
    zz, aa, bb = np.broadcast_arrays(
        np.asarray(z, dtype=float), np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    )
    out = np.empty(zz.shape)
    for idx in np.ndindex(zz.shape):
        out[idx] = _reg_inc_beta_scalar(zz[idx], aa[idx], bb[idx])
    return out


def inc_beta(z, a, b):
    """Unnormalized incomplete beta B_z(a, b) = I_z(a, b) * B(a, b)."""
    if np.ndim(a) == 0 and np.ndim(b) == 0:
        return reg_inc_beta(z, a, b) * beta_fn(float(a), float(b))
    bab = np.exp(np.vectorize(log_beta)(a, b))
    return reg_inc_beta(z, a, b) * bab


def _e1_scalar(z: float) -> float:
    if not z > 0.0:
        raise ValueError(f"E1 is only defined here for z > 0, got {z}")
    if math.isinf(z):
        return 0.0
    if z <= 1.0:
        # E1(z) = -gamma - ln z - sum_{k>=1} (-z)^k / (k k!)
        total = 0.0
        term = 1.0
        for k in range(1, 200):
            term *= -z / k
            contrib = term / k
            total += contrib
            if abs(contrib) < _EPS * abs(total):
                break
        return -EULER_GAMMA - math.log(z) - total
    # continued fraction for z > 1 (modified Lentz)
    b = z + 1.0
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * i
        b += 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h * math.exp(-z)
    raise ArithmeticError(f"E1 continued fraction did not converge at z={z}")


def exp_integral_e1(z):
    """Exponential integral E1(z) = int_z^inf exp(-t)/t dt for z > 0."""
    if np.ndim(z) == 0:
        return _e1_scalar(float(z))
    zz = np.asarray(z, dtype=float)
    out = np.empty(zz.shape)
    for idx in np.ndindex(zz.shape):
        out[idx] = _e1_scalar(zz[idx])
    return out


def sin_power_integral(psi, d: int):
    """int_0^psi sin^d(t) dt for integer d >= 0 and psi in [0, pi].

    Uses the reduction formula, which is exact and vectorizes cleanly; this is
    the hot path inside the cell-volume quadratures.
    """
    psi = np.asarray(psi, dtype=float)
    s = np.sin(psi)
    c = np.cos(psi)
    if d % 2 == 0:
        acc = psi.copy()
        n = 2
    else:
        acc = 1.0 - c
        n = 3
    while n <= d:
        acc = -(s ** (n - 1)) * c / n + (n - 1) / n * acc
        n += 2
    return acc


def sin_power_integral_beta(psi: float, d: int) -> float:
    """Same quantity as :func:`sin_power_integral`, via the incomplete beta."""
    if not (0.0 <= psi <= math.pi):
        raise ValueError(f"psi must lie in [0, pi], got {psi}")
    a = 0.5 * (d + 1)
    half = 0.5 * inc_beta(math.sin(psi) ** 2, a, 0.5)
    if psi <= 0.5 * math.pi:
        return half
    return beta_fn(a, 0.5) - half
