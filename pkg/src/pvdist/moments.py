"""Volume moments of the typical cell and the correction factor rho_d.

All the volume moments reduce to integrals of the form

    c_d * int int (v1 v2)^(d-1) A(v1, v2) dv1 dv2,
    A(v1, v2) = int_0^pi exp(-lambda U(v1, v2, u)) sin^(d-2)(u) du,

where U is the volume of the union of the two origin-touching balls and
c_d = 4 pi C_{d,2} = chi_d chi_{d-1}. For d = 1 the angular integral becomes a
sum over "same side" (u = 0) and "opposite side" (u = pi) and c_1 = 2.

Quadrature is composite Gauss-Legendre in (v1, v2, u), with the v2 panels
split at v2 = v1 (U has a ridge there near u = 0), refined dyadically until
two successive levels agree to ``tol``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .geometry import union_volume_psi
from .specfun import dim_constants
from .zerocell import ModelParams

_NODES = 24
_MAX_LEVEL = 4


@dataclass
class MomentReport:
    d: int
    lam: float
    ev2: float
    var_v: float
    rho: float
    meta: dict = field(default_factory=dict)


def truncation_radius(m: ModelParams) -> float:
    """Radius beyond which exp(-lambda kappa_d v^d) < 1e-16."""
    return (16.0 * math.log(10.0) / (m.lam * m.kappa)) ** (1.0 / m.d)


def _prefactor(d: int) -> float:
    if d == 1:
        return 2.0
    c = dim_constants(d)
    return 4.0 * math.pi * c.c_d2


def _gl_panels(a: float, b: float, panels: int, nodes: int = _NODES):
    x, w = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(a, b, panels + 1)
    lo, hi = edges[:-1, None], edges[1:, None]
    pts = 0.5 * (hi - lo) * x[None, :] + 0.5 * (hi + lo)
    wts = 0.5 * (hi - lo) * w[None, :]
    return pts.ravel(), wts.ravel()


def _v2_nodes(v1: np.ndarray, a2: float, b2: float, panels: int):
    """Per-v1 Gauss-Legendre nodes on [a2, b2], split at v2 = v1 when inside."""
    x, w = np.polynomial.legendre.leggauss(_NODES)
    cut = np.clip(v1, a2, b2)[:, None]
    sub = np.linspace(0.0, 1.0, panels + 1)
    # panels of [a2, cut] then panels of [cut, b2]
    lo1 = a2 + (cut - a2) * sub[None, :-1]
    hi1 = a2 + (cut - a2) * sub[None, 1:]
    lo2 = cut + (b2 - cut) * sub[None, :-1]
    hi2 = cut + (b2 - cut) * sub[None, 1:]
    lo = np.concatenate([lo1, lo2], axis=1)[:, :, None]
    hi = np.concatenate([hi1, hi2], axis=1)[:, :, None]
    pts = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
    wts = 0.5 * (hi - lo) * w
    n1 = v1.size
    return pts.reshape(n1, -1), wts.reshape(n1, -1)


def _angular_nodes(d: int, panels: int):
    if d == 1:
        return np.array([0.0, math.pi]), np.array([1.0, 1.0])
    u, w = _gl_panels(0.0, math.pi, panels)
    if d > 2:
        w = w * np.sin(u) ** (d - 2)
    return u, w


def _integral_level(m: ModelParams, a1, b1, a2, b2, level: int) -> float:
    d = m.d
    if b1 <= a1 or b2 <= a2:
        return 0.0
    vpan = 2 * 2**level
    upan = 2 * 2**level
    v1, w1 = _gl_panels(a1, b1, vpan)
    v2, w2 = _v2_nodes(v1, a2, b2, vpan)
    u, wu = _angular_nodes(d, upan)
    V1 = np.broadcast_to(v1[:, None], v2.shape)
    base = (w1 * v1 ** (d - 1))[:, None] * w2 * v2 ** (d - 1)
    total = 0.0
    for ui, wi in zip(u, wu):
        U = union_volume_psi(V1, v2, ui, d)
        total += wi * float(np.sum(base * np.exp(-m.lam * U)))
    return total


def _integral(m: ModelParams, a1, b1, a2, b2, tol: float):
    """Adaptive dyadic refinement; returns (value, error estimate, level)."""
    prev = _integral_level(m, a1, b1, a2, b2, 0)
    for level in range(1, _MAX_LEVEL + 1):
        cur = _integral_level(m, a1, b1, a2, b2, level)
        err = abs(cur - prev)
        if err <= tol * max(abs(cur), 1e-300) or cur == 0.0:
            return cur, err, level
        prev = cur
    raise ArithmeticError(
        f"volume-moment quadrature did not reach tol={tol:g} (last change {err:.3g})"
    )


@lru_cache(maxsize=64)
def _full_integral(m: ModelParams, tol: float):
    vmax = truncation_radius(m)
    return _integral(m, 0.0, vmax, 0.0, vmax, tol)


def second_moment_cell_volume(m: ModelParams, tol: float = 1e-7, with_error: bool = False):
    """E[vol(V_o)^2]."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    val, err, level = _full_integral(m, tol)
    c = _prefactor(m.d)
    if with_error:
        return c * val, c * err, level
    return c * val


def intersection_moments(r: float, m: ModelParams, tol: float = 1e-7) -> tuple[float, float]:
    """First and second moments of vol(B_r(o) n V_o)."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    m1 = -math.expm1(-m.lam * m.kappa * r**m.d) / m.lam
    if r == 0:
        return 0.0, 0.0
    rr = min(r, truncation_radius(m))
    val, _, _ = _integral(m, 0.0, rr, 0.0, rr, tol)
    return m1, _prefactor(m.d) * val


def covariance_ball_cell(r: float, m: ModelParams, tol: float = 1e-8) -> float:
    """Cov[vol(B_r(o) n V_o), vol(V_o)] from the four-term expression.

    The [r, inf)^2 integral is obtained as full - 2 * strip - inner square.
    """
    if r < 0:
        raise ValueError("r must be nonnegative")
    vmax = truncation_radius(m)
    c = _prefactor(m.d)
    lam = m.lam
    full, _, _ = _full_integral(m, tol)
    ev2 = c * full
    var = ev2 - 1.0 / lam**2
    rr = min(r, vmax)
    inner = _integral(m, 0.0, rr, 0.0, rr, tol)[0] if rr > 0 else 0.0
    strip = _integral(m, 0.0, rr, rr, vmax, tol)[0] if 0 < rr < vmax else 0.0
    outer = full - 2.0 * strip - inner
    e = math.exp(-lam * m.kappa * r**m.d)
    return (
        0.5 * var
        - (1.0 - 2.0 * e) / (2.0 * lam**2)
        + 0.5 * c * inner
        - 0.5 * c * outer
    )


def lemma6_check(m: ModelParams, radii, tol: float = 1e-9) -> dict:
    """Cov(r)/r^d along radii decreasing toward 0; should shrink toward 0."""
    radii = [float(r) for r in radii]
    if any(b >= a for a, b in zip(radii, radii[1:])) or min(radii) <= 0:
        raise ValueError("radii must be positive and strictly decreasing")
    ratios = [covariance_ball_cell(r, m, tol) / r**m.d for r in radii]
    decreasing = all(b < a for a, b in zip(ratios, ratios[1:]))
    return {
        "radii": radii,
        "ratios": ratios,
        "decreasing": decreasing,
        "positive": all(x > 0 for x in ratios),
    }


def moment_report(m: ModelParams, tol: float = 1e-7, check_intensity: float | None = 3.0) -> MomentReport:
    """Second volume moment, variance and rho, with an optional lambda-invariance check."""
    ev2, err, level = second_moment_cell_volume(m, tol, with_error=True)
    var = ev2 - 1.0 / m.lam**2
    rho_val = 1.0 + var * m.lam**2
    meta = {
        "nodes_per_panel": _NODES,
        "refinement_level": level,
        "truncation_radius": truncation_radius(m),
        "error_estimate": err,
    }
    if check_intensity is not None:
        other = ModelParams(m.d, m.lam * check_intensity)
        rho_other = other.lam**2 * second_moment_cell_volume(other, tol)
        meta["rho_other_intensity"] = rho_other
        meta["intensity_drift"] = abs(rho_other - rho_val)
        if abs(rho_other - rho_val) > 2 * tol * rho_val + 1e-12:
            meta["intensity_warning"] = True
    return MomentReport(d=m.d, lam=m.lam, ev2=ev2, var_v=var, rho=rho_val, meta=meta)


def rho(m: ModelParams, tol: float = 1e-7, check_intensity: float | None = 3.0) -> float:
    """Correction factor 1 + lambda^2 Var[vol(V_o)] (intensity-free)."""
    return moment_report(m, tol, check_intensity).rho


def approx_typical_cdf(r, m: ModelParams, rho_val: float):
    if rho_val < 1:
        raise ValueError("rho must be >= 1")
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("r must be nonnegative")
    out = -np.expm1(-rho_val * m.lam * m.kappa * r**m.d)
    return float(out) if out.ndim == 0 else out


def approx_typical_moment(n: int, m: ModelParams, rho_val: float) -> float:
    if n < 1:
        raise ValueError("moment order must be >= 1")
    return math.exp(math.lgamma(1.0 + n / m.d) - (n / m.d) * math.log(rho_val * m.lam * m.kappa))
