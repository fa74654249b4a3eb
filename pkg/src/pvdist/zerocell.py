"""Distance from the nucleus to a uniform point of the 0-cell.

This law coincides with the contact distance of the PPP,
F(r) = 1 - exp(-lambda kappa_d r^d).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .specfun import unit_ball_volume


@dataclass(frozen=True)
class ModelParams:
    d: int
    lam: float = 1.0

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"dimension must be an integer >= 1, got {self.d}")
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise ValueError(f"intensity must be positive and finite, got {self.lam}")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "lam", float(self.lam))

    @property
    def kappa(self) -> float:
        return unit_ball_volume(self.d)

    @property
    def scale(self) -> float:
        """Length scale (lambda kappa_d)^(-1/d)."""
        return (self.lam * self.kappa) ** (-1.0 / self.d)


def _nonneg(r):
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or np.any(np.isnan(r)):
        raise ValueError("distances must be nonnegative")
    return r


def contact_cdf(r, m: ModelParams):
    r = _nonneg(r)
    out = -np.expm1(-m.lam * m.kappa * r**m.d)
    return float(out) if out.ndim == 0 else out


def contact_pdf(r, m: ModelParams):
    r = _nonneg(r)
    c = m.lam * m.kappa
    out = c * m.d * r ** (m.d - 1) * np.exp(-c * r**m.d)
    return float(out) if out.ndim == 0 else out


def contact_quantile(p, m: ModelParams):
    p = np.asarray(p, dtype=float)
    if np.any(p < 0) or np.any(p >= 1) or np.any(np.isnan(p)):
        raise ValueError("p must lie in [0, 1)")
    out = (-np.log1p(-p) / (m.lam * m.kappa)) ** (1.0 / m.d)
    return float(out) if out.ndim == 0 else out


def zerocell_moment(n: int, m: ModelParams) -> float:
    """n-th moment Gamma(1 + n/d) / (lambda kappa_d)^(n/d)."""
    if n < 1:
        raise ValueError(f"moment order must be >= 1, got {n}")
    return math.exp(math.lgamma(1.0 + n / m.d) - (n / m.d) * math.log(m.lam * m.kappa))
