"""Distance law of a uniform point in the typical cell via domain configurations.

Conditioned on k Poisson points in B_{2l}(o), the half-way points x_i/2 are
i.i.d. uniform in B_l(o) and they alone decide the cell inside B_l(o): a
point y with |y| <= l is cut away by x_i exactly when y is strictly closer to
x_i than to the origin. The conditional CDF of the distance is the expected
ratio vol(cell n B_z) / vol(cell n B_l), estimated with one probe cloud per
configuration shared by numerator and denominator, and the result is mixed
over k with Poisson weights of mean lambda kappa_d (2l)^d.

Configurations are allocated to the k-strata in proportion to the Poisson
weights (stratified sampling), so the mixture needs no outer randomness in k.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import stats

from .curves import DistributionCurve
from .geometry import PolarPoint, cartesian_to_polar, pair_distance, uniform_in_ball
from .specfun import unit_ball_volume
from .streams import Stream, as_stream
from .zerocell import ModelParams

log = logging.getLogger(__name__)

DEFAULT_ELL_D2 = 1.6


@dataclass
class DomainConfiguration:
    ell: float
    points: np.ndarray  # (k, d) cartesian half-way points

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        if self.ell <= 0:
            raise ValueError("ell must be positive")
        if self.points.ndim != 2:
            raise ValueError("points must be a (k, d) array")
        if self.k and np.max(np.linalg.norm(self.points, axis=1)) > self.ell * (1 + 1e-12):
            raise ValueError("configuration point outside B_ell")

    @property
    def k(self) -> int:
        return self.points.shape[0]

    def polar(self) -> list[PolarPoint]:
        return [cartesian_to_polar(p) for p in self.points]


@dataclass
class McBudget:
    outer_configs: int = 4000
    inner_points: int = 4096
    k_max: Optional[int] = None
    seed: int = 0
    tail_tol: float = 1e-6

    def __post_init__(self):
        if self.outer_configs < 1 or self.inner_points < 1:
            raise ValueError("sample counts must be >= 1")
        if self.k_max is not None and self.k_max < 0:
            raise ValueError("k_max must be >= 0")
        if not (0.0 < self.tail_tol < 1.0):
            raise ValueError("tail_tol must lie in (0, 1)")


def sample_domain_config(m: ModelParams, ell: float, k: int, stream) -> DomainConfiguration:
    if ell <= 0 or k < 0:
        raise ValueError("need ell > 0 and k >= 0")
    rng = stream if isinstance(stream, np.random.Generator) else as_stream(stream).generator()
    return DomainConfiguration(ell, uniform_in_ball(rng, k, m.d, ell))


def indicator_d(y: PolarPoint, cfg_point: PolarPoint, d: int) -> int:
    """1 unless y lies strictly beyond the bisector belonging to ``cfg_point``."""
    r = y.radius
    li = cfg_point.radius
    if li > r:
        return 1
    far = PolarPoint(2.0 * li, cfg_point.angles)
    return 1 if pair_distance(y, far, d) > r else 0


def _passes(probes: np.ndarray, pts: np.ndarray) -> np.ndarray:
    # |y - 2x|^2 > |y|^2  <=>  y.x < |x|^2
    if pts.shape[0] == 0:
        return np.ones(probes.shape[0], dtype=bool)
    return np.all(probes @ pts.T < np.einsum("ij,ij->i", pts, pts), axis=1)


def g_k_volume(z: float, cfg: DomainConfiguration, d: int, inner_points: int, stream) -> tuple[float, float]:
    """Estimate of vol(V_o(C) n B_z(o)) with its standard error."""
    if not (0.0 <= z <= cfg.ell):
        raise ValueError("z must lie in [0, ell]")
    rng = stream if isinstance(stream, np.random.Generator) else as_stream(stream).generator()
    vol = unit_ball_volume(d) * z**d
    if z == 0.0:
        return 0.0, 0.0
    probes = uniform_in_ball(rng, inner_points, d, z)
    frac = float(_passes(probes, cfg.points).mean())
    return vol * frac, vol * math.sqrt(frac * (1.0 - frac) / inner_points)


def _ratio_curve(z: np.ndarray, cfg: DomainConfiguration, d: int, n: int, st: Stream):
    """Shared-probe ratio g(z)/g(ell) on a grid; retries on an empty denominator."""
    flagged = False
    for attempt in range(8):
        rng = st.child(attempt).generator()
        probes = uniform_in_ball(rng, n, d, cfg.ell)
        ok = _passes(probes, cfg.points)
        if ok.any():
            radii = np.sort(np.linalg.norm(probes[ok], axis=1))
            return np.searchsorted(radii, z, side="right") / radii.size, flagged
        flagged = True
    raise ArithmeticError("every probe fell outside the conditioned cell")


def poisson_truncation(mu: float, tail_tol: float) -> int:
    return int(stats.poisson.isf(tail_tol, mu)) + 1


def _allocation(w: np.ndarray, total: int) -> np.ndarray:
    n = np.floor(w / w.sum() * total).astype(int)
    return np.maximum(n, 2)


def conditional_cdf(z, k: int, m: ModelParams, ell: float, b: McBudget, stream=None):
    """CDF of the distance given k Poisson points in B_{2 ell}(o); returns (estimate, SE)."""
    z = np.asarray(z, dtype=float)
    if np.any(z < 0) or np.any(z > ell):
        raise ValueError("z must lie in [0, ell]")
    if k == 0:
        est = (z / ell) ** m.d
        return est, np.zeros_like(est)
    st = as_stream(b.seed if stream is None else stream).child(k)
    est, se, _ = _conditional_grid(z, k, m, ell, b.outer_configs, b.inner_points, st)
    return est, se


def _conditional_grid(z, k, m, ell, n_cfg, n_inner, st: Stream):
    rows = np.empty((n_cfg, z.size))
    flagged = 0
    for j in range(n_cfg):
        cst = st.child(j)
        cfg = sample_domain_config(m, ell, k, cst.child(0))
        rows[j], f = _ratio_curve(z, cfg, m.d, n_inner, cst.child(1))
        flagged += f
    mean = rows.mean(axis=0)
    se = rows.std(axis=0, ddof=1) / math.sqrt(n_cfg) if n_cfg > 1 else np.full(z.size, np.inf)
    return mean, se, flagged


@dataclass
class ExactResult:
    curve: DistributionCurve
    se: np.ndarray
    meta: dict = field(default_factory=dict)


def default_ell(m: ModelParams, stream=0, n: int = 4000) -> float:
    if m.d == 2:
        return DEFAULT_ELL_D2 / math.sqrt(m.lam)
    from .simulate import farthest_point_quantile

    return farthest_point_quantile(m, 0.99, n, stream)


def typical_cdf_exact(z, m: ModelParams, ell: Optional[float] = None, b: Optional[McBudget] = None) -> ExactResult:
    """Poisson mixture of conditional CDFs on the grid z (values in [0, ell])."""
    b = b or McBudget()
    if ell is None:
        ell = default_ell(m, b.seed)
        ell_rule = "quantile-0.99" if m.d != 2 else "fixed-1.6"
    else:
        ell_rule = "user"
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(z < 0) or np.any(z > ell) or np.any(np.diff(z) < 0):
        raise ValueError("z must be sorted within [0, ell]")
    if ell < 2.1 * m.scale:
        warnings.warn(f"ell={ell:.3g} is small: the typical cell often reaches beyond B_ell", stacklevel=2)

    mu = m.lam * m.kappa * (2.0 * ell) ** m.d
    k_max = b.k_max if b.k_max is not None else poisson_truncation(mu, b.tail_tol)
    ks = np.arange(k_max + 1)
    w = stats.poisson.pmf(ks, mu)
    tail = float(stats.poisson.sf(k_max, mu))
    alloc = _allocation(w, b.outer_configs)
    st = Stream(b.seed, (7, m.d))
    total = np.zeros(z.size)
    var = np.zeros(z.size)
    flagged = 0
    for k, wk, nk in zip(ks, w, alloc):
        if k == 0:
            total += wk * (z / ell) ** m.d
            continue
        mean, se, f = _conditional_grid(z, int(k), m, ell, int(nk), b.inner_points, st.child(int(k)))
        total += wk * mean
        var += (wk * se) ** 2
        flagged += f
    meta = {
        "method": "exact",
        "d": m.d,
        "lambda": m.lam,
        "ell": ell,
        "ell_rule": ell_rule,
        "k_max": int(k_max),
        "poisson_mean": mu,
        "tail_mass": tail,
        "outer_configs": int(alloc[1:].sum()),
        "inner_points": b.inner_points,
        "seed": b.seed,
        "retried_configs": int(flagged),
    }
    # mass beyond k_max is unknown but bounded; it widens the error band
    se = np.sqrt(var) + tail
    curve = DistributionCurve(z, np.clip(total, 0.0, 1.0), meta)
    return ExactResult(curve, se, meta)


def typical_mean_exact(m: ModelParams, ell: Optional[float] = None, b: Optional[McBudget] = None, steps: int = 161) -> float:
    """Mean distance from the survival function on [0, ell]."""
    if ell is None:
        ell = default_ell(m, (b or McBudget()).seed)
    grid = np.linspace(0.0, ell, steps)
    res = typical_cdf_exact(grid, m, ell, b)
    return res.curve.mean_from_cdf()
