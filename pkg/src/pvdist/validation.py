"""Reference checks: every published number and every cross-method agreement.

Each check returns :class:`CheckResult` records. Expensive ingredients
(simulated samples, the Poisson-mixture curve, rho values) are cached on a
:class:`Suite` so several checks can share them.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import limitshape as ls
from .geometry import union_volume, union_volume_mc
from .moments import (
    approx_typical_cdf,
    approx_typical_moment,
    covariance_ball_cell,
    lemma6_check,
    rho,
    second_moment_cell_volume,
)
from .simulate import EmpiricalCdf, ks_statistic, sample_typical_distance, sample_zerocell_distance
from .typical1d import deconditioning_int1_closed, appendix_a_numeric, typical1d_cdf, typical1d_moment
from .typicalexact import McBudget, typical_cdf_exact
from .zerocell import ModelParams, contact_cdf, zerocell_moment

DIMS = tuple(range(1, 11))
REF_RHO = (1.500, 1.285, 1.171, 1.128, 1.079, 1.062, 1.043, 1.032, 1.029, 1.018)
REF_MEAN_EXACT = (0.305, 0.445, 0.529, 0.595, 0.651, 0.701, 0.749, 0.798, 0.831, 0.873)
REF_MEAN_APPROX = (0.333, 0.442, 0.524, 0.591, 0.648, 0.698, 0.745, 0.789, 0.829, 0.862)
REF_VAR_EXACT = (0.090, 0.058, 0.038, 0.028, 0.022, 0.019, 0.016, 0.014, 0.013, 0.012)
REF_VAR_APPROX = (0.111, 0.053, 0.036, 0.028, 0.022, 0.018, 0.015, 0.013, 0.012, 0.011)
REF_ZEROCELL_MEAN_D2 = 0.500
REF_ELL_D2 = 1.6


@dataclass
class CheckResult:
    criterion: int
    name: str
    anchor: str
    measured: float
    target: str
    passed: bool

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] C{self.criterion:<2d} {self.name}: measured={self.measured:.6g} target {self.target} ({self.anchor})"


@dataclass
class Suite:
    samples: int = 100_000
    seed: int = 2024
    exact_budget: McBudget = field(default_factory=lambda: McBudget(seed=2024))
    tol: dict = field(default_factory=dict)
    _cache: dict = field(default_factory=dict, repr=False)

    def tolerance(self, key: str, default: float) -> float:
        return float(self.tol.get(key, default))

    def _memo(self, key, fn: Callable):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    def typical(self, d: int) -> np.ndarray:
        return self._memo(("typ", d), lambda: sample_typical_distance(ModelParams(d), self.samples, self.seed))

    def zero(self, d: int):
        return self._memo(
            ("zero", d), lambda: sample_zerocell_distance(ModelParams(d), self.samples, self.seed, with_nucleus=True)
        )

    def rho(self, d: int, lam: float = 1.0) -> float:
        return self._memo(("rho", d, lam), lambda: rho(ModelParams(d, lam), tol=1e-8))

    def exact_d2(self):
        grid = np.linspace(0.0, REF_ELL_D2, 161)
        return self._memo("exact2", lambda: typical_cdf_exact(grid, ModelParams(2), REF_ELL_D2, self.exact_budget))


def _within(x: float, ref: float, tol: float) -> bool:
    return abs(x - ref) <= tol


def check_rho_row(s: Suite) -> list[CheckResult]:
    tol = s.tolerance("rho", 0.02)
    return [
        CheckResult(1, f"rho d={d}", f"reference rho_{d}={ref}", s.rho(d), f"{ref} +/- {tol}", _within(s.rho(d), ref, tol))
        for d, ref in zip(DIMS, REF_RHO)
    ]


def check_approx_rows(s: Suite) -> list[CheckResult]:
    tol = s.tolerance("approx", 0.005)
    out = []
    for d, rm, rv in zip(DIMS, REF_MEAN_APPROX, REF_VAR_APPROX):
        m = ModelParams(d)
        r = s.rho(d)
        mean = approx_typical_moment(1, m, r)
        var = approx_typical_moment(2, m, r) - mean**2
        out.append(CheckResult(2, f"approx mean d={d}", f"reference {rm}", mean, f"{rm} +/- {tol}", _within(mean, rm, tol)))
        out.append(CheckResult(2, f"approx var d={d}", f"reference {rv}", var, f"{rv} +/- {tol}", _within(var, rv, tol)))
    return out


def check_exact_rows(s: Suite) -> list[CheckResult]:
    out = []
    m1 = typical1d_moment(1)
    out.append(CheckResult(3, "exact mean d=1 (closed form)", "reference 0.305", m1, "0.305 +/- 0.002", _within(m1, 0.305, 0.002)))
    ex = s.exact_d2().curve.mean_from_cdf()
    out.append(CheckResult(3, "exact mean d=2 (configurations, ell=1.6)", "reference 0.445", ex, "0.445 +/- 0.01", _within(ex, 0.445, 0.01)))
    for d, ref in ((2, 0.445), (3, 0.529)):
        mu = float(s.typical(d).mean())
        out.append(CheckResult(3, f"exact mean d={d} (simulation n={s.samples})", f"reference {ref}", mu, f"{ref} +/- 0.01", _within(mu, ref, 0.01)))
    return out


def check_zerocell_mean(s: Suite) -> list[CheckResult]:
    m = ModelParams(2)
    exact = zerocell_moment(1, m)
    sim = float(s.zero(2)[0].mean())
    return [
        CheckResult(4, "0-cell mean d=2 (formula)", "reference 0.500", exact, "0.5 exactly (1e-12)", _within(exact, REF_ZEROCELL_MEAN_D2, 1e-12)),
        CheckResult(4, "0-cell mean d=2 (simulation)", "reference 0.500", sim, "0.5 +/- 0.005", _within(sim, REF_ZEROCELL_MEAN_D2, 0.005)),
    ]


def check_oracles(s: Suite) -> list[CheckResult]:
    ks_tol = s.tolerance("ks", 0.01)
    out = []
    for d in (1, 2, 3):
        m = ModelParams(d)
        ks = ks_statistic(s.zero(d)[0], lambda r, m=m: contact_cdf(r, m))
        out.append(CheckResult(5, f"KS 0-cell vs contact law d={d}", "contact-distance law", ks, f"< {ks_tol}", ks < ks_tol))
    ks = ks_statistic(s.typical(1), typical1d_cdf)
    out.append(CheckResult(5, "KS typical d=1 vs closed form", "line closed form", ks, f"< {ks_tol}", ks < ks_tol))
    res = s.exact_d2()
    ecdf = EmpiricalCdf(s.typical(2))
    gap = float(np.max(np.abs(res.curve.value - ecdf(res.curve.r))))
    sup_tol = s.tolerance("supnorm", 0.02)
    out.append(CheckResult(5, "sup |configuration CDF - simulated ECDF| d=2 on [0,1.6]", "cross-method", gap, f"< {sup_tol}", gap < sup_tol))
    return out


def check_deconditioning(s: Suite) -> list[CheckResult]:
    out = []
    for r in (0.1, 0.5, 1.0, 2.0):
        a = appendix_a_numeric(r)
        gap = abs(a.total - typical1d_cdf(r))
        out.append(CheckResult(6, f"closed form vs deconditioning integrals r={r}", "line closed form", gap, "< 1e-6", gap < 1e-6))
        gap1 = abs(a.int1 - deconditioning_int1_closed(r))
        out.append(CheckResult(6, f"Int1 closed form r={r}", "first deconditioning integral", gap1, "< 1e-12", gap1 < 1e-12))
    return out


def check_cap_closed_form(s: Suite) -> list[CheckResult]:
    rng = np.random.default_rng(s.seed)
    worst = 0.0
    for _ in range(100):
        c = ls.InballCondition(
            float(np.exp(rng.uniform(math.log(0.05), math.log(20.0)))),
            float(np.exp(rng.uniform(math.log(0.01), math.log(3.0)))),
            int(rng.integers(2, 11)),
        )
        worst = max(worst, abs(ls.cap_hit_probability(c) - ls.cap_hit_probability_quadrature(c)))
    return [CheckResult(7, "cap probability closed form vs quadrature (100 cases)", "cap-hit integral", worst, "< 1e-8", worst < 1e-8)]


def check_geometry(s: Suite) -> list[CheckResult]:
    rng = np.random.default_rng(s.seed + 1)
    worst = 0.0
    for _ in range(1000):
        d = int(rng.integers(2, 11))
        v1, v2 = rng.uniform(0.01, 3.0, 2)
        u = rng.uniform(0.0, math.pi)
        a = union_volume(v1, v2, u, d, "psi")
        b = union_volume(v1, v2, u, d, "lens")
        worst = max(worst, abs(a - b) / b)
    out = [CheckResult(8, "union volume psi vs lens (1000 cases)", "two-ball union", worst, "< 1e-6 rel", worst < 1e-6)]
    worst_z = 0.0
    for _ in range(20):
        d = int(rng.integers(2, 6))
        v1, v2 = rng.uniform(0.2, 2.0, 2)
        u = rng.uniform(0.0, math.pi)
        est, se = union_volume_mc(v1, v2, u, d, 200_000, rng)
        worst_z = max(worst_z, abs(est - union_volume(v1, v2, u, d)) / se)
    out.append(CheckResult(8, "union volume vs hit-or-miss (20 cases)", "two-ball union", worst_z, "< 3 sigma", worst_z < 3.0))
    return out


def check_covariance(s: Suite) -> list[CheckResult]:
    out = []
    for d in (1, 2):
        m = ModelParams(d)
        var = second_moment_cell_volume(m, 1e-9) - 1.0
        c0 = covariance_ball_cell(0.0, m, 1e-9)
        out.append(CheckResult(9, f"Cov(0) d={d}", "covariance limit at 0", abs(c0) / var, "< 1e-6 (relative to Var)", abs(c0) <= 1e-6 * var))
        cl = covariance_ball_cell(6.0, m, 1e-9) / var
        out.append(CheckResult(9, f"Cov(r=6)/Var d={d}", "covariance limit at infinity", cl, "in [0.99, 1.01]", 0.99 <= cl <= 1.01))
        rep = lemma6_check(m, [0.2, 0.1, 0.05])
        ok = rep["decreasing"] and rep["positive"]
        out.append(CheckResult(9, f"Cov(r)/r^d strictly decreasing d={d}", "vanishing derivative at 0", rep["ratios"][-1], "decreasing toward 0", ok))
    return out


def check_limit_shape(s: Suite) -> list[CheckResult]:
    grid = [1.0, 10.0, 100.0, 1000.0]
    q = [ls.q_probability(ls.InballCondition(R, 0.1, 2)) for R in grid]
    inc = all(b > a for a, b in zip(q, q[1:]))
    out = [CheckResult(10, "Q_2(R, 0.1) increasing, Q(1000) > 0.999", "non-containment limit", q[-1], "increasing and > 0.999", inc and q[-1] > 0.999)]
    for d in (2, 3):
        sl = ls.h_growth_diagnostic(d, 0.1, grid)["slope"]
        target = 0.5 * (d + 1)
        out.append(CheckResult(10, f"log-log slope of h d={d}", "growth of h", sl, f"{target} +/- 0.1", _within(sl, target, 0.1)))
    return out


def check_properties(s: Suite) -> list[CheckResult]:
    out = []
    r = np.linspace(0.0, 3.0, 301)
    curves = {
        "contact d=2": contact_cdf(r, ModelParams(2)),
        "line closed form": typical1d_cdf(r),
        "approx d=2": approx_typical_cdf(r, ModelParams(2), s.rho(2)),
        "configurations d=2": s.exact_d2().curve.value,
        "ECDF typical d=2": EmpiricalCdf(s.typical(2))(r),
    }
    bad = [k for k, v in curves.items() if not (np.all(v >= 0) and np.all(v <= 1) and np.all(np.diff(v) >= 0))]
    out.append(CheckResult(11, "emitted CDFs monotone in [0,1]", "CDF axioms", float(len(bad)), "0 violations", not bad))

    for d in (1, 2):
        z = EmpiricalCdf(s.zero(d)[0])
        t = EmpiricalCdf(s.typical(d))
        band = 2.0 * 1.36 * math.sqrt(2.0 / s.samples)
        excess = float(np.max(z(r) - t(r)))
        out.append(CheckResult(11, f"F_0cell <= F_typical d={d}", "stochastic dominance", excess, f"<= {band:.4f} (noise band)", excess <= band))

    rhos = [s.rho(d) for d in DIMS]
    out.append(CheckResult(11, "rho_d >= 1 and decreasing in d", "correction factor", min(rhos),
                           ">= 1, strictly decreasing", min(rhos) >= 1 and all(b < a for a, b in zip(rhos, rhos[1:]))))
    drift = max(abs(s.rho(d, 3.0) - s.rho(d)) for d in (1, 2, 3))
    out.append(CheckResult(11, "rho invariant in lambda (1 vs 3)", "correction factor", drift, "< 2e-8", drift < 2e-8))

    a = sample_typical_distance(ModelParams(2), 300, s.seed)
    b = sample_typical_distance(ModelParams(2), 300, s.seed)
    small = McBudget(outer_configs=60, inner_points=256, seed=s.seed)
    g = np.linspace(0, 1.6, 9)
    e1 = typical_cdf_exact(g, ModelParams(2), 1.6, small).curve.value
    e2 = typical_cdf_exact(g, ModelParams(2), 1.6, small).curve.value
    same = bool(np.array_equal(a, b) and np.array_equal(e1, e2))
    out.append(CheckResult(11, "bit-identical reruns under a fixed seed", "determinism", float(same), "1", same))
    return out


ALL_CHECKS = (
    check_rho_row,
    check_approx_rows,
    check_exact_rows,
    check_zerocell_mean,
    check_oracles,
    check_deconditioning,
    check_cap_closed_form,
    check_geometry,
    check_covariance,
    check_limit_shape,
    check_properties,
)


def run_all(s: Suite | None = None, echo: Callable[[str], None] | None = None) -> list[CheckResult]:
    s = s or Suite()
    results = []
    for chk in ALL_CHECKS:
        t = time.perf_counter()
        part = chk(s)
        results.extend(part)
        if echo:
            for r in part:
                echo(r.line())
            echo(f"    ({chk.__name__} {time.perf_counter() - t:.1f}s)")
    return results
