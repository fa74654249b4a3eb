import math

import numpy as np
import pytest

from pvdist.geometry import PolarPoint
from pvdist.streams import Stream
from pvdist.typicalexact import (
    DomainConfiguration,
    McBudget,
    conditional_cdf,
    g_k_volume,
    indicator_d,
    poisson_truncation,
    sample_domain_config,
    typical_cdf_exact,
    typical_mean_exact,
)
from pvdist.zerocell import ModelParams, contact_cdf, zerocell_moment


def test_budget_validation():
    with pytest.raises(ValueError):
        McBudget(outer_configs=0)
    with pytest.raises(ValueError):
        McBudget(tail_tol=1.0)


def test_domain_configuration_sampling():
    m = ModelParams(3)
    assert sample_domain_config(m, 1.0, 0, 1).k == 0
    cfg = sample_domain_config(m, 1.5, 100_000, 2)
    rd = np.linalg.norm(cfg.points, axis=1) ** 3
    assert abs(rd.mean() - 1.5**3 / 2) < 3 * rd.std() / math.sqrt(rd.size)
    assert np.all(np.abs(cfg.points.mean(axis=0)) < 3 * 1.5 / math.sqrt(rd.size))
    small = sample_domain_config(m, 1.5, 4, 3)
    assert [p.radius for p in small.polar()] == pytest.approx(list(np.linalg.norm(small.points, axis=1)))
    with pytest.raises(ValueError):
        DomainConfiguration(1.0, np.array([[2.0, 0.0]]))


def test_indicator_cases():
    y = PolarPoint(1.0, (0.0,))
    assert indicator_d(y, PolarPoint(1.2, (0.0,)), 2) == 1  # l_i > r
    assert indicator_d(y, PolarPoint(0.5, (0.0,)), 2) == 0  # beyond the bisector on axis
    assert indicator_d(y, PolarPoint(0.5, (math.pi,)), 2) == 1  # antipodal
    assert indicator_d(PolarPoint(1.0, (0.0, 0.3)), PolarPoint(0.2, (math.pi, 0.3)), 3) == 1


def test_indicator_matches_vectorised_test():
    rng = np.random.default_rng(0)
    from pvdist.typicalexact import _passes
    from pvdist.geometry import cartesian_to_polar

    for _ in range(300):
        y = rng.standard_normal(3)
        x = rng.standard_normal(3) * 0.7
        expect = bool(_passes(y[None, :], x[None, :])[0])
        assert indicator_d(cartesian_to_polar(y), cartesian_to_polar(x), 3) == int(expect)


def test_g_k_volume_oracles():
    cfg = DomainConfiguration(2.0, np.empty((0, 2)))
    v, se = g_k_volume(1.0, cfg, 2, 1000, 0)
    assert v == pytest.approx(math.pi) and se == 0.0
    far = DomainConfiguration(2.0, np.array([[1.5, 0.0]]))
    assert g_k_volume(1.0, far, 2, 1000, 0)[0] == pytest.approx(math.pi)
    # unit disc minus the segment beyond the line x = 0.5
    one = DomainConfiguration(2.0, np.array([[0.5, 0.0]]))
    v, se = g_k_volume(1.0, one, 2, 400_000, 3)
    exact = math.pi - (math.acos(0.5) - 0.5 * math.sqrt(0.75))
    assert abs(v - exact) < 4 * se


def test_adding_a_point_never_increases_volume():
    rng = np.random.default_rng(4)
    pts = rng.uniform(-1, 1, (6, 2)) * 0.6
    probes = Stream(8)
    prev = math.inf
    for k in range(7):
        cfg = DomainConfiguration(1.0, pts[:k])
        v, _ = g_k_volume(1.0, cfg, 2, 20_000, probes)  # same probes each time
        assert v <= prev + 1e-12
        prev = v


def test_conditional_cdf_properties():
    m = ModelParams(2)
    z = np.linspace(0, 1.2, 13)
    est, se = conditional_cdf(z, 0, m, 1.2, McBudget())
    np.testing.assert_allclose(est, (z / 1.2) ** 2)
    est, se = conditional_cdf(z, 5, m, 1.2, McBudget(outer_configs=50, inner_points=512, seed=3))
    assert est[0] == 0.0 and est[-1] == pytest.approx(1.0)
    assert np.all(np.diff(est) >= 0)
    assert np.all(se >= 0)


def test_poisson_truncation():
    from scipy import stats

    k = poisson_truncation(32.0, 1e-6)
    assert stats.poisson.sf(k, 32.0) < 1e-6


def test_mixture_curve_small_budget():
    m = ModelParams(2)
    z = np.linspace(0, 1.6, 33)
    res = typical_cdf_exact(z, m, 1.6, McBudget(outer_configs=600, inner_points=1024, seed=1))
    v = res.curve.value
    assert v[0] == 0.0
    assert np.all(np.diff(v) >= 0)
    assert res.meta["k_max"] >= 32 and res.meta["tail_mass"] < 1e-6
    # typical-cell law dominates the contact law from above
    assert np.all(v[1:-1] >= contact_cdf(z[1:-1], m) - 3 * res.se[1:-1])
    assert res.curve.mean_from_cdf() == pytest.approx(0.445, abs=0.02)


def test_mixture_is_deterministic():
    b = McBudget(outer_configs=80, inner_points=256, seed=12)
    z = np.linspace(0, 1.6, 5)
    a = typical_cdf_exact(z, ModelParams(2), 1.6, b).curve.value
    c = typical_cdf_exact(z, ModelParams(2), 1.6, b).curve.value
    np.testing.assert_array_equal(a, c)


def test_line_mean_via_configurations():
    # on the line the configuration route must reproduce the closed-form mean 1/3
    mean = typical_mean_exact(ModelParams(1), 4.0, McBudget(outer_configs=1500, inner_points=2048, seed=2))
    assert mean == pytest.approx(1.0 / 3.0, abs=0.01)
    assert mean <= zerocell_moment(1, ModelParams(1))


def test_small_ell_warns():
    with pytest.warns(UserWarning):
        typical_cdf_exact([0.0, 0.5], ModelParams(2), 0.8, McBudget(outer_configs=20, inner_points=64))
