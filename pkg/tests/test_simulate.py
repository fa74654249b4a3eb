import math

import numpy as np
import pytest
from scipy import stats

from pvdist.simulate import (
    EmpiricalCdf,
    PppSample,
    cell_circumradius,
    farthest_point_quantile,
    in_typical_cell,
    ks_statistic,
    sample_ppp,
    sample_typical_distance,
    sample_zerocell_distance,
)
from pvdist.streams import Stream, chunk_sizes
from pvdist.typical1d import typical1d_cdf
from pvdist.zerocell import ModelParams, contact_cdf, contact_quantile


def test_ppp_counts_are_poisson():
    m = ModelParams(2, 1.5)
    W = 2.0
    counts = np.array([len(sample_ppp(m, W, Stream(1, (i,))).points) for i in range(4000)])
    mu = m.lam * m.kappa * W**2
    assert abs(counts.mean() - mu) < 3 * math.sqrt(mu / counts.size)
    assert counts.var() == pytest.approx(mu, rel=0.1)
    pts = sample_ppp(m, W, 3).points
    assert np.all(np.linalg.norm(pts, axis=1) <= W)


def test_ppp_void_probability():
    m = ModelParams(3, 0.05)
    empty = np.mean([len(sample_ppp(m, 1.0, Stream(2, (i,))).points) == 0 for i in range(3000)])
    p = math.exp(-0.05 * m.kappa)
    assert abs(empty - p) < 4 * math.sqrt(p * (1 - p) / 3000)


def test_membership():
    ppp = PppSample(4.0, np.array([[1.0, 0.0], [0.0, -3.0]]), 1.0)
    assert in_typical_cell([0.0, 0.0], ppp)
    assert in_typical_cell([0.4, 0.0], ppp)
    assert not in_typical_cell([0.6, 0.0], ppp)
    assert in_typical_cell([-1.5, 0.0], ppp)
    assert in_typical_cell([1.9, 0.3], PppSample(4.0, np.empty((0, 2)), 1.0))
    with pytest.raises(ValueError):
        in_typical_cell([2.5, 0.0], ppp)


def test_circumradius_of_square_cell():
    pts = np.array([[2.0, 0.0], [-2.0, 0.0], [0.0, 2.0], [0.0, -2.0]])
    assert cell_circumradius(pts) == pytest.approx(math.sqrt(2.0))
    assert cell_circumradius(pts[:2]) is None  # unbounded


def test_ks_statistic_basics():
    x = np.array([0.1, 0.2, 0.3])
    e = EmpiricalCdf(x)
    assert ks_statistic(e, e) == pytest.approx(0.0)
    assert ks_statistic(x, lambda r: np.zeros_like(r)) == 1.0
    d = ks_statistic(x, lambda r: np.clip(r, 0, 1))
    assert d == pytest.approx(stats.kstest(x, "uniform").statistic)


def test_ks_critical_value_coverage():
    m = ModelParams(2)
    rng = np.random.default_rng(11)
    n = 500
    hits = sum(
        ks_statistic(contact_quantile(rng.random(n), m), lambda r: contact_cdf(r, m)) < 1.63 / math.sqrt(n)
        for _ in range(100)
    )
    assert hits >= 99


def test_line_samples_match_closed_form():
    m = ModelParams(1)
    r = sample_typical_distance(m, 20_000, 7)
    assert ks_statistic(r, typical1d_cdf) < 1.63 / math.sqrt(r.size)
    assert r.mean() == pytest.approx(1.0 / 3.0, abs=4 * math.sqrt(5 / 36 / r.size))
    z, nuc = sample_zerocell_distance(m, 20_000, 7, with_nucleus=True)
    assert ks_statistic(z, lambda t: contact_cdf(t, m)) < 1.63 / math.sqrt(z.size)
    assert ks_statistic(nuc, lambda t: contact_cdf(t, m)) < 1.63 / math.sqrt(z.size)


def test_plane_samples_small():
    m = ModelParams(2)
    z, nuc = sample_zerocell_distance(m, 2000, 5, with_nucleus=True)
    assert ks_statistic(z, lambda t: contact_cdf(t, m)) < 1.63 / math.sqrt(2000)
    assert ks_statistic(nuc, lambda t: contact_cdf(t, m)) < 1.63 / math.sqrt(2000)
    r = sample_typical_distance(m, 2000, 5)
    assert r.mean() == pytest.approx(0.445, abs=4 * 0.25 / math.sqrt(2000))


def test_intensity_scaling_in_law():
    a = sample_typical_distance(ModelParams(2, 1.0), 3000, 1)
    b = sample_typical_distance(ModelParams(2, 4.0), 3000, 2) * 2.0
    assert stats.ks_2samp(a, b).statistic < 1.63 * math.sqrt(2 / 3000)


def test_determinism_and_chunking():
    m = ModelParams(2)
    a = sample_typical_distance(m, 1500, 99)
    b = sample_typical_distance(m, 1500, 99)
    np.testing.assert_array_equal(a, b)
    c = sample_typical_distance(m, 1500, 100)
    assert not np.array_equal(a, c)
    assert chunk_sizes(2500) == [1000, 1000, 500]


def test_farthest_point_quantile():
    m = ModelParams(2)
    assert farthest_point_quantile(m, 0.0, 10, 0) == 0.0
    q50 = farthest_point_quantile(m, 0.5, 3000, 4)
    q99 = farthest_point_quantile(m, 0.99, 3000, 4)
    assert q50 < q99
    assert q99 == pytest.approx(1.6, abs=0.1)
    with pytest.raises(ValueError):
        farthest_point_quantile(m, 1.0, 10, 0)
