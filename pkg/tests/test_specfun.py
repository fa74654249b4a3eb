import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from pvdist.specfun import (
    beta_fn,
    dim_constants,
    exp_integral_e1,
    inc_beta,
    reg_inc_beta,
    sin_power_integral,
    sin_power_integral_beta,
    unit_ball_volume,
)


def test_ball_volumes_small_dims():
    assert unit_ball_volume(0) == pytest.approx(1.0)
    assert unit_ball_volume(1) == pytest.approx(2.0)
    assert unit_ball_volume(2) == pytest.approx(math.pi)
    assert unit_ball_volume(3) == pytest.approx(4.0 * math.pi / 3.0)


def test_ball_volume_recursion():
    for d in range(2, 40):
        assert unit_ball_volume(d) == pytest.approx(2 * math.pi / d * unit_ball_volume(d - 2), rel=1e-13)


def test_dim_constants():
    c = dim_constants(3)
    assert c.chi_d == pytest.approx(4 * math.pi)
    assert c.alpha_d == pytest.approx(unit_ball_volume(2) / unit_ball_volume(3))
    # 4 pi C_{d,2} = chi_d chi_{d-1}
    for d in range(2, 11):
        c = dim_constants(d)
        assert 4 * math.pi * c.c_d2 == pytest.approx(c.chi_d * dim_constants(d - 1).chi_d, rel=1e-13)
    assert dim_constants(1).c_d2 is None
    with pytest.raises(ValueError):
        dim_constants(0)


def test_reg_inc_beta_against_scipy():
    rng = np.random.default_rng(3)
    for _ in range(300):
        z = rng.random()
        a, b = rng.uniform(0.05, 12.0, 2)
        assert reg_inc_beta(z, a, b) == pytest.approx(special.betainc(a, b, z), rel=1e-12, abs=1e-14)


@given(st.floats(0.0, 1.0), st.floats(0.1, 20.0), st.floats(0.1, 20.0))
def test_reg_inc_beta_symmetry(z, a, b):
    assert reg_inc_beta(z, a, b) + reg_inc_beta(1.0 - z, b, a) == pytest.approx(1.0, abs=1e-12)


def test_reg_inc_beta_edges_and_errors():
    assert reg_inc_beta(0.0, 2.0, 3.0) == 0.0
    assert reg_inc_beta(1.0, 2.0, 3.0) == 1.0
    arr = reg_inc_beta(np.array([0.25, 0.5]), 2.0, 2.0)
    assert arr.shape == (2,)
    with pytest.raises(ValueError):
        reg_inc_beta(1.5, 1.0, 1.0)
    with pytest.raises(ValueError):
        reg_inc_beta(0.5, -1.0, 1.0)


def test_inc_beta_unnormalised():
    assert inc_beta(1.0, 2.5, 0.5) == pytest.approx(beta_fn(2.5, 0.5))
    assert inc_beta(0.3, 2.0, 1.0) == pytest.approx(0.3**2 / 2)


def test_e1_reference_values():
    assert exp_integral_e1(1.0) == pytest.approx(0.21938393439552029, rel=1e-14)
    zs = np.geomspace(1e-6, 60.0, 200)
    np.testing.assert_allclose(exp_integral_e1(zs), special.exp1(zs), rtol=1e-12)
    with pytest.raises(ValueError):
        exp_integral_e1(0.0)


@given(st.floats(1e-3, 50.0))
def test_e1_envelope(z):
    e = exp_integral_e1(z)
    assert 0.5 * math.exp(-z) * math.log1p(2.0 / z) < e < math.exp(-z) * math.log1p(1.0 / z)
    assert e <= math.exp(-z) / z


@settings(max_examples=60)
@given(st.floats(0.0, math.pi), st.integers(0, 12))
def test_sin_power_two_routes(psi, d):
    if d == 0:
        assert float(sin_power_integral(psi, 0)) == pytest.approx(psi)
        return
    assert float(sin_power_integral(psi, d)) == pytest.approx(sin_power_integral_beta(psi, d), abs=1e-12)


def test_sin_power_full_range():
    for d in range(1, 10):
        assert float(sin_power_integral(math.pi, d)) == pytest.approx(beta_fn(0.5 * (d + 1), 0.5), rel=1e-13)
