import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pvdist.zerocell import ModelParams, contact_cdf, contact_pdf, contact_quantile, zerocell_moment


def test_model_params_validation():
    with pytest.raises(ValueError):
        ModelParams(0)
    with pytest.raises(ValueError):
        ModelParams(2, 0.0)
    with pytest.raises(ValueError):
        ModelParams(2.5)
    assert ModelParams(2).kappa == pytest.approx(math.pi)


def test_contact_cdf_values():
    m = ModelParams(2)
    assert contact_cdf(0.0, m) == 0.0
    assert contact_cdf(0.5, m) == pytest.approx(1 - math.exp(-math.pi / 4), rel=1e-14)
    assert contact_cdf(0.5, m) == pytest.approx(0.544061872, abs=1e-8)
    with pytest.raises(ValueError):
        contact_cdf(-0.1, m)


@given(st.integers(1, 10), st.floats(0.0, 0.999))
def test_quantile_inverts_cdf(d, p):
    m = ModelParams(d, 2.0)
    assert contact_cdf(contact_quantile(p, m), m) == pytest.approx(p, abs=1e-12)


def test_quantile_domain():
    with pytest.raises(ValueError):
        contact_quantile(1.0, ModelParams(2))


def test_pdf_integrates_to_cdf():
    from scipy import integrate

    m = ModelParams(3, 1.7)
    val, _ = integrate.quad(lambda r: contact_pdf(r, m), 0.0, 0.6)
    assert val == pytest.approx(contact_cdf(0.6, m), rel=1e-10)


def test_moments():
    assert zerocell_moment(1, ModelParams(2)) == pytest.approx(0.5, abs=1e-15)
    assert zerocell_moment(1, ModelParams(1)) == pytest.approx(0.5)
    m = ModelParams(3, 2.0)
    r = np.linspace(0, 5, 200001)
    assert zerocell_moment(2, m) == pytest.approx(np.trapezoid(2 * r * (1 - contact_cdf(r, m)), r), rel=1e-6)
    with pytest.raises(ValueError):
        zerocell_moment(0, m)
