import math

import numpy as np
import pytest
from scipy import integrate

from pvdist.typical1d import (
    OrderedGaps,
    deconditioning_int1_closed,
    appendix_a_numeric,
    cond_cdf_1d,
    joint_pdf_ordered,
    typical1d_cdf,
    typical1d_moment,
)


def test_conditional_cdf_pieces():
    g = OrderedGaps(1.0, 3.0)
    assert cond_cdf_1d(0.0, g) == 0.0
    assert cond_cdf_1d(0.5, g) == pytest.approx(0.25)
    assert cond_cdf_1d(2.0, g) == pytest.approx(0.75)
    assert cond_cdf_1d(5.0, g) == 1.0
    with pytest.raises(ValueError):
        cond_cdf_1d(1.0, OrderedGaps(3.0, 1.0))


def test_joint_pdf_normalised():
    val, _ = integrate.dblquad(lambda r1, r2: joint_pdf_ordered(OrderedGaps(r1, r2), 1.5), 0, 40, 0, lambda r2: r2)
    assert val == pytest.approx(1.0, rel=1e-8)


def test_closed_form_values():
    assert typical1d_cdf(0.0) == 0.0
    assert typical1d_cdf(0.5) == pytest.approx(0.78061606560, abs=1e-10)
    r = np.linspace(0, 6, 601)
    f = typical1d_cdf(r)
    assert np.all(np.diff(f) >= 0) and f[-1] < 1.0 and f[-1] > 0.999999


@pytest.mark.parametrize("r", [0.1, 0.5, 1.0, 2.0])
def test_deconditioning_integrals(r):
    a = appendix_a_numeric(r)
    assert a.total == pytest.approx(typical1d_cdf(r), abs=1e-10)
    assert a.int1 == pytest.approx(deconditioning_int1_closed(r), abs=1e-13)


def test_moments_are_one_third_and_five_36ths():
    mean = typical1d_moment(1)
    assert mean == pytest.approx(1.0 / 3.0, abs=1e-9)
    assert typical1d_moment(2) - mean**2 == pytest.approx(5.0 / 36.0, abs=1e-9)


def test_intensity_scaling():
    assert typical1d_cdf(0.25, 2.0) == pytest.approx(typical1d_cdf(0.5, 1.0), rel=1e-14)
    assert typical1d_moment(1, 4.0) == pytest.approx(1.0 / 12.0, abs=1e-9)


def test_mixture_by_direct_quadrature():
    # decondition the piecewise conditional CDF with adaptive quadrature
    r = 0.7

    def f(r1, r2):
        return cond_cdf_1d(r, OrderedGaps(r1, r2)) * joint_pdf_ordered(OrderedGaps(r1, r2), 1.0)

    val, _ = integrate.dblquad(f, 0, 25, 0, lambda r2: r2, epsabs=1e-11)
    assert val == pytest.approx(typical1d_cdf(r), abs=1e-7)
    assert math.isfinite(val)
