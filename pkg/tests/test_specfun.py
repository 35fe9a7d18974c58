import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spp_sim.errors import NegativeArgumentError, NonPositiveArgumentError
from spp_sim.specfun import (bessel_j0, bessel_j1, bessel_y0, bessel_y1,
                             erfcx, erfcx_result, hankel_h0_2,
                             hankel_h0_2_result, hankel_tilde)

mp.mp.dps = 40


def erfcx_quad(x):
    """(2/sqrt(pi)) int_0^inf exp(-t^2 - 2 x t) dt at 40 digits."""
    x = mp.mpf(x)
    val = mp.quad(lambda t: mp.exp(-t * t - 2 * x * t), [0, 1 / (1 + x), mp.inf])
    return float(2 / mp.sqrt(mp.pi) * val)


ERFCX_POINTS = np.concatenate([[0.0, 1e-6, 0.0625, 0.5, 3.99, 4.0, 4.01],
                               np.linspace(0.0, 50.0, 41)[1:]])


@pytest.mark.parametrize("x", ERFCX_POINTS)
def test_erfcx_against_quadrature(x):
    ref = erfcx_quad(x)
    assert abs(erfcx(x) - ref) <= 1e-12 * ref


def test_erfcx_zero_and_large_argument():
    assert erfcx(0.0) == 1.0
    x = 100.0
    assert erfcx(x) == pytest.approx(1 / (x * math.sqrt(math.pi)) * (1 - 1 / (2 * x * x)),
                                     rel=1e-8)
    assert erfcx(1e10) * 1e10 * math.sqrt(math.pi) == pytest.approx(1.0, rel=1e-15)


def test_erfcx_array_and_methods():
    xs = np.array([0.5, 5.0])
    np.testing.assert_allclose(erfcx(xs), [erfcx(0.5), erfcx(5.0)], rtol=0)
    assert erfcx_result(1.0).method == "series"
    assert erfcx_result(10.0).method == "continued-fraction"
    assert erfcx_result(10.0).est_error < 1e-15


def test_erfcx_negative_rejected():
    with pytest.raises(NegativeArgumentError):
        erfcx(-0.1)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.0, 1e4), st.floats(1e-6, 10.0))
def test_erfcx_decreasing(x, dx):
    assert erfcx(x + dx) < erfcx(x)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.0, 200.0))
def test_erfcx_bounds(x):
    # 1/(x + sqrt(x^2 + 2)) < sqrt(pi)/2 erfcx(x) <= 1/(x + sqrt(x^2 + 4/pi))
    v = 0.5 * math.sqrt(math.pi) * erfcx(x)
    assert 1 / (x + math.sqrt(x * x + 2)) < v * (1 + 1e-14)
    assert v <= 1 / (x + math.sqrt(x * x + 4 / math.pi)) * (1 + 1e-14)


@pytest.mark.parametrize("x", [0.5, 5.0, 50.0])
def test_wronskian(x):
    w = bessel_j1(x) * bessel_y0(x) - bessel_j0(x) * bessel_y1(x)
    assert abs(w - 2 / (math.pi * x)) <= 1e-10 * 2 / (math.pi * x)


@pytest.mark.parametrize("x", [0.3, 2.0, 7.9, 8.0, 11.0, 30.0, 150.0])
def test_bessel_against_mpmath(x):
    for ours, ref in ((bessel_j0, mp.besselj(0, x)), (bessel_y0, mp.bessely(0, x)),
                      (bessel_j1, mp.besselj(1, x)), (bessel_y1, mp.bessely(1, x))):
        assert abs(ours(x) - float(ref)) <= 1e-12


def test_branch_overlap():
    xs = np.linspace(8.0, 12.0, 33)
    for x in xs:
        s = hankel_h0_2_result(x, "series").value
        a = hankel_h0_2_result(x, "asymptotic").value
        assert abs(s - a) <= 1e-9 * abs(a)


def test_hankel_branches_and_tilde():
    assert hankel_h0_2_result(2.0).method == "series"
    assert hankel_h0_2_result(20.0).method == "asymptotic"
    xs = np.array([0.1, 3.0, 9.0, 40.0])
    np.testing.assert_allclose(hankel_tilde(xs), hankel_h0_2(xs) * np.exp(1j * xs), rtol=1e-14)


def test_hankel_limits():
    # large x: |H0~| -> sqrt(2/(pi x)); small x: Y0 ~ (2/pi)(ln(x/2) + gamma_E)
    x = 1e6
    assert abs(hankel_tilde(x)) == pytest.approx(math.sqrt(2 / (math.pi * x)), rel=1e-6)
    x = 1e-6
    y0_small = 2 / math.pi * (math.log(x / 2) + 0.5772156649015329)
    assert -hankel_h0_2(x).imag / y0_small == pytest.approx(1.0, rel=1e-10)


def test_hankel_rejects_nonpositive():
    with pytest.raises(NonPositiveArgumentError):
        hankel_h0_2(0.0)
    with pytest.raises(NonPositiveArgumentError):
        bessel_j0(-1.0)
