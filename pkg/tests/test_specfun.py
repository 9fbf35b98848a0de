import math

import mpmath
import numpy as np
import pytest
from scipy import integrate, special

from qtraj import specfun

mpmath.mp.dps = 30


def test_airy_at_origin_against_series():
    ai, bi, aip, bip = specfun.airy_pair(0.0)
    c1 = 1 / (3 ** (2 / 3) * math.gamma(2 / 3))
    c2 = 1 / (3 ** (1 / 3) * math.gamma(1 / 3))
    assert ai == pytest.approx(c1, rel=1e-14)
    assert bi == pytest.approx(math.sqrt(3) * c1, rel=1e-14)
    assert aip == pytest.approx(-c2, rel=1e-14)
    assert bip == pytest.approx(math.sqrt(3) * c2, rel=1e-14)
    assert (ai, bi, aip, bip) == pytest.approx(
        (0.355028054, 0.614926627, -0.258819404, 0.448288357), abs=1e-9)


def test_airy_at_five_against_quadrature():
    # Ai(y) = exp(-zeta)/pi int_0^inf exp(-sqrt(y) t^2) cos(t^3/3) dt for y > 0
    y = 5.0
    zeta = 2.0 / 3.0 * y**1.5
    integral, _ = integrate.quad(lambda t: math.exp(-math.sqrt(y) * t * t) * math.cos(t**3 / 3),
                                 0, np.inf, epsabs=0, epsrel=1e-13, limit=200)
    ref = math.exp(-zeta) / math.pi * integral
    assert specfun.airy_pair(y)[0] == pytest.approx(ref, rel=1e-11)
    assert specfun.airy_pair(y)[0] == pytest.approx(1.0834e-4, rel=1e-4)


@pytest.mark.parametrize("y", np.linspace(-40.0, 12.0, 87))
def test_airy_against_mpmath(y):
    ai, bi, aip, bip = specfun.airy_pair(y)
    refs = [mpmath.airyai(y), mpmath.airybi(y), mpmath.airyai(y, 1), mpmath.airybi(y, 1)]
    scale = float(abs(mpmath.airyai(y)) + abs(mpmath.airybi(y)))
    dscale = float(abs(mpmath.airyai(y, 1)) + abs(mpmath.airybi(y, 1)))
    for got, ref, sc in zip((ai, bi, aip, bip), refs, (scale, scale, dscale, dscale)):
        ref = float(ref)
        # relative where the value is not near a zero, otherwise relative to the envelope
        assert abs(got - ref) <= 1e-10 * max(abs(ref), 1e-3 * sc)


def test_airy_matches_scipy_on_dense_grid():
    y = np.linspace(-39.9, 11.9, 2001)
    ai, bi, aip, bip = specfun.airy_pair(y)
    sa, sap, sb, sbp = special.airy(y)
    env = np.abs(sa) + np.abs(sb)
    denv = np.abs(sap) + np.abs(sbp)
    assert np.max(np.abs(ai - sa) / env) < 1e-11
    assert np.max(np.abs(bi - sb) / env) < 1e-11
    assert np.max(np.abs(aip - sap) / denv) < 1e-11
    assert np.max(np.abs(bip - sbp) / denv) < 1e-11


def test_airy_wronskian():
    y = np.linspace(-40, 12, 501)
    ai, bi, aip, bip = specfun.airy_pair(y)
    w = ai * bip - aip * bi
    assert np.max(np.abs(w * math.pi - 1)) < 1e-10


def test_airy_scaled_consistent():
    y = np.array([-3.0, 0.5, 4.0, 11.0])
    ai, bi, aip, bip = specfun.airy_pair(y)
    sai, sbi, saip, sbip, z = specfun.airy_pair_scaled(y)
    np.testing.assert_allclose(sai * np.exp(-z), ai, rtol=1e-14)
    np.testing.assert_allclose(sbi * np.exp(z), bi, rtol=1e-14)


@pytest.mark.parametrize("y", [-40.5, 12.5, math.nan, math.inf])
def test_airy_domain(y):
    with pytest.raises(specfun.SpecialFunctionDomainError):
        specfun.airy_pair(y)


def test_dawson_examples():
    assert specfun.dawson(0.0) == 0.0
    assert specfun.dawson(0.92414) == pytest.approx(0.54104, abs=5e-6)
    u = 10.0
    series = 1 / (2 * u) + 1 / (4 * u**3) + 3 / (8 * u**5) + 15 / (16 * u**7)
    assert specfun.dawson(u) == pytest.approx(series, rel=1e-7)  # next term 105/(32 u^9)
    assert specfun.dawson(10.0) == pytest.approx(0.0502539, abs=1e-7)


def test_dawson_maximum_location():
    u = np.linspace(0.9, 0.95, 50001)
    f = specfun.dawson(u)
    assert u[np.argmax(f)] == pytest.approx(0.92414, abs=1e-5)


@pytest.mark.parametrize("u", [1e-8, 0.3, 0.999, 1.0, 1.7, 3.3, 6.0, 11.9, 12.1, 30.0, 1e3, 1e8])
def test_dawson_against_mpmath(u):
    ref = float(mpmath.sqrt(mpmath.pi) / 2 * mpmath.exp(-u * u) * mpmath.erfi(u))
    assert specfun.dawson(u) == pytest.approx(ref, rel=1e-12)
    assert specfun.dawson(-u) == pytest.approx(-ref, rel=1e-12)


def test_dawson_against_scipy_grid():
    u = np.linspace(-50, 50, 20001)
    np.testing.assert_allclose(specfun.dawson(u), special.dawsn(u), rtol=1e-12, atol=1e-300)


def test_dawson_derivative():
    u = np.linspace(-20, 20, 801)
    f = specfun.dawson(u)
    np.testing.assert_allclose(specfun.dawson_derivative(u), 1 - 2 * u * f, rtol=1e-9,
                               atol=1e-12)


def test_growing_gaussian_integral_examples():
    assert specfun.growing_gaussian_integral(0.0, 0.5) == 0.0
    ref, _ = integrate.quad(lambda q: math.exp(q * q), 0, 1, epsabs=0, epsrel=1e-13)
    assert specfun.growing_gaussian_integral(1.0, 0.5) == pytest.approx(ref, rel=1e-12)
    assert ref == pytest.approx(1.46265174, rel=1e-8)


def test_growing_gaussian_integral_identity_and_parity():
    alpha, x = 1.0, 2.0
    mant, expo = specfun.growing_gaussian_integral_scaled(x, alpha)
    direct = math.exp(2 * alpha * x * x) * specfun.dawson(math.sqrt(2 * alpha) * x) / math.sqrt(2 * alpha)
    assert mant * math.exp(expo) == pytest.approx(direct, rel=1e-12)
    assert specfun.growing_gaussian_integral(-x, alpha) == -specfun.growing_gaussian_integral(x, alpha)
    ref = float(mpmath.quad(lambda q: mpmath.exp(2 * alpha * q * q), [0, x]))
    assert specfun.growing_gaussian_integral(x, alpha) == pytest.approx(ref, rel=1e-12)


def test_growing_gaussian_integral_overflow():
    with pytest.raises(OverflowError):
        specfun.growing_gaussian_integral(100.0, 1.0)
    with pytest.raises(ValueError):
        specfun.growing_gaussian_integral(1.0, -1.0)
