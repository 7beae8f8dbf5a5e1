"""Special-function kernels against independent oracles.

Oracles: the Maclaurin series of erf, adaptive quadrature of the 2F1
integral representation b*int_0^1 t^(b-1)/(1+y*t) dt, scipy's general
hyp2f1, and finite differences for the psi slope identity.
"""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.integrate import quad
from scipy.special import hyp2f1 as scipy_hyp2f1

from uavsgsim import (NonConvergence, delta_kernel, erf, gauss_2f1_neg,
                      hyp2f1_1b, omega1, omega2, psi)


def erf_maclaurin(x, tol=1e-14):
    # erf(x) = 2/sqrt(pi) * sum (-1)^k x^(2k+1) / (k! (2k+1))
    total, term, k = 0.0, x, 0
    while abs(term) / (2 * k + 1) > tol:
        total += term / (2 * k + 1)
        k += 1
        term *= -x * x / k
    return 2.0 / math.sqrt(math.pi) * total


def f1b_quad(b, y):
    val, _ = quad(lambda t: t ** (b - 1.0) / (1.0 + y * t), 0.0, 1.0,
                  epsabs=0.0, epsrel=1e-12, limit=400)
    return b * val


class TestErf:
    def test_zero(self):
        assert erf(0.0) == 0.0

    def test_saturation(self):
        assert erf(6.0) > 1.0 - 1e-15

    def test_series_value(self):
        assert_allclose(erf(1.0), erf_maclaurin(1.0), rtol=1e-13)
        assert_allclose(erf(1.0), 0.8427007929, atol=1e-10)

    def test_odd_increasing_bounded(self):
        xs = np.linspace(0.05, 6.0, 40)
        vals = erf(xs)
        assert np.all(np.diff(vals) > 0)
        assert np.all(np.abs(vals) < 1.0)
        assert_allclose(erf(-xs), -vals, rtol=0, atol=0)

    def test_quadrature_oracle(self):
        for x in np.linspace(0.1, 6.0, 13):
            ref, _ = quad(lambda t: 2.0 / math.sqrt(math.pi) * math.exp(-t * t),
                          0.0, x, epsabs=1e-14, epsrel=1e-13)
            assert abs(erf(x) - ref) <= 1e-10


class TestGauss2F1:
    def test_z_zero(self):
        assert gauss_2f1_neg(1.0, 0.5, 1.5, 0.0) == 1.0

    def test_arctan_identity(self):
        # 2F1(1, 1/2; 3/2; -z^2) = arctan(z)/z at z=1
        assert_allclose(gauss_2f1_neg(1.0, 0.5, 1.5, -1.0), math.pi / 4.0,
                        rtol=1e-12)

    def test_integral_oracle(self):
        assert_allclose(gauss_2f1_neg(1.0, 3.0 / 7.0, 10.0 / 7.0, -5.0),
                        f1b_quad(3.0 / 7.0, 5.0), rtol=1e-10)

    def test_general_parameters_vs_scipy(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            a = rng.uniform(0.2, 2.5)
            b = rng.uniform(0.2, 2.5)
            c = rng.uniform(max(a, b) + 0.1, 4.0)
            z = -rng.uniform(0.0, 8.0)
            assert_allclose(gauss_2f1_neg(a, b, c, z),
                            float(scipy_hyp2f1(a, b, c, z)), rtol=1e-9)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            gauss_2f1_neg(1.0, 0.5, 1.5, 0.5)
        with pytest.raises(ValueError):
            gauss_2f1_neg(1.0, 0.5, -2.0, -1.0)

    def test_pattern_matches_scipy_on_tensors(self):
        ys = np.logspace(-3, 3, 25)
        for b in (0.1, 1.0 - 2.0 / 3.5, 2.0 / 3.5, 0.9):
            assert_allclose(hyp2f1_1b(b, ys),
                            scipy_hyp2f1(1.0, b, b + 1.0, -ys), rtol=1e-10)


class TestOmegaKernels:
    def test_trivial(self):
        assert omega1(4.0, 0.0) == 1.0
        assert omega2(3.5, 0.0) == 1.0

    def test_pi_over_4(self):
        assert_allclose(omega1(4.0, 1.0), math.pi / 4.0, rtol=1e-10)
        assert_allclose(omega2(4.0, 1.0), math.pi / 4.0, rtol=1e-10)

    def test_integral_oracle_grid(self):
        ys = np.logspace(-3, 3, 31)
        for alpha in (2.5, 3.0, 3.5, 4.0, 4.5):
            for fn, b in ((omega1, 1.0 - 2.0 / alpha), (omega2, 2.0 / alpha)):
                vals = fn(alpha, ys)
                ref = np.array([f1b_quad(b, y) for y in ys])
                assert_allclose(vals, ref, rtol=1e-9)
                assert np.all(vals > 0.0) and np.all(vals <= 1.0)
                assert np.all(np.diff(vals) < 0.0)

    def test_domain(self):
        with pytest.raises(ValueError):
            omega1(2.0, 1.0)
        with pytest.raises(ValueError):
            omega2(3.5, -0.5)


class TestDeltaKernel:
    def test_linearity_and_zero(self):
        assert delta_kernel(3.5, 1.0, 0.0) == 0.0
        full = delta_kernel(3.5, 1.0, 1.0)
        assert_allclose(delta_kernel(3.5, 1.0, 0.25), 0.25 * full, rtol=1e-14)

    def test_alpha4_value(self):
        assert_allclose(delta_kernel(4.0, 1.0, 1.0), math.pi / 4.0, rtol=1e-10)

    def test_composed_oracle(self):
        ref = 2.0 * 0.585 * 1.0 * f1b_quad(1.0 - 2.0 / 3.5, 1.0) / 1.5
        assert_allclose(delta_kernel(3.5, 1.0, 0.585), ref, rtol=1e-9)


class TestPsi:
    def test_zero(self):
        assert psi(0.0, 1.0, 4.0) == 0.0

    def test_slope_identity(self):
        # d psi / dx = 2x / (1 + b x^z); at (1, 1, 4) that is exactly 1
        h = 1e-5
        fd = (psi(1.0 + h, 1.0, 4.0) - psi(1.0 - h, 1.0, 4.0)) / (2 * h)
        assert_allclose(fd, 1.0, rtol=1e-6)

    def test_slope_identity_grid(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            b = rng.uniform(0.1, 3.0)
            z = rng.uniform(2.1, 5.0)
            x = rng.uniform(0.2, 4.0)
            h = 1e-5 * max(x, 1.0)
            fd = (psi(x + h, b, z) - psi(x - h, b, z)) / (2 * h)
            assert_allclose(fd, 2.0 * x / (1.0 + b * x ** z), rtol=1e-6)

    def test_value_from_derivative_quadrature(self):
        ref, _ = quad(lambda x: 2.0 * x / (1.0 + 0.5 * x ** 3.5), 0.0, 2.0,
                      epsabs=1e-13, epsrel=1e-11)
        assert_allclose(psi(2.0, 0.5, 3.5), ref, rtol=1e-9)

    def test_monotone(self):
        rng = np.random.default_rng(11)
        xs = np.linspace(0.0, 5.0, 60)
        for _ in range(15):
            b = rng.uniform(0.05, 4.0)
            z = rng.uniform(2.05, 6.0)
            vals = psi(xs, b, z)
            assert np.all(np.diff(vals) >= 0.0)


def test_nonconvergence_budget():
    # Pfaff argument w -> 1 needs ~1e7 terms at z = -1e7; the budget trips.
    with pytest.raises(NonConvergence):
        gauss_2f1_neg(0.7, 1.3, 3.1, -1e7)
