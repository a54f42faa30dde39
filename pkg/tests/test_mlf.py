from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from conftest import ml_oracle
from fraccreep import mlf
from fraccreep.creep import monotonicity_probe
from fraccreep.errors import DomainError, SingularityError

# frozen mpmath values (50 digits, rounded to double)
E_HALF_ONE_M1 = 0.4275835761558070  # E_{1/2,1}(-1) = e erfc(1)
E_HALF_THREEHALF_M1 = 0.5724164238441930  # E_{1/2,3/2}(-1) = 1 - e erfc(1)
E_HALF_HALF_M1 = 0.13660600739194928
E_HALF_HALF_M2 = 0.053398230926744799
ERFC_1 = 0.1572992070502851


def quad_kernel_integral(alpha: float, lam: float, t: float) -> float:
    """Adaptive quadrature of the alpha-exponential over (0, t], split at t/2.

    On the singular half, u = s^alpha turns s^(alpha-1) ds into du/alpha and
    leaves the smooth integrand E_{alpha,alpha}(-lam u).
    """
    head, _ = integrate.quad(
        lambda u: mlf.mittag_leffler(-lam * u, alpha, alpha), 0.0, (t / 2) ** alpha, epsabs=1e-14, epsrel=1e-13
    )
    tail, _ = integrate.quad(lambda s: mlf.alpha_exponential(s, alpha, lam), t / 2, t, epsabs=1e-14, epsrel=1e-13)
    return head / alpha + tail


class TestArgs:
    def test_rejects_nonfinite(self):
        for bad in (math.nan, math.inf):
            with pytest.raises(DomainError, match="z"):
                mlf.MlArgs(0.5, 1.0, bad)

    def test_rejects_bad_alpha_and_tol(self):
        with pytest.raises(DomainError, match="alpha"):
            mlf.MlArgs(0.0, 1.0, 1.0)
        with pytest.raises(DomainError, match="tol"):
            mlf.MlArgs(0.5, 1.0, 1.0, tol=0.0)

    def test_guaranteed_domain(self):
        assert mlf.MlArgs(0.5, 0.5, -3).in_guaranteed_domain
        assert not mlf.MlArgs(0.5, 0.2, -3).in_guaranteed_domain
        assert not mlf.MlArgs(1.5, 2.0, -3).in_guaranteed_domain

    def test_outside_domain_flagged(self):
        res = mlf.evaluate(mlf.MlArgs(1.5, 1.0, -1.0))
        assert res.method == "series" and not res.guaranteed
        assert res.value == pytest.approx(ml_oracle(-1.0, 1.5, 1.0), abs=1e-12)

    def test_kernel_args(self):
        with pytest.raises(DomainError):
            mlf.KernelArgs(0.5, -1.0, 1.0)
        with pytest.raises(DomainError):
            mlf.KernelArgs(0.5, 1.0, -1.0)
        with pytest.raises(DomainError):
            mlf.KernelArgs(1.2, 1.0, 1.0)


class TestMittagLeffler:
    def test_zero_argument(self):
        assert mlf.mittag_leffler(0.0, 0.7, 1.3) == pytest.approx(1 / math.gamma(1.3), abs=1e-15)

    def test_exponential(self):
        assert mlf.mittag_leffler(-1.0, 1.0, 1.0) == pytest.approx(math.exp(-1), abs=1e-12)

    def test_half_order_values(self):
        assert mlf.mittag_leffler(-1.0, 0.5) == pytest.approx(E_HALF_ONE_M1, abs=1e-13)
        assert mlf.mittag_leffler(-1.0, 0.5, 1.5) == pytest.approx(E_HALF_THREEHALF_M1, abs=1e-13)
        assert mlf.mittag_leffler(-1.0, 0.5, 0.5) == pytest.approx(E_HALF_HALF_M1, abs=1e-13)

    def test_half_half_bound(self):
        v = mlf.mittag_leffler(-2.0, 0.5, 0.5)
        assert v == pytest.approx(E_HALF_HALF_M2, abs=1e-13)
        assert 0 <= v <= 1 / math.gamma(0.5)

    def test_erfc_identity(self):
        x = np.linspace(0.0, 6.0, 61)
        expected = np.exp(x**2) * special.erfc(x)
        assert np.max(np.abs(mlf.mittag_leffler(-x, 0.5) - expected)) < 1e-8

    def test_cosh_identity(self):
        z = np.linspace(0.1, 9.0, 40)
        assert np.max(np.abs(mlf.mittag_leffler(z, 2.0) - np.cosh(np.sqrt(z)))) < 1e-9

    def test_array_matches_scalar(self):
        z = np.array([-0.5, -3.0, -12.0, -80.0, -1e4])
        arr = mlf.mittag_leffler(z, 0.6, 1.1)
        assert arr.shape == z.shape
        for zi, ai in zip(z, arr):
            assert ai == mlf.mittag_leffler(float(zi), 0.6, 1.1)

    @pytest.mark.parametrize(
        "alpha,beta,z",
        [(0.5, 1.0, -25.0), (0.3, 0.3, -4.0), (0.9, 1.9, -60.0), (0.7, 0.7, -8.0), (1.0, 2.0, -30.0)],
    )
    def test_against_oracle(self, alpha, beta, z):
        res = mlf.evaluate(mlf.MlArgs(alpha, beta, z))
        exact = ml_oracle(z, alpha, beta)
        assert res.guaranteed
        assert abs(res.value - exact) <= max(res.error_bound, 1e-15)
        assert abs(res.value - exact) < 1e-10

    @settings(max_examples=60, deadline=None)
    @given(
        alpha=st.floats(0.25, 1.0),
        dbeta=st.floats(0.0, 1.5),
        frac=st.floats(0.0, 1.0),
    )
    def test_random_against_oracle(self, alpha, dbeta, frac):
        beta = alpha + dbeta
        x = frac * min(40.0, 400.0**alpha)  # keeps the oracle's term count sane
        res = mlf.evaluate(mlf.MlArgs(alpha, beta, -x))
        assert res.guaranteed
        assert abs(res.value - ml_oracle(-x, alpha, beta)) < 1e-10

    def test_asymptotic_near_poles(self):
        # beta - k rounds onto the poles of 1/Gamma for large k; 2.6063e-16 from mpmath
        res = mlf.evaluate(mlf.MlArgs(1.0, 1.00000000000001, -40.0))
        assert abs(res.value - 2.606318965114776e-16) <= res.error_bound + 1e-18

    def test_far_asymptotic_regime(self):
        res = mlf.evaluate(mlf.MlArgs(0.5, 1.0, -1e6))
        assert res.method == "asymptotic" and res.guaranteed
        # e^{x^2} erfc(x) ~ 1/(x sqrt(pi)) (1 - 1/(2x^2))
        x = 1e6
        assert res.value == pytest.approx(1 / (x * math.sqrt(math.pi)) * (1 - 0.5 / x**2), rel=1e-10)

    @pytest.mark.parametrize("alpha,beta", [(0.5, 1.0), (0.3, 0.8), (0.8, 0.8), (0.95, 1.5)])
    def test_regime_consistency_at_crossovers(self, alpha, beta):
        tol = mlf.DEFAULT_TOL
        x_series, x_asym = mlf.crossover_points(alpha, beta, tol)
        assert 0 < x_series < x_asym
        for x in (x_series, x_asym):
            series = mlf._series(alpha, beta, -x, tol)[0]
            contour = float(mlf._contour(alpha, beta, np.array([-x]))[0][0])
            asym = mlf._asymptotic(alpha, beta, x)[0]
            if x == x_series:
                assert abs(series - contour) <= 2 * tol
            else:
                assert abs(asym - contour) <= 2 * tol

    def test_negative_axis_bound_and_monotone(self):
        t = np.geomspace(1e-3, 50.0, 120)
        for alpha in (0.3, 0.6, 1.0):
            for beta in (alpha, 1.0, 1.7):
                if beta < alpha:
                    continue
                f = mlf.mittag_leffler(-t, alpha, beta)
                assert np.all(f >= 0)
                assert np.all(f <= 1 / math.gamma(beta) + 1e-10)
                rep = monotonicity_probe(f, t, pattern="completely_monotone", tol=10 * mlf.DEFAULT_TOL)
                assert rep.all_passed, (alpha, beta, rep)


class TestKernel:
    def test_alpha_one_is_exponential(self):
        assert mlf.alpha_exponential(0.5, 1.0, 2.0) == pytest.approx(math.exp(-1), abs=1e-15)

    def test_half_order(self):
        assert mlf.alpha_exponential(1.0, 0.5, 1.0) == pytest.approx(E_HALF_HALF_M1, abs=1e-13)

    def test_singular_at_zero(self):
        with pytest.raises(SingularityError):
            mlf.alpha_exponential(0.0, 0.5, 1.0)
        with pytest.raises(DomainError):
            mlf.alpha_exponential(-0.1, 0.5, 1.0)
        t = 1e-10
        assert mlf.alpha_exponential(t, 0.5, 1.0) * math.sqrt(t) == pytest.approx(1 / math.gamma(0.5), rel=1e-4)

    def test_positive(self):
        t = np.geomspace(1e-4, 100, 50)
        assert np.all(mlf.alpha_exponential(t, 0.4, 3.0) > 0)

    def test_integral_values(self):
        assert mlf.kernel_integral(0.0, 0.5, 1.0) == 0.0
        assert mlf.kernel_integral(1.0, 1.0, 1.0) == pytest.approx(1 - math.exp(-1), abs=1e-12)
        assert mlf.kernel_integral(1.0, 0.5, 1.0) == pytest.approx(E_HALF_THREEHALF_M1, abs=1e-13)

    @pytest.mark.parametrize("alpha,lam,t", [(0.5, 1.0, 1.0), (0.3, 2.0, 0.5), (0.9, 0.5, 2.0)])
    def test_integral_matches_quadrature(self, alpha, lam, t):
        assert mlf.kernel_integral(t, alpha, lam) == pytest.approx(quad_kernel_integral(alpha, lam, t), abs=1e-9)

    def test_quadrature_oracle_itself(self):
        assert quad_kernel_integral(0.5, 1.0, 1.0) == pytest.approx(E_HALF_THREEHALF_M1, abs=1e-11)

    def test_integral_monotone_and_bounded(self):
        t = np.linspace(0, 10, 400)
        for alpha in (0.2, 0.5, 1.0):
            k = mlf.kernel_integral(t, alpha, 1.5)
            assert np.all(np.diff(k) >= -1e-12)
            assert np.all(k <= t**alpha / math.gamma(alpha + 1) + 1e-12)


class TestErfc:
    def test_values(self):
        assert mlf.erfc_reference(0.0) == 1.0
        assert mlf.erfc_reference(1.0) == pytest.approx(ERFC_1, abs=1e-15)
        assert mlf.erfc_reference(40.0) == 0.0 or mlf.erfc_reference(40.0) < 1e-300
        assert mlf.erfc_reference(math.inf) == 0.0

    def test_against_library(self):
        for x in np.linspace(-6, 12, 181):
            assert abs(mlf.erfc_reference(float(x)) - math.erfc(float(x))) < 1e-13

    def test_rejects_nan(self):
        with pytest.raises(DomainError):
            mlf.erfc_reference(math.nan)
