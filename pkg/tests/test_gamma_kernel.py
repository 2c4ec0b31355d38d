import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fockbound import gamma_kernel as gk
from fockbound.gamma_kernel import (
    gamma_tails,
    interval_mass,
    kernel,
    log_factorial,
    log_reg_lower_gamma,
    reg_lower_gamma,
)

# frozen from 40-digit mpmath quadrature / closed forms
LN_10_FACTORIAL = 15.104412573075515
P_2_1 = 0.26424111765711535  # 1 - 2/e
P_51_50 = 0.46248330914685246
MASS_3_2_4 = 0.42365334013183812


def poisson_survival(k, x):
    term, total = 1.0, 1.0
    for j in range(1, k + 1):
        term *= x / j
        total += term
    return 1.0 - math.exp(-x) * total


class TestLogFactorial:
    def test_small(self):
        assert log_factorial(0) == 0.0
        assert log_factorial(1) == 0.0

    def test_ten(self):
        assert log_factorial(10) == pytest.approx(LN_10_FACTORIAL, rel=1e-15)

    @pytest.mark.parametrize("n", [21, 50, 171, 1000, 10**6])
    def test_against_mpmath(self, n):
        ref = float(mpmath.loggamma(n + 1))
        assert log_factorial(n) == pytest.approx(ref, rel=1e-14)

    @pytest.mark.parametrize("bad", [-1, 2.5])
    def test_rejects(self, bad):
        with pytest.raises(ValueError):
            log_factorial(bad)


class TestKernel:
    def test_corners(self):
        assert kernel(0, 0.0) == 1.0
        assert kernel(3, 0.0) == 0.0
        assert kernel(1, 1.0) == pytest.approx(math.exp(-1.0), rel=1e-15)

    def test_peak_at_order(self):
        grid = np.arange(0.0, 20.0, 1e-3)
        vals = [kernel(5, s) for s in grid]
        assert abs(grid[int(np.argmax(vals))] - 5.0) <= 1e-3

    def test_negative_argument(self):
        with pytest.raises(ValueError):
            kernel(2, -0.1)

    @pytest.mark.parametrize("n", [1, 7, 100, 10**4, 10**6])
    @pytest.mark.parametrize("factor", [0.5, 0.95, 1.0, 1.05, 2.0])
    def test_against_mpmath(self, n, factor):
        s = factor * n
        ref = mpmath.exp(n * mpmath.log(s) - s - mpmath.loggamma(n + 1))
        if ref < 1e-300:
            assert kernel(n, s) < 1e-290
        else:
            assert kernel(n, s) == pytest.approx(float(ref), rel=1e-12)

    def test_no_overflow_large_order(self):
        for s in (1.0, 1e3, 1e6, 1e7):
            v = kernel(10**6, s)
            assert 0.0 <= v <= 1.0

    @pytest.mark.parametrize("n", [0, 1, 2, 10, 57, 100])
    def test_unimodal(self, n):
        grid = np.linspace(0.0, 3 * n + 20, 2001)
        vals = np.array([kernel(n, s) for s in grid])
        left = vals[grid <= n]
        right = vals[grid >= n]
        assert np.all(np.diff(left) >= 0)
        assert np.all(np.diff(right) <= 0)
        assert vals.max() <= kernel(n, n) <= 1.0

    def test_array_matches_scalar(self):
        s = np.array([0.0, 0.3, 5.0, 99.5, 100.0, 250.0])
        for n in (0, 1, 15, 16, 100):
            arr = gk.kernel_array(n, s)
            scal = [kernel(n, x) for x in s]
            np.testing.assert_allclose(arr, scal, rtol=1e-14, atol=0)


class TestRegLowerGamma:
    def test_examples(self):
        assert reg_lower_gamma(0, math.log(2.0)) == pytest.approx(0.5, abs=1e-16)
        assert reg_lower_gamma(1, 1.0) == pytest.approx(P_2_1, abs=1e-15)
        v = reg_lower_gamma(50, 50.0)
        assert 0.4 < v < 0.6
        assert v == pytest.approx(P_51_50, abs=1e-13)

    def test_median_drifts_to_half(self):
        vals = [reg_lower_gamma(n, float(n)) for n in (10, 100, 1000, 10000)]
        assert all(abs(b - 0.5) < abs(a - 0.5) for a, b in zip(vals, vals[1:]))
        assert abs(vals[-1] - 0.5) < 0.003

    def test_domain(self):
        with pytest.raises(ValueError):
            reg_lower_gamma(3, -1.0)
        assert reg_lower_gamma(3, 0.0) == 0.0
        assert reg_lower_gamma(3, math.inf) == 1.0

    @pytest.mark.parametrize("n", [0, 1, 5, 20, 64, 65, 200, 1000, 10**4])
    def test_against_mpmath(self, n):
        for x in (0.01, 1.0, 0.5 * n, n - 1.0, float(n), n + 1.0, n + 5 * math.sqrt(n + 1), 2.0 * n + 10):
            if x < 0:
                continue
            if x > n + 1:
                ref = 1 - mpmath.gammainc(n + 1, x, mpmath.inf, regularized=True)
            else:
                ref = mpmath.gammainc(n + 1, 0, x, regularized=True)
            p, q = gamma_tails(n, x)
            assert abs(p - float(ref)) <= 1e-13
            if float(ref) > 1e-300:
                assert p == pytest.approx(float(ref), rel=1e-11)
            refq = 1 - ref
            if float(refq) > 1e-300:
                assert q == pytest.approx(float(refq), rel=1e-11)

    def test_identity_sweep(self):
        worst = 0.0
        for n in range(0, 201, 7):
            for x in (0.0, 0.3, 1.0, 7.5, 30.0, 120.0, 500.0):
                worst = max(worst, abs(reg_lower_gamma(n, x) - poisson_survival(n, x)))
        assert worst <= 1e-12

    @given(st.integers(0, 300), st.floats(1e-3, 400))
    @settings(max_examples=200, deadline=None)
    def test_tails_sum_to_one(self, n, x):
        p, q = gamma_tails(n, x)
        assert 0.0 <= p <= 1.0 and 0.0 <= q <= 1.0
        assert abs(p + q - 1.0) <= 1e-14

    @given(st.integers(0, 300), st.floats(1e-3, 300), st.floats(0.0, 50))
    @settings(max_examples=200, deadline=None)
    def test_monotone_in_x(self, n, x, dx):
        assert reg_lower_gamma(n, x + dx) >= reg_lower_gamma(n, x)

    @pytest.mark.parametrize("x", [0.2, 1.0, 5.0, 20.0, 80.0])
    def test_strictly_decreasing_in_order(self, x):
        logs = [log_reg_lower_gamma(n, x) for n in range(600)]
        assert all(b < a for a, b in zip(logs, logs[1:]))

    def test_log_domain_below_underflow(self):
        lp = log_reg_lower_gamma(10**5, 4 * math.pi)
        assert math.isfinite(lp) and lp < -700
        ref = mpmath.log(mpmath.gammainc(10**5 + 1, 0, 4 * mpmath.pi, regularized=True))
        assert lp == pytest.approx(float(ref), rel=1e-12)

    def test_orders_match_scalar(self):
        for x in (0.0, 0.7, 3.0, 12.566, 40.0, 150.0):
            p, q = gk.gamma_tails_orders(x, 250)
            for n in (0, 1, 10, 64, 65, 100, 250):
                ps, qs = gamma_tails(n, x)
                assert p[n] == pytest.approx(ps, rel=1e-12, abs=1e-300)
                assert q[n] == pytest.approx(qs, rel=1e-12, abs=1e-300)


class TestIntervalMass:
    def test_examples(self):
        for L in (0.1, 1.0, 7.0, 30.0):
            assert interval_mass(0, 0.0, L).mass == pytest.approx(-math.expm1(-L), abs=1e-15)
        assert interval_mass(4, 2.5, 2.5).mass == 0.0
        assert interval_mass(3, 2.0, 4.0).mass == pytest.approx(MASS_3_2_4, abs=1e-12)

    def test_errors(self):
        with pytest.raises(ValueError):
            interval_mass(1, 3.0, 2.0)
        with pytest.raises(ValueError):
            interval_mass(1, -1.0, 2.0)

    def test_survival_path_far_tail(self):
        # both endpoints deep in the upper half: lower-tail differences would round to 0
        m = interval_mass(5, 60.0, 70.0).mass
        ref = mpmath.quad(lambda s: s**5 * mpmath.exp(-s) / 120, [60, 70])
        assert m == pytest.approx(float(ref), rel=1e-10)

    @given(st.integers(0, 150), st.floats(0, 200), st.floats(0, 50), st.floats(0, 50))
    @settings(max_examples=300, deadline=None)
    def test_additive(self, n, a, d1, d2):
        b, c = a + d1, a + d1 + d2
        total = interval_mass(n, a, c).mass
        parts = interval_mass(n, a, b).mass + interval_mass(n, b, c).mass
        assert abs(total - parts) <= 1e-12

    @pytest.mark.parametrize("n,a,b", [(0, 0.5, 2.0), (3, 2.0, 4.0), (10, 0.0, 9.0), (40, 35.0, 52.0), (200, 190.0, 230.0)])
    def test_against_quadrature(self, n, a, b):
        ref = mpmath.quad(lambda s: mpmath.exp(n * mpmath.log(s) - s - mpmath.loggamma(n + 1)) if s > 0 else (1 if n == 0 else 0),
                          mpmath.linspace(a, b, 9))
        assert interval_mass(n, a, b).mass == pytest.approx(float(ref), abs=1e-12)


def test_truncation_order_is_least():
    for x, tol in ((1.0, 1e-12), (100.0, 1e-12), (4 * math.pi, 1e-9), (0.0, 1e-12)):
        n_star = gk.truncation_order(x, tol)
        assert reg_lower_gamma(n_star, x) <= tol
        if n_star > 0:
            assert reg_lower_gamma(n_star - 1, x) > tol
