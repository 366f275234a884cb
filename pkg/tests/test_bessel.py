import threading
from fractions import Fraction
from math import comb, factorial

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from ballmag.bessel import (
    ReverseBesselTable, antiderivative_identity_check, chi, delta_apply, psi_eval,
    superfactorial, tau_at_zero, tau_coefficient, tau_eval, tau_taylor, three_term_check,
)
from ballmag.errors import ArgumentTooLarge, NonPositiveArgument
from ballmag.exactalg import IntPoly, LaurentPoly


def P(*c):
    return IntPoly(tuple(c))


def bessel_y_oracle(i: int) -> IntPoly:
    """R^i y_{i-1}(1/R) from the explicit Bessel polynomial coefficients."""
    if i == 0:
        return P(1)
    n = i - 1
    coeffs = [0] * (i + 1)
    for k in range(n + 1):
        # y_n(x) = sum_k (n+k)! / ((n-k)! k! 2^k) x^k; x^k -> R^(i-k)
        coeffs[i - k] = factorial(n + k) // (factorial(n - k) * factorial(k) * 2 ** k)
    return IntPoly(tuple(coeffs))


class TestChi:
    def test_listing(self):
        assert chi(0) == P(1)
        assert chi(1) == P(0, 1)
        assert chi(2) == P(0, 1, 1)
        assert chi(3) == P(0, 3, 3, 1)
        assert chi(4) == P(0, 15, 15, 6, 1)
        assert chi(5) == P(0, 105, 105, 45, 10, 1)

    @pytest.mark.parametrize("i", range(0, 21))
    def test_matches_bessel_polynomial_oracle(self, i):
        assert chi(i) == bessel_y_oracle(i)

    def test_shape_up_to_40(self):
        for i in range(41):
            c = chi(i)
            assert c.degree == i and c.lc == 1
            if i >= 1:
                assert c.coeff(0) == 0
                assert all(v > 0 for v in c.coeffs[1:])

    def test_recursion(self):
        for i in range(30):
            assert chi(i + 2) == chi(i).shift(2) + chi(i + 1) * (2 * i + 1)

    def test_negative_index(self):
        with pytest.raises(ValueError):
            chi(-1)

    def test_concurrent_growth(self):
        table = ReverseBesselTable()
        seen = []

        def grab(i):
            seen.append((i, table.get(i)))

        threads = [threading.Thread(target=grab, args=(i,)) for i in range(60, 0, -3)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        for i, poly in seen:
            assert poly == chi(i)


class TestSuperfactorial:
    def test_values(self):
        assert superfactorial(0) == 1
        assert superfactorial(3) == 12
        assert superfactorial(5) == 34560

    @given(st.integers(0, 30))
    def test_product_oracle(self, k):
        prod = 1
        for i in range(k + 1):
            prod *= factorial(i)
        assert superfactorial(k) == prod


class TestDelta:
    def test_constant(self):
        # e^R R^4 d/dR (e^-R R^-4) = -1 - 4/R
        assert delta_apply(LaurentPoly(0, (1,)), 2) == LaurentPoly(-1, (-4, -1))

    def test_chi1(self):
        assert delta_apply(chi(1), 1) == LaurentPoly(0, (-1, -1))

    def test_zero_applications(self):
        assert delta_apply(chi(0), 3, j=0) == LaurentPoly(0, (1,))

    def test_worked_matrix_entries(self):
        assert delta_apply(chi(2), 2) == LaurentPoly(0, (-3, -3, -1))
        assert delta_apply(chi(2), 2, 2) == LaurentPoly(-1, (12, 12, 5, 1))

    @pytest.mark.parametrize("p", range(1, 6))
    def test_shifted_chi_rule(self, p):
        # delta(R^k chi_m) = -R^{k+1} chi_{m-1} - (2p-k-1) R^{k-1} chi_m
        for k in range(-3, 4):
            for m in range(1, 9):
                f = LaurentPoly.from_poly(chi(m)).shift(k)
                expect = (LaurentPoly.from_poly(chi(m - 1)).shift(k + 1) * -1
                          - LaurentPoly.from_poly(chi(m)).shift(k - 1) * (2 * p - k - 1))
                assert delta_apply(f, p) == expect

    @settings(max_examples=50)
    @given(st.integers(1, 4), st.integers(0, 3), st.integers(0, 8))
    def test_conjugation_matches_numeric_derivative(self, p, j, m):
        # delta^j f = e^R R^{2p} (d/dR)^j (e^-R R^-2p f), checked with mpmath.diff
        f = chi(m)
        g = delta_apply(f, p, j)
        with mpmath.workdps(40):
            x = mpmath.mpf(3) / 2
            h = lambda r: mpmath.exp(-r) * r ** (-2 * p) * f(r)
            ref = mpmath.exp(x) * x ** (2 * p) * mpmath.diff(h, x, j)
            assert abs(g(x) - ref) <= mpmath.mpf(10) ** -25 * max(1, abs(ref))


class TestTau:
    def test_cosh_series(self):
        t = tau_taylor(0, 6)
        assert t.coeffs == tuple(Fraction(1, factorial(2 * k)) for k in range(6))

    def test_coefficients(self):
        assert tau_taylor(2, 1).coeffs[0] == Fraction(1, 3)
        assert tau_coefficient(1, 1) == Fraction(-1, 6)

    def test_minus_sinh_over_s_series(self):
        # -sinh(s)/s = -sum s^{2k} / (2k+1)!
        for k in range(10):
            assert tau_coefficient(1, k) == Fraction(-1, factorial(2 * k + 1))

    def test_at_zero(self):
        for i in range(8):
            odd = 1
            for m in range(1, 2 * i, 2):
                odd *= m
            assert tau_at_zero(i) == Fraction((-1) ** i, odd)
        assert tau_at_zero(3) == Fraction(-1, 15)

    def test_eval_values(self):
        mpmath.mp.dps = 40
        assert tau_eval(0, 0) == 1
        assert abs(tau_eval(1, 1) + mpmath.sinh(1)) < mpmath.mpf(10) ** -38
        assert abs(tau_eval(3, 0) + mpmath.mpf(1) / 15) < mpmath.mpf(10) ** -38
        mpmath.mp.dps = 15

    def test_eval_closed_forms(self):
        # tau_2 = (s cosh s - sinh s) / s^3
        with mpmath.workdps(50):
            for s in ("1/4", "1", "3", "20"):
                x = mpmath.mpf(Fraction(s).numerator) / Fraction(s).denominator
                ref = (x * mpmath.cosh(x) - mpmath.sinh(x)) / x ** 3
                assert abs(tau_eval(2, s, 40) - ref) <= mpmath.mpf(10) ** -40 * max(1, abs(ref)) * 10

    def test_too_large(self):
        with pytest.raises(ArgumentTooLarge):
            tau_eval(1, 51)
        tau_eval(1, 50)

    @pytest.mark.parametrize("i", range(1, 9))
    @pytest.mark.parametrize("s", ["1/4", "1", "3"])
    def test_three_term_numeric(self, i, s):
        prec = 40
        with mpmath.workdps(prec + 10):
            x = mpmath.mpf(Fraction(s).numerator) / Fraction(s).denominator
            lhs = x * x * tau_eval(i + 1, s, prec)
            rhs = tau_eval(i - 1, s, prec) + (2 * i - 1) * tau_eval(i, s, prec)
            assert abs(lhs - rhs) <= mpmath.mpf(10) ** -(prec - 4)


class TestPsi:
    def test_values(self):
        with mpmath.workdps(40):
            assert abs(psi_eval(0, 1) - mpmath.exp(-1)) < mpmath.mpf(10) ** -38
            assert abs(psi_eval(1, 2) - mpmath.exp(-2) / 2) < mpmath.mpf(10) ** -38
            assert abs(psi_eval(2, 1) - 2 * mpmath.exp(-1)) < mpmath.mpf(10) ** -38

    def test_nonpositive(self):
        with pytest.raises(NonPositiveArgument):
            psi_eval(1, 0)

    @pytest.mark.parametrize("i", range(11))
    def test_inverts_to_chi(self, i):
        with mpmath.workdps(40):
            for r in (Fraction(1, 2), Fraction(1), Fraction(2), Fraction(5)):
                x = mpmath.mpf(r.numerator) / r.denominator
                back = psi_eval(i, r) * mpmath.exp(x) * x ** (2 * i)
                exact = chi(i)(r)
                ref = mpmath.mpf(exact.numerator) / exact.denominator
                assert abs(back - ref) <= mpmath.mpf(10) ** -35 * ref

    def test_derivative_recursion(self):
        # psi_{i+1} = -psi_i' / r
        with mpmath.workdps(50):
            r, h = mpmath.mpf(7) / 3, mpmath.mpf(10) ** -15
            for i in range(5):
                d = (psi_eval(i, r + h, 50) - psi_eval(i, r - h, 50)) / (2 * h)
                assert abs(psi_eval(i + 1, r, 50) + d / r) < mpmath.mpf(10) ** -25


class TestIdentities:
    @pytest.mark.parametrize("i", range(21))
    def test_antiderivative(self, i):
        assert antiderivative_identity_check(i)

    def test_antiderivative_numeric(self):
        # int_R^inf chi_i e^-r dr = e^-R chi_{i+1}(R)/R
        with mpmath.workdps(30):
            for i in (0, 3, 6):
                R = mpmath.mpf(2)
                lhs = mpmath.quad(lambda r: chi(i)(r) * mpmath.exp(-r), [R, mpmath.inf])
                rhs = mpmath.exp(-R) * chi(i + 1)(R) / R
                assert abs(lhs - rhs) < mpmath.mpf(10) ** -20 * rhs

    def test_three_term(self):
        assert three_term_check(1, 8)
        assert three_term_check(4, 12)
        assert chi(3) == chi(1).shift(2) + chi(2) * 3
        for i in range(1, 11):
            assert three_term_check(i, 20)

    def test_three_term_rejects_i0(self):
        with pytest.raises(ValueError):
            three_term_check(0, 4)
