from fractions import Fraction
from math import factorial

import mpmath
import pytest
import sympy

from ballmag import roots as roots_mod
from ballmag.bessel import chi, superfactorial
from ballmag.errors import NonPositiveCoefficient, NoConvergence, TooManyTerms
from ballmag.exactalg import IntPoly, LaurentPoly, RationalFn, exact_div
from ballmag.hankel import (
    asymptotic_expansion, hankel_determinants, hankel_matrix, kappa, leading_terms,
    log_concavity_check, magnitude_hankel, roots_aberth, structural_checks,
)
from ballmag.roots import conjugate_error

Rs = sympy.Symbol("R")


def P(*c):
    return IntPoly(tuple(c))


def sym(poly):
    return sympy.Integer(0) + sum(c * Rs ** k for k, c in enumerate(poly.coeffs))


N3 = P(302400, 1209600, 1814400, 1467900, 730800, 238140, 52080, 7620, 720, 40, 1)


class TestHankelMatrix:
    def test_layout(self):
        assert hankel_matrix(0, 1).to_rows() == [[LaurentPoly(0, (1,))]]
        m = hankel_matrix(0, 2)
        assert [[m[i, j] for j in range(2)] for i in range(2)] == [
            [LaurentPoly.from_poly(chi(i + j)) for j in range(2)] for i in range(2)]
        m = hankel_matrix(2, 2)
        assert m[1, 1] == LaurentPoly.from_poly(chi(4))

    @pytest.mark.parametrize("p", range(4))
    def test_determinants_match_sympy(self, p):
        top, bottom = hankel_determinants(p)
        for start, got in ((2, top), (0, bottom)):
            ref = sympy.Matrix(p + 1, p + 1, lambda i, j: sym(chi(i + j + start))).det()
            assert sympy.expand(ref - sym(got)) == 0


class TestMagnitude:
    def test_p0(self):
        r = magnitude_hankel(0)
        assert r.magnitude == RationalFn(P(1, 1))
        assert r.value_at(Fraction(7, 2)) == Fraction(9, 2)

    def test_p1(self):
        r = magnitude_hankel(1)
        assert r.numerator == P(6, 12, 6, 1) and r.denominator == P(1)
        assert r.magnitude == RationalFn(P(6, 12, 6, 1), P(6))
        assert r.value_at(1) == Fraction(25, 6)

    def test_p2(self):
        r = magnitude_hankel(2)
        assert r.numerator == P(360, 1080, 1080, 525, 135, 18, 1)
        assert r.denominator == P(3, 1)

    def test_p3(self):
        r = magnitude_hankel(3)
        assert r.numerator == N3
        assert r.denominator == P(60, 48, 12, 1)

    def test_negative_p(self):
        with pytest.raises(ValueError):
            magnitude_hankel(-1)

    @pytest.mark.parametrize("p", range(0, 23))
    def test_structural_suite(self, p):
        r = magnitude_hankel(p)
        assert all(r.checks.values()), {k: v for k, v in r.checks.items() if not v}
        assert r.numerator.degree == kappa(p)
        assert r.denominator.degree == p * (p - 1) // 2

    @pytest.mark.parametrize("p", [0, 1, 5, 12, 22])
    def test_monomial_factor_divisibility(self, p):
        top, bottom = hankel_determinants(p)
        sf = superfactorial(p)
        exact_div(top, IntPoly.monomial(sf, p + 1))
        exact_div(bottom, IntPoly.monomial(sf, p))

    def test_limit_at_zero_numeric(self):
        with mpmath.workdps(30):
            for p in range(6):
                r = magnitude_hankel(p)
                assert abs(r.value_at(Fraction(1, 10 ** 12)) - 1) < Fraction(1, 10 ** 9)


class TestStructuralChecks:
    def test_subleading(self):
        assert leading_terms(1)[0][1] == 6
        assert magnitude_hankel(1).numerator.coeff(2) == 6

    def test_leading_terms_against_formula(self):
        for p in range(8):
            n_lead, d_lead = leading_terms(p)
            assert n_lead == [1, (p + 1) ** 2 * (p + 2) // 2, p * (p + 1) ** 3 * (p + 2) * (p + 3) // 8]

    def test_detects_tampering(self):
        r = magnitude_hankel(2)
        bad = P(*r.numerator.coeffs[:-2], 19, 1)
        from dataclasses import replace

        checks = structural_checks(replace(r, numerator=bad))
        assert not checks["leading_N"]


class TestAsymptotics:
    def test_p0(self):
        assert asymptotic_expansion(magnitude_hankel(0), 2) == [1, 1]

    def test_p2(self):
        got = asymptotic_expansion(magnitude_hankel(2), 3)
        assert got == [Fraction(1, 120), Fraction(15, 120), Fraction(90, 120)]

    def test_p3(self):
        got = asymptotic_expansion(magnitude_hankel(3), 3)
        assert got == [Fraction(c, factorial(7)) for c in (1, 28, 336)]

    @pytest.mark.parametrize("p", range(1, 6))
    def test_sympy_long_division(self, p):
        r = magnitude_hankel(p)
        q, _ = sympy.div(sym(r.numerator), sym(r.denominator), Rs)
        q = sympy.Poly(q, Rs).all_coeffs()
        terms = min(3, len(q))
        got = asymptotic_expansion(r, terms)
        assert got == [Fraction(int(sympy.numer(c)), int(sympy.denom(c))) / factorial(r.n) for c in q[:terms]]

    def test_too_many(self):
        with pytest.raises(TooManyTerms):
            asymptotic_expansion(magnitude_hankel(0), 3)
        with pytest.raises(TooManyTerms):
            asymptotic_expansion(magnitude_hankel(2), 0)


class TestLogConcavity:
    def test_examples(self):
        assert log_concavity_check(P(1, 2, 1))
        assert log_concavity_check(P(6, 12, 6, 1))
        assert log_concavity_check(P(60, 48, 12, 1))
        assert not log_concavity_check(P(1, 1, 5))

    def test_nonpositive(self):
        with pytest.raises(NonPositiveCoefficient):
            log_concavity_check(P(1, 0, 1))


class TestRoots:
    def test_linear(self):
        rep = roots_aberth(P(3, 1))
        assert abs(rep.roots[0] + 3) < mpmath.mpf(10) ** -60
        assert rep.in_sector == (True,)

    def test_n1_roots(self):
        rep = roots_aberth(magnitude_hankel(1).numerator)
        assert len(rep.roots) == 3 and rep.all_in_sector
        assert all(z.real < 0 for z in rep.roots)
        # Routh-Hurwitz for a monic cubic: all roots in the left half-plane iff a, c > 0, a b > c
        c, b, a, _ = magnitude_hankel(1).numerator.coeffs
        assert a > 0 and c > 0 and a * b > c

    def test_against_polyroots(self):
        poly = magnitude_hankel(4).numerator
        rep = roots_aberth(poly)
        with mpmath.workdps(60):
            ref = mpmath.polyroots(list(reversed(poly.coeffs)), maxsteps=400, extraprec=200)
            for z in ref:
                assert min(abs(z - w) for w in rep.roots) < mpmath.mpf(10) ** -40

    def test_vieta(self):
        poly = magnitude_hankel(3).denominator
        rep = roots_aberth(poly)
        with mpmath.workprec(256):
            assert abs(mpmath.fsum(rep.roots) + 12) < mpmath.mpf(10) ** -60
            assert abs(mpmath.fprod(rep.roots) + 60) < mpmath.mpf(10) ** -60

    def test_degree_276(self):
        assert magnitude_hankel(22).numerator.degree == 276

    def test_no_convergence(self):
        with pytest.raises(NoConvergence):
            roots_aberth(magnitude_hankel(5).numerator, max_iterations=2)

    def test_constant_rejected(self):
        with pytest.raises(ValueError):
            roots_aberth(P(5))

    def test_low_precision_pseudo_roots_flagged(self):
        # tiny backward residual, yet the root set is visibly not conjugation-closed
        rep = roots_aberth(magnitude_hankel(8).numerator, precision=64)
        assert rep.max_residual < 1e-10
        assert not rep.certified

    def test_auto_precision_escalates(self, monkeypatch):
        monkeypatch.setattr(roots_mod, "DEFAULT_BITS", 64)
        monkeypatch.setattr(roots_mod, "BITS_PER_DEGREE", 1)
        rep = roots_aberth(magnitude_hankel(8).numerator)
        assert rep.precision > 64 and rep.certified
        ref = roots_aberth(magnitude_hankel(8).numerator, precision=512)
        assert all(min(abs(z - w) for w in ref.roots) < 1e-20 for z in rep.roots)

    def test_conjugate_error(self):
        assert conjugate_error([mpmath.mpc(1, 2), mpmath.mpc(1, -2), mpmath.mpf(-3)]) == 0
        assert conjugate_error([mpmath.mpc(0, 1)]) == pytest.approx(2.0)
