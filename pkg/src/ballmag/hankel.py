"""Magnitude of odd-dimensional balls from Hankel determinants of chi_i.

For n = 2p + 1,

    |B^n_R| = det[chi_{i+j+2}] / (n! R det[chi_{i+j}]),    i, j = 0..p,

and after removing the common factors sf(p) R^{p+1} and sf(p) R^p this is
N_p / (n! D_p) with N_p, D_p monic integer polynomials.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Optional

from .bessel import chi, superfactorial
from .errors import NonPositiveCoefficient, NotDivisible, TooManyTerms
from .exactalg import IntPoly, PolyMatrix, RationalFn, bareiss_det, exact_div

METHODS = ("hankel", "cramer", "schroeder")


@dataclass(frozen=True)
class MagnitudeResult:
    n: int
    p: int
    numerator: IntPoly
    denominator: IntPoly
    magnitude: RationalFn
    method: str
    checks: dict = field(default_factory=dict, compare=False)
    betas: Optional[tuple] = field(default=None, compare=False)

    def value_at(self, radius) -> Fraction:
        return self.magnitude(Fraction(radius))


def kappa(p: int) -> int:
    return (p + 1) * (p + 2) // 2


def hankel_matrix(start: int, size: int) -> PolyMatrix:
    """Square matrix with entry (i, j) = chi_{i+j+start}."""
    if size < 1:
        raise ValueError("size must be positive")
    return PolyMatrix.from_rows(
        [[chi(i + j + start) for j in range(size)] for i in range(size)]
    )


@lru_cache(maxsize=64)
def hankel_determinants(p: int) -> tuple[IntPoly, IntPoly]:
    """(det[chi_{i+j+2}], det[chi_{i+j}]) for i, j = 0..p."""
    top = bareiss_det(hankel_matrix(2, p + 1)).to_poly()
    bottom = bareiss_det(hankel_matrix(0, p + 1)).to_poly()
    return top, bottom


def split_magnitude(mag: RationalFn, p: int) -> tuple[IntPoly, IntPoly]:
    """Recover monic (N_p, D_p) from a canonical N_p / (n! D_p)."""
    n = 2 * p + 1
    lead = mag.den.lc
    den = mag.den.coeffs
    if any(v % lead for v in den):
        raise NotDivisible("denominator is not an integer multiple of a monic polynomial")
    d = IntPoly(tuple(v // lead for v in den))
    scaled = mag.num * factorial(n)
    if any(v % lead for v in scaled.coeffs):
        raise NotDivisible("numerator scaling is not integral")
    return IntPoly(tuple(v // lead for v in scaled.coeffs)), d


def magnitude_hankel(p: int) -> MagnitudeResult:
    if p < 0:
        raise ValueError("p must be nonnegative")
    n = 2 * p + 1
    top, bottom = hankel_determinants(p)
    sf = superfactorial(p)
    num = exact_div(top, IntPoly.monomial(sf, p + 1))
    den = exact_div(bottom, IntPoly.monomial(sf, p))
    mag = RationalFn(num, den * factorial(n))
    result = MagnitudeResult(n, p, num, den, mag, "hankel")
    checks = structural_checks(result)
    checks["hankel_ratio"] = mag == RationalFn(top, bottom.shift(1) * factorial(n))
    return replace(result, checks=checks)


def leading_terms(p: int) -> tuple[list[int], list[int]]:
    """Predicted top three coefficients of N_p and D_p (exact integers)."""
    n_lead = [
        1,
        (p + 1) ** 2 * (p + 2) // 2,
        p * (p + 1) ** 3 * (p + 2) * (p + 3) // 8,
    ]
    d_lead = [
        1,
        (p - 1) * p * (p + 1) // 2,
        (p - 2) * (p - 1) * p * (p + 1) ** 3 // 8,
    ]
    return n_lead, d_lead


def _top_three_match(poly: IntPoly, top_exp: int, expected: list[int]) -> bool:
    return all(poly.coeff(top_exp - k) == expected[k] for k in range(3))


def structural_checks(r: MagnitudeResult) -> dict:
    p, n = r.p, r.n
    N, D = r.numerator, r.denominator
    kap = kappa(p)
    n_lead, d_lead = leading_terms(p)
    checks = {
        "degree_N": N.degree == kap,
        "degree_D": D.degree == p * (p - 1) // 2,
        "monic_N": N.lc == 1,
        "monic_D": D.lc == 1,
        "positive_N": bool(N.coeffs) and all(v > 0 for v in N.coeffs),
        "positive_D": bool(D.coeffs) and all(v > 0 for v in D.coeffs),
        "constant_term": N.coeff(0) == factorial(n) * D.coeff(0),
        "leading_N": _top_three_match(N, kap, n_lead),
        "leading_D": _top_three_match(D, kap - 2 * p - 1, d_lead),
        "magnitude_form": r.magnitude == RationalFn(N, D * factorial(n)),
        "limit_at_zero": r.magnitude(Fraction(0)) == 1,
    }
    terms = min(3, N.degree - D.degree + 1)
    expansion = asymptotic_expansion(r, terms)
    predicted = [
        Fraction(1, factorial(n)),
        Fraction(n * (n + 1), 2 * factorial(n)),
        Fraction((n - 1) * n * (n + 1) ** 2, 8 * factorial(n)),
    ]
    checks["asymptotics"] = expansion == predicted[:terms]
    return checks


def asymptotic_expansion(r: MagnitudeResult, terms: int) -> list[Fraction]:
    """Leading coefficients of N_p / (n! D_p) at R -> infinity, highest power first."""
    N, D = r.numerator, r.denominator
    avail = N.degree - D.degree + 1
    if terms < 1 or terms > avail:
        raise TooManyTerms(f"at most {avail} polynomial-part terms are available")
    scale = factorial(r.n)
    rem = [Fraction(v) for v in N.coeffs]
    dc = D.coeffs
    dd = len(dc) - 1
    out = []
    for k in range(terms):
        top = len(rem) - 1 - k
        q = rem[top] / dc[-1]
        out.append(q / scale)
        for j, v in enumerate(dc):
            rem[top - dd + j] -= q * v
    return out


def log_concavity_check(poly: IntPoly) -> bool:
    a = poly.coeffs
    if not a or any(v <= 0 for v in a):
        raise NonPositiveCoefficient("log-concavity is checked on positive sequences only")
    return all(a[i] * a[i] >= a[i - 1] * a[i + 1] for i in range(1, len(a) - 1))


from .roots import RootReport, roots_aberth  # noqa: E402  (roots imports hankel lazily)
