"""Reverse Bessel polynomials and the function sequences built around them.

``chi(i)`` is the degree-i reverse Bessel polynomial, defined by
``chi_{i+2} = R^2 chi_i + (2i+1) chi_{i+1}`` with ``chi_0 = 1``, ``chi_1 = R``.
The companion sequences psi_i (seeded by e^{-r}) and tau_i (seeded by
cosh s) both satisfy ``xi_{i+1} = -xi_i' / r``; psi is evaluated through
``psi_i(r) = e^{-r} r^{-2i} chi_i(r)`` and tau through its explicit even
Taylor series.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Union

import mpmath

from .errors import ArgumentTooLarge, NonPositiveArgument
from .exactalg import IntPoly, LaurentPoly

DEFAULT_PRECISION = 40
S_MAX = 50

Real = Union[int, Fraction, float, str, "mpmath.mpf"]


def to_mpf(x: Real) -> mpmath.mpf:
    """Convert ints, Fractions, decimal strings and mpf values at current precision."""
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    if isinstance(x, str) and "/" in x:
        return to_mpf(Fraction(x))
    return mpmath.mpf(x)


class ReverseBesselTable:
    """Memoized chi_0 .. chi_max, grown on demand.

    Growth happens under a lock and the visible list is swapped in one
    assignment, so a concurrent reader never sees a half-built entry.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self.polys: tuple[IntPoly, ...] = (IntPoly((1,)), IntPoly((0, 1)))

    @property
    def max_index(self) -> int:
        return len(self.polys) - 1

    def get(self, i: int) -> IntPoly:
        if i < 0:
            raise ValueError("chi index must be nonnegative")
        polys = self.polys
        if i < len(polys):
            return polys[i]
        with self._lock:
            grown = list(self.polys)
            while len(grown) <= i:
                k = len(grown) - 2
                grown.append(grown[k].shift(2) + grown[k + 1] * (2 * k + 1))
            self.polys = tuple(grown)
        return self.polys[i]


_TABLE = ReverseBesselTable()


def chi(i: int) -> IntPoly:
    return _TABLE.get(i)


def chi_table(max_index: int) -> ReverseBesselTable:
    _TABLE.get(max_index)
    return _TABLE


def superfactorial(k: int) -> int:
    """0! * 1! * ... * k!"""
    out, f = 1, 1
    for i in range(1, k + 1):
        f *= i
        out *= f
    return out


def delta_apply(f: Union[LaurentPoly, IntPoly], p: int, j: int = 1) -> LaurentPoly:
    """Apply ``delta f = e^R R^{2p} d/dR (e^{-R} R^{-2p} f)`` exactly j times.

    On Laurent polynomials this is ``f' - f - 2p f / R``.
    """
    if isinstance(f, IntPoly):
        f = LaurentPoly.from_poly(f)
    for _ in range(j):
        f = f.derivative() - f - (f * (2 * p)).shift(-1)
    return f


@dataclass(frozen=True)
class TauSeries:
    index: int
    coeffs: tuple  # Fraction coefficient of s^(2k) at position k
    order: int


def tau_coefficient(i: int, k: int) -> Fraction:
    odd = 1
    for m in range(i):
        odd *= 2 * k + 2 * m + 1
    return Fraction((-1) ** i, factorial(2 * k) * odd)


def tau_taylor(i: int, order: int) -> TauSeries:
    if order < 1:
        raise ValueError("order must be at least 1")
    return TauSeries(i, tuple(tau_coefficient(i, k) for k in range(order)), order)


def tau_at_zero(i: int) -> Fraction:
    return tau_coefficient(i, 0)


def tau_eval(i: int, s: Real, precision: int = DEFAULT_PRECISION, s_max: float = S_MAX):
    """tau_i(s) to absolute error 10^-precision by Taylor summation.

    Consecutive terms have ratio ``s^2 / ((2k+2)(2k+2i+1))``, which decreases
    in k; summation stops once the geometric tail bound drops below
    10^-(precision+2).  All terms share one sign, so there is no cancellation.
    """
    with mpmath.workdps(precision + 10):
        x = to_mpf(s)
        if abs(x) > s_max:
            raise ArgumentTooLarge(f"|s| = {mpmath.nstr(abs(x), 8)} exceeds {s_max}")
    # headroom for the size of the sum itself (at most cosh(s_max) ~ 10^22)
    guard = int(abs(float(x)) / 2.302585) + 12
    with mpmath.workdps(precision + guard):
        x = to_mpf(s)
        x2 = x * x
        term = mpmath.mpf(tau_at_zero(i).numerator) / tau_at_zero(i).denominator
        total = term
        eps = mpmath.mpf(10) ** (-(precision + 2))
        k = 0
        while True:
            ratio = x2 / ((2 * k + 2) * (2 * k + 2 * i + 1))
            if ratio < 1 and abs(term) * ratio / (1 - ratio) < eps:
                break
            term *= ratio
            total += term
            k += 1
        return +total


def psi_eval(i: int, r: Real, precision: int = DEFAULT_PRECISION):
    """psi_i(r) = e^{-r} r^{-2i} chi_i(r) for r > 0."""
    with mpmath.workdps(precision + 10):
        x = to_mpf(r)
        if x <= 0:
            raise NonPositiveArgument("psi_i needs r > 0")
        c = chi(i)
        val = mpmath.exp(-x) * c(x) / x ** (2 * i)
    with mpmath.workdps(precision):
        return +val


def antiderivative_identity_check(i: int) -> bool:
    """r^2 chi_i = r chi_{i+1} - r chi_{i+1}' + chi_{i+1}, exactly.

    Equivalent to ``d/dr(-e^{-r} chi_{i+1}(r) / r) = e^{-r} chi_i(r)``.
    """
    nxt = chi(i + 1)
    lhs = chi(i).shift(2)
    rhs = nxt.shift(1) - nxt.derivative().shift(1) + nxt
    return lhs == rhs


def three_term_check(i: int, order: int) -> bool:
    """s^2 tau_{i+1} = tau_{i-1} + (2i-1) tau_i as series, and the chi analogue."""
    if i < 1:
        raise ValueError("three-term relation needs i >= 1")
    up = tau_taylor(i + 1, order).coeffs
    mid = tau_taylor(i, order).coeffs
    low = tau_taylor(i - 1, order).coeffs
    for k in range(order):
        lhs = up[k - 1] if k else 0
        if lhs != low[k] + (2 * i - 1) * mid[k]:
            return False
    return chi(i + 1) == chi(i - 1).shift(2) + chi(i) * (2 * i - 1)

