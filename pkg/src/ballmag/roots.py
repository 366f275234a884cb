"""Complex roots of integer polynomials by Aberth-Ehrlich iteration in mpmath.

Each root is scored by the relative backward residual
|f(z)| / sum_k |a_k| |z|^k, and flagged when it lies in the open sector
3 pi / 4 < arg z < 5 pi / 4.

A small backward residual does not make the roots accurate: high-degree
magnitude polynomials are badly conditioned, and at too low a precision
Aberth converges to pseudo-roots. The root set of a real polynomial is
closed under conjugation, so its conjugation mismatch serves as a
forward-error check, and precision is raised until it is small.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath

from .errors import NoConvergence
from .exactalg import IntPoly

DEFAULT_BITS = 256
BITS_PER_DEGREE = 4
MAX_BITS = 8192
CONJUGATE_TOL = 1e-20
MAX_ITERATIONS = 500


@dataclass(frozen=True)
class RootReport:
    poly_id: str
    p: int
    roots: tuple  # mpc, sorted by (re, im)
    max_residual: float
    in_sector: tuple  # one flag per root
    iterations: int = 0
    conjugate_error: float = 0.0
    precision: int = DEFAULT_BITS

    @property
    def certified(self) -> bool:
        return self.conjugate_error <= CONJUGATE_TOL

    @property
    def all_in_sector(self) -> bool:
        return all(self.in_sector)

    def as_pairs(self, digits: int = 20) -> list[tuple[str, str]]:
        return [(mpmath.nstr(z.real, digits), mpmath.nstr(z.imag, digits)) for z in self.roots]


def relative_residual(poly: IntPoly, z) -> float:
    num = abs(mpmath.polyval(list(reversed(poly.coeffs)), z))
    den = mpmath.fsum(abs(a) * abs(z) ** k for k, a in enumerate(poly.coeffs))
    return float(num / den)


def in_sector(z) -> bool:
    a = mpmath.arg(z)  # in (-pi, pi]
    return abs(a) > 3 * mpmath.pi / 4


def conjugate_error(roots) -> float:
    """Largest distance from a root to the nearest conjugate of another, relative to max(1, |z|)."""
    worst = mpmath.mpf(0)
    for z in roots:
        near = min(abs(z - mpmath.conj(w)) for w in roots)
        worst = max(worst, near / max(1, abs(z)))
    return float(worst)


def auto_precision(degree: int) -> int:
    return max(DEFAULT_BITS, BITS_PER_DEGREE * degree)


def _initial_guesses(coeffs_desc: list) -> list:
    """Points on the circle of radius |a_0 / a_n|^(1/n), the geometric mean root modulus."""
    n = len(coeffs_desc) - 1
    tail = next(c for c in reversed(coeffs_desc) if c)
    radius = abs(tail / coeffs_desc[0]) ** (mpmath.mpf(1) / n)
    # an angular offset keeps guesses off the real axis and any symmetry line
    return [radius * mpmath.expjpi(2 * mpmath.mpf(k) / n + mpmath.mpf(1) / (2 * n) + 0.1)
            for k in range(n)]


def roots_aberth(poly: IntPoly, precision: int | None = None, poly_id: str = "", p: int = -1,
                 max_iterations: int = MAX_ITERATIONS) -> RootReport:
    """All complex roots of ``poly`` by simultaneous Aberth-Ehrlich updates.

    With ``precision=None`` the working precision starts at
    ``auto_precision(degree)`` bits and doubles (up to MAX_BITS) until the
    conjugation mismatch is below CONJUGATE_TOL. An explicit precision is
    used as given; check ``report.certified``.
    """
    if not poly.coeffs or poly.degree < 1:
        raise ValueError("root finding needs degree >= 1")
    if precision is not None:
        return _aberth(poly, precision, poly_id, p, max_iterations)
    bits = auto_precision(poly.degree)
    while True:
        rep = _aberth(poly, bits, poly_id, p, max_iterations)
        if rep.certified or bits >= MAX_BITS:
            return rep
        bits *= 2


def _aberth(poly: IntPoly, precision: int, poly_id: str, p: int, max_iterations: int) -> RootReport:
    with mpmath.workprec(precision):
        desc = [mpmath.mpf(c) for c in reversed(poly.coeffs)]
        deriv = [c * (len(desc) - 1 - k) for k, c in enumerate(desc[:-1])]
        n = len(desc) - 1
        z = _initial_guesses(desc)
        tol = mpmath.mpf(2) ** (-(precision - 16))
        absdesc = [abs(c) for c in desc]
        done = [False] * n
        for it in range(1, max_iterations + 1):
            for k in range(n):
                if done[k]:
                    continue
                zk = z[k]
                f = mpmath.polyval(desc, zk)
                # backward-stable stop: residual at rounding level of the evaluation
                if abs(f) <= tol * mpmath.polyval(absdesc, abs(zk)):
                    done[k] = True
                    continue
                ratio = f / mpmath.polyval(deriv, zk)
                repulse = mpmath.fsum(1 / (zk - z[j]) for j in range(n) if j != k)
                z[k] = zk - ratio / (1 - ratio * repulse)
            if all(done):
                break
        else:
            raise NoConvergence(f"Aberth iteration for {poly_id or poly} hit {max_iterations} steps")
        roots = tuple(sorted((mpmath.mpc(r) for r in z), key=lambda r: (float(r.real), float(r.imag))))
        worst = max(relative_residual(poly, r) for r in roots)
        flags = tuple(in_sector(r) for r in roots)
        conj = conjugate_error(roots)
    return RootReport(poly_id, p, roots, worst, flags, it, conj, precision)


def magnitude_roots(p: int, side: str = "N", precision: int | None = None) -> RootReport:
    from .hankel import magnitude_hankel

    r = magnitude_hankel(p)
    poly = r.numerator if side == "N" else r.denominator
    if poly.degree < 1:
        return RootReport(f"{side}_{p}", p, (), 0.0, (), precision=precision or DEFAULT_BITS)
    return roots_aberth(poly, precision, f"{side}_{p}", p)
