"""The weighting linear system and its Cramer solution.

A weight distribution on B^n_R (n = 2p + 1) of the form "volume measure plus
sum_j beta_j(R) times j-th normal derivatives on the boundary sphere" exists
iff the coefficients solve

    sum_j delta^j chi_{p+i}(R) beta_j(R) = chi_{p+i+1}(R) / R,   i = 0..p,

and then |B^n_R| = (R^n + n beta_0 R^{n-1}) / n!.  Appending that last
relation as an extra row gives a (p+2)x(p+2) system whose Cramer ratio is
the magnitude itself; this module evaluates both, entirely over Z[R, 1/R].
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from math import factorial

from .bessel import chi, delta_apply
from .errors import SingularSystem
from .exactalg import LaurentPoly, PolyMatrix, RationalFn, bareiss_det
from .hankel import MagnitudeResult, magnitude_hankel, split_magnitude, structural_checks


@dataclass(frozen=True)
class WeightSystem:
    p: int
    matrix: PolyMatrix
    rhs: tuple  # LaurentPoly per row


@dataclass(frozen=True)
class WeightSolution:
    p: int
    betas: tuple  # RationalFn beta_0 .. beta_p
    magnitude: RationalFn
    residual_zero: bool


def build_system(p: int) -> WeightSystem:
    if p < 1:
        raise ValueError("the weighting system needs p >= 1")
    rows = []
    for i in range(p + 1):
        f = LaurentPoly.from_poly(chi(p + i))
        row = [f]
        for _ in range(p):
            f = delta_apply(f, p)
            row.append(f)
        rows.append(row)
    rhs = tuple(LaurentPoly.from_poly(chi(p + i + 1)).shift(-1) for i in range(p + 1))
    return WeightSystem(p, PolyMatrix.from_rows(rows), rhs)


def _magnitude_from_beta0(p: int, beta0: RationalFn) -> RationalFn:
    n = 2 * p + 1
    r_pow = LaurentPoly.monomial(1, n)
    return (RationalFn.of(r_pow) + beta0 * LaurentPoly.monomial(n, n - 1)) / factorial(n)


def solve_weights(sys: WeightSystem) -> WeightSolution:
    """Cramer's rule over Z[R, 1/R], then an exact residual check."""
    det = bareiss_det(sys.matrix)
    if det.is_zero():
        raise SingularSystem(f"weighting matrix for p={sys.p} is singular")
    size = sys.p + 1
    betas = tuple(
        RationalFn.from_laurent(bareiss_det(sys.matrix.replace_column(j, sys.rhs)), det)
        for j in range(size)
    )
    residual_zero = True
    for i in range(size):
        acc = RationalFn.of(-sys.rhs[i])
        for j in range(size):
            acc = acc + betas[j] * sys.matrix[i, j]
        residual_zero &= acc.is_zero()
    return WeightSolution(sys.p, betas, _magnitude_from_beta0(sys.p, betas[0]), residual_zero)


def extended_matrices(p: int) -> tuple[PolyMatrix, PolyMatrix]:
    """Numerator and denominator matrices of the Cramer formula for |B^n_R|."""
    n = 2 * p + 1
    system = build_system(p)
    base = system.matrix.to_rows()
    zero = LaurentPoly()
    last = [LaurentPoly.monomial(-n, n - 1)] + [zero] * p
    num = [row + [system.rhs[i]] for i, row in enumerate(base)]
    num.append(last + [LaurentPoly.monomial(1, n)])
    den = [row + [zero] for row in base]
    den.append(last + [LaurentPoly.monomial(factorial(n), 0)])
    return PolyMatrix.from_rows(num), PolyMatrix.from_rows(den)


def magnitude_cramer(p: int, with_betas: bool = False) -> MagnitudeResult:
    """Magnitude as the Cramer ratio of the extended weighting system."""
    if p == 0:
        # No boundary terms: the system is empty and |B^1_R| = R + 1.
        return replace(magnitude_hankel(0), method="cramer")
    num_m, den_m = extended_matrices(p)
    top = bareiss_det(num_m)
    bottom = bareiss_det(den_m)
    if bottom.is_zero():
        raise SingularSystem(f"extended system for p={p} is singular")
    mag = RationalFn.from_laurent(top, bottom)
    N, D = split_magnitude(mag, p)
    result = MagnitudeResult(2 * p + 1, p, N, D, mag, "cramer")
    checks = structural_checks(result)
    betas = None
    if with_betas:
        sol = solve_weights(build_system(p))
        betas = sol.betas
        checks["residual_zero"] = sol.residual_zero
        checks["beta0_consistent"] = sol.magnitude == mag
    return replace(result, checks=checks, betas=betas)
