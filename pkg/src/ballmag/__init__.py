"""Exact magnitude of odd-dimensional Euclidean balls.

Three independent routes compute |B^n_R| = N_p(R) / (n! D_p(R)), n = 2p + 1:
Hankel determinants of reverse Bessel polynomials (``hankel``), Cramer's rule
on the boundary weighting system (``weights``) and weighted Schroeder path
collections (``schroeder``).  ``analytic`` checks the underlying integral
identities numerically.
"""

from .bessel import chi, delta_apply, psi_eval, tau_eval
from .exactalg import IntPoly, LaurentPoly, PolyMatrix, RationalFn, bareiss_det
from .hankel import MagnitudeResult, magnitude_hankel
from .schroeder import combinatorial_D, combinatorial_N
from .weights import magnitude_cramer

__all__ = [
    "IntPoly", "LaurentPoly", "PolyMatrix", "RationalFn", "bareiss_det",
    "chi", "delta_apply", "psi_eval", "tau_eval",
    "MagnitudeResult", "magnitude_hankel", "magnitude_cramer",
    "combinatorial_N", "combinatorial_D",
]
__version__ = "0.1.0"
