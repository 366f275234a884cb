"""Floating-point verification of the integral identities and point-cloud magnitudes.

Sphere integrals over S^{2p}_R in R^{2p+1} reduce, by rotational symmetry
about the axis through s, to

    sigma_{2p-1} R^{2p} int_0^pi f(w(theta)) sin^{2p-1}(theta) d theta,
    w(theta) = sqrt(R^2 + s^2 - 2 R s cos theta),

which is evaluated by Gauss-Legendre quadrature in mpmath.  The closed-form
right-hand sides use exact chi_i at rational R and ``tau_eval``.

For ball integrals the inner sphere integral is taken in the variable w
instead of theta: with w dw = r s sin(theta) d theta the integrand becomes
f(w) * w * (1 - u^2)^{p-1} / (r s), smooth on [|r-s|, r+s] even when r = s,
where the theta form has a kink.  The outer radial integral is split at r = s.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Callable, Optional, Sequence

import mpmath
import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .bessel import chi, delta_apply, tau_eval, to_mpf
from .errors import IllConditioned, PrecisionNotReached, TooLarge
from .hankel import magnitude_hankel

DEFAULT_NODES = 200
DEFAULT_DIGITS = 30
DOUBLING_TOL = 1e-10
CLOUD_MAX_POINTS = 5000
REFINE_THRESHOLD = 1e-10


@dataclass(frozen=True)
class QuadratureSpec:
    p: int
    R: Fraction
    s: Fraction
    nodes: int = DEFAULT_NODES
    precision: int = DEFAULT_DIGITS

    def __post_init__(self):
        object.__setattr__(self, "R", Fraction(self.R))
        object.__setattr__(self, "s", Fraction(self.s))
        if self.p < 1:
            raise ValueError("sphere integrals need p >= 1")
        if self.R <= 0:
            raise ValueError("R must be positive")
        if not 0 <= self.s < self.R:
            raise ValueError("need 0 <= s < R (s strictly inside the ball)")
        if self.nodes < 2:
            raise ValueError("need at least two quadrature nodes")


@dataclass
class QuadratureReport:
    kind: str
    p: int
    R: str
    s: str
    j: Optional[int]
    lhs: str
    rhs: str
    rel_error: float
    nodes: int
    quad_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.rel_error <= self.tolerance

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


# ---------------------------------------------------------------------------
# Gauss-Legendre
# ---------------------------------------------------------------------------

@lru_cache(maxsize=32)
def gauss_legendre(n: int, digits: int) -> tuple:
    """Nodes and weights on [-1, 1] to ``digits`` decimal digits (Newton on P_n)."""
    with mpmath.workdps(digits + 10):
        nodes, weights = [None] * n, [None] * n
        eps = mpmath.mpf(10) ** (-(digits + 5))
        for i in range(n // 2 + n % 2):
            x = mpmath.cos(mpmath.pi * (i + mpmath.mpf(3) / 4) / (n + mpmath.mpf(1) / 2))
            for _ in range(100):
                p0, p1 = mpmath.mpf(1), x
                for k in range(2, n + 1):
                    p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
                dp = n * (x * p1 - p0) / (x * x - 1)
                dx = p1 / dp
                x -= dx
                if abs(dx) < eps:
                    break
            p0, p1 = mpmath.mpf(1), x
            for k in range(2, n + 1):
                p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
            dp = n * (x * p1 - p0) / (x * x - 1)
            w = 2 / ((1 - x * x) * dp * dp)
            nodes[i], weights[i] = -x, w
            nodes[n - 1 - i], weights[n - 1 - i] = x, w
        return tuple(nodes), tuple(weights)


def gl_integrate(f: Callable, a, b, n: int, digits: int):
    xs, ws = gauss_legendre(n, digits)
    half = (b - a) / 2
    mid = (b + a) / 2
    return half * mpmath.fsum(w * f(mid + half * x) for x, w in zip(xs, ws))


def _with_doubling(evaluate: Callable[[int], object], n: int, tol: float):
    """Evaluate at n and 2n nodes; raise if they disagree beyond tol (relative)."""
    coarse = evaluate(n)
    fine = evaluate(2 * n)
    scale = abs(fine) if fine else mpmath.mpf(1)
    err = float(abs(fine - coarse) / scale)
    if err > tol:
        raise PrecisionNotReached(f"node doubling changed the result by {err:.3e} > {tol:.1e}")
    return fine, err


# ---------------------------------------------------------------------------
# sphere integrals
# ---------------------------------------------------------------------------

def sigma(m: int):
    """Surface area of the unit sphere S^m, for odd m = 2p - 1."""
    p = (m + 1) // 2
    return 2 * mpmath.pi ** p / factorial(p - 1)


def normalizer(p: int):
    """n! * omega_n for n = 2p + 1."""
    return 2 * factorial(p) * (4 * mpmath.pi) ** p


def _psi(j: int) -> Callable:
    c = chi(j)
    return lambda w: mpmath.exp(-w) * c(w) / w ** (2 * j)


def _theta_integral(p: int, R, s, f: Callable, n: int, digits: int):
    R2s2, twoRs = R * R + s * s, 2 * R * s
    g = lambda t: f(mpmath.sqrt(R2s2 - twoRs * mpmath.cos(t))) * mpmath.sin(t) ** (2 * p - 1)
    return sigma(2 * p - 1) * R ** (2 * p) * gl_integrate(g, 0, mpmath.pi, n, digits)


def _w_integral(p: int, r, s, f: Callable, n: int, digits: int):
    """The same sphere integral with w = |x - s| as the variable (needs s > 0)."""
    rs = r * s
    r2s2 = r * r + s * s

    def g(w):
        u = (r2s2 - w * w) / (2 * rs)
        return f(w) * w * (1 - u * u) ** (p - 1)

    return sigma(2 * p - 1) * r ** (2 * p) / rs * gl_integrate(g, abs(r - s), r + s, n, digits)


def sphere_integral_quadrature(spec: QuadratureSpec, j: int = 0, tol: float = DOUBLING_TOL):
    """(value, estimated relative quadrature error) of int_{S_R} psi_j(|x - s|) dx."""
    if not 0 <= j <= spec.p:
        raise ValueError("need 0 <= j <= p")
    with mpmath.workdps(spec.precision):
        R, s = to_mpf(spec.R), to_mpf(spec.s)
        f = _psi(j)
        return _with_doubling(
            lambda n: _theta_integral(spec.p, R, s, f, n, spec.precision), spec.nodes, tol
        )


def key_integral_rhs(p: int, R, s, precision: int = DEFAULT_DIGITS):
    with mpmath.workdps(precision + 10):
        Rm = to_mpf(R)
        acc = mpmath.fsum(
            comb(p, i) * chi(p + i)(Rm) * tau_eval(i, s, precision + 10) for i in range(p + 1)
        )
        return (-1) ** p * mpmath.exp(-Rm) / (2 ** p * factorial(p)) * acc


def general_key_integral_rhs(p: int, j: int, R, s, precision: int = DEFAULT_DIGITS):
    with mpmath.workdps(precision + 10):
        Rm = to_mpf(R)
        acc = mpmath.fsum(
            comb(p - j, i) * chi(i + p)(Rm) * tau_eval(i + j, s, precision + 10)
            for i in range(p - j + 1)
        )
        return (-2 * mpmath.pi) ** p * 2 * mpmath.exp(-Rm) * acc


def _rel(lhs, rhs) -> float:
    return float(abs(lhs - rhs) / abs(rhs))


def _report(kind, spec_p, R, s, j, lhs, rhs, nodes, qerr, tol) -> QuadratureReport:
    return QuadratureReport(
        kind, spec_p, str(Fraction(R)), str(Fraction(s)), j,
        mpmath.nstr(lhs, 25), mpmath.nstr(rhs, 25), _rel(lhs, rhs), nodes, qerr, tol,
    )


def key_integral_check(spec: QuadratureSpec, tol: float = 1e-8) -> QuadratureReport:
    """Normalized sphere integral of e^{-|x-s|} against its chi/tau closed form."""
    raw, qerr = sphere_integral_quadrature(spec, 0)
    with mpmath.workdps(spec.precision):
        lhs = raw / normalizer(spec.p)
        rhs = key_integral_rhs(spec.p, spec.R, spec.s, spec.precision)
        return _report("key_integral", spec.p, spec.R, spec.s, 0, lhs, rhs, spec.nodes, qerr, tol)


def general_key_integral_check(spec: QuadratureSpec, j: int, tol: float = 1e-8) -> QuadratureReport:
    lhs, qerr = sphere_integral_quadrature(spec, j)
    with mpmath.workdps(spec.precision):
        rhs = general_key_integral_rhs(spec.p, j, spec.R, spec.s, spec.precision)
        return _report("general_key_integral", spec.p, spec.R, spec.s, j, lhs, rhs,
                       spec.nodes, qerr, tol)


# ---------------------------------------------------------------------------
# ball integral and normal derivatives
# ---------------------------------------------------------------------------

def _ball_lhs(p: int, R, s, n: int, digits: int):
    f = lambda w: mpmath.exp(-w)
    if s == 0:
        inner = lambda r: _theta_integral(p, r, s, f, n, digits)
        total = gl_integrate(inner, 0, R, n, digits)
    else:
        inner = lambda r: _w_integral(p, r, s, f, n, digits)
        total = gl_integrate(inner, 0, s, n, digits) + gl_integrate(inner, s, R, n, digits)
    return total / normalizer(p)


def ball_integral_rhs(p: int, R, s, precision: int = DEFAULT_DIGITS):
    with mpmath.workdps(precision + 10):
        Rm = to_mpf(R)
        acc = mpmath.fsum(
            comb(p, i) * chi(p + i + 1)(Rm) / Rm * tau_eval(i, s, precision + 10)
            for i in range(p + 1)
        )
        return 1 - (-1) ** p * mpmath.exp(-Rm) / (2 ** p * factorial(p)) * acc


def ball_integral_check(p: int, R, s, nodes: int = 40, precision: int = DEFAULT_DIGITS,
                        tol: float = 1e-6) -> QuadratureReport:
    """Normalized ball integral of e^{-|x-s|}, as a radial integral of sphere integrals."""
    spec = QuadratureSpec(p, R, s, nodes, precision)
    with mpmath.workdps(precision):
        Rm, sm = to_mpf(spec.R), to_mpf(spec.s)
        lhs, qerr = _with_doubling(lambda n: _ball_lhs(p, Rm, sm, n, precision), nodes,
                                   max(tol / 100, DOUBLING_TOL))
        rhs = ball_integral_rhs(p, spec.R, spec.s, precision)
        return _report("ball_integral", p, spec.R, spec.s, None, lhs, rhs, nodes, qerr, tol)


def normal_derivative_rhs(p: int, R, s, j: int, precision: int = DEFAULT_DIGITS):
    with mpmath.workdps(precision + 10):
        Rm = to_mpf(R)
        acc = mpmath.fsum(
            comb(p, i) * delta_apply(chi(p + i), p, j)(Rm) * tau_eval(i, s, precision + 10)
            for i in range(p + 1)
        )
        return (-1) ** p * mpmath.exp(-Rm) / (2 ** p * factorial(p)) * acc


def normal_derivative_check(p: int, R, s, j: int, nodes: int = DEFAULT_NODES,
                            precision: int = 50, tol: float = 1e-4) -> QuadratureReport:
    """R^{2p} d^j/dR^j (R^{-2p} K(R)) by central differences, K the normalized sphere integral."""
    if j > 2:
        raise TooLarge("finite-difference normal derivatives are supported for j <= 2")
    spec = QuadratureSpec(p, R, s, nodes, precision)
    f = _psi(0)
    with mpmath.workdps(precision):
        Rm, sm = to_mpf(spec.R), to_mpf(spec.s)
        h = mpmath.mpf(10) ** (-(precision // 5))

        def g(r):
            return _theta_integral(p, r, sm, f, nodes, precision) / normalizer(p) / r ** (2 * p)

        if j == 0:
            deriv = g(Rm)
        elif j == 1:
            deriv = (g(Rm + h) - g(Rm - h)) / (2 * h)
        else:
            deriv = (g(Rm + h) - 2 * g(Rm) + g(Rm - h)) / (h * h)
        lhs = Rm ** (2 * p) * deriv
        rhs = normal_derivative_rhs(p, spec.R, spec.s, j, precision)
        return _report("normal_derivative", p, spec.R, spec.s, j, lhs, rhs, nodes, float(h), tol)


def key_integral_grid(ps: Sequence[int] = (1, 2, 3), radii: Sequence = (1, 2, 5),
                      fractions: Sequence = (0, Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)),
                      nodes: int = DEFAULT_NODES, precision: int = DEFAULT_DIGITS) -> list:
    out = []
    for p in ps:
        for R in radii:
            for fr in fractions:
                spec = QuadratureSpec(p, Fraction(R), Fraction(R) * Fraction(fr), nodes, precision)
                out.append(key_integral_check(spec))
    return out


# ---------------------------------------------------------------------------
# point clouds
# ---------------------------------------------------------------------------

@dataclass
class PointCloud:
    dim: int
    radius: float
    points: np.ndarray
    generator: str
    label: str = ""

    def __len__(self) -> int:
        return len(self.points)


@dataclass
class CloudMagnitude:
    cloud_id: str
    size: int
    value: float
    residual: float
    ill_conditioned: bool = False


def grid_cloud(dim: int, radius, axis_points: int) -> PointCloud:
    """Lattice points (radius / m) Z^dim inside the closed ball, m = (axis_points - 1) / 2.

    ``axis_points`` counts grid points along a diameter; for dim 1 this is the
    total size.  Membership is decided exactly on the integer lattice.
    """
    if axis_points < 1 or axis_points % 2 == 0:
        raise ValueError("axis_points must be a positive odd integer")
    m = (axis_points - 1) // 2
    rng = np.arange(-m, m + 1)
    mesh = np.stack(np.meshgrid(*([rng] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
    inside = mesh[(mesh * mesh).sum(axis=1) <= m * m]
    scale = float(radius) / m if m else 0.0
    return PointCloud(dim, float(radius), inside * scale, "grid", f"grid-n{dim}-a{axis_points}")


def halton_cloud(dim: int, radius, size: int, seed: int = 0) -> PointCloud:
    """First ``size`` Halton points (skipping ``seed``) that land inside the ball."""
    primes = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47][:dim]
    if len(primes) < dim:
        raise TooLarge("halton_cloud supports dim <= 15")

    def radical(k: int, b: int) -> float:
        f, out = 1.0, 0.0
        while k:
            f /= b
            out += f * (k % b)
            k //= b
        return out

    pts = []
    k = seed + 1
    while len(pts) < size:
        x = np.array([2 * radical(k, b) - 1 for b in primes])
        if x @ x <= 1:
            pts.append(x * float(radius))
        k += 1
    return PointCloud(dim, float(radius), np.array(pts).reshape(-1, dim), "lowdiscrepancy",
                      f"halton-n{dim}-{size}-seed{seed}")


def _kernel(points: np.ndarray, dtype=np.float64) -> np.ndarray:
    pts = points.astype(dtype)
    diff = pts[:, None, :] - pts[None, :, :]
    return np.exp(-np.sqrt((diff * diff).sum(axis=-1)))


def cloud_magnitude(cloud: PointCloud, tol: float = 1e-8, strict: bool = False) -> CloudMagnitude:
    """Solve Z w = 1 (Cholesky, no regularization) and return the total weight.

    If the double-precision residual exceeds 1e-10, a few refinement steps
    are taken with the residual computed in extended precision.
    """
    n = len(cloud)
    if n == 0:
        raise ValueError("empty cloud")
    if n > CLOUD_MAX_POINTS:
        raise TooLarge(f"{n} points exceed the dense-solve limit {CLOUD_MAX_POINTS}")
    Z = _kernel(cloud.points)
    ones = np.ones(n)
    try:
        factor = cho_factor(Z)
    except LinAlgError as exc:
        raise IllConditioned(f"kernel matrix of {cloud.label} is not numerically positive definite") from exc
    w = cho_solve(factor, ones)
    residual = float(np.max(np.abs(Z @ w - ones)))
    if residual > REFINE_THRESHOLD:
        Zx = _kernel(cloud.points, np.longdouble)
        for _ in range(5):
            r = np.ones(n, dtype=np.longdouble) - Zx @ w.astype(np.longdouble)
            w = w + cho_solve(factor, r.astype(np.float64))
            residual = float(np.max(np.abs(np.ones(n, dtype=np.longdouble) - Zx @ w.astype(np.longdouble))))
            if residual <= REFINE_THRESHOLD:
                break
    bad = residual > tol
    if bad and strict:
        raise IllConditioned(f"residual {residual:.3e} above {tol:.1e} for {cloud.label}")
    return CloudMagnitude(cloud.label, n, float(w.sum()), residual, bad)


def _is_subset(small: np.ndarray, big: np.ndarray) -> bool:
    big_set = {tuple(np.round(row, 12)) for row in big}
    return all(tuple(np.round(row, 12)) in big_set for row in small)


@dataclass
class ConvergenceReport:
    dim: int
    radius: str
    exact: float
    sizes: list
    values: list
    residuals: list
    nondecreasing: bool
    bounded: bool
    gaps: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.nondecreasing and self.bounded

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


def exact_ball_magnitude(dim: int, radius) -> Fraction:
    if dim % 2 == 0 or dim < 1:
        raise ValueError("exact magnitudes are available for odd dimensions only")
    return magnitude_hankel((dim - 1) // 2).value_at(Fraction(radius))


def cloud_convergence_study(dim: int, radius, sizes: Sequence[int], generator: str = "grid",
                            seed: int = 0) -> ConvergenceReport:
    """Magnitudes of nested clouds.

    For ``grid`` the sizes are grid points per diameter; for ``halton`` they
    are point counts, and prefixes of one sequence are nested automatically.
    """
    radius = Fraction(radius)
    if generator == "grid":
        clouds = [grid_cloud(dim, radius, a) for a in sizes]
    elif generator == "halton":
        clouds = [halton_cloud(dim, radius, a, seed) for a in sizes]
    else:
        raise ValueError(f"unknown cloud generator {generator!r}")
    for small, big in zip(clouds, clouds[1:]):
        if not _is_subset(small.points, big.points):
            raise ValueError(f"{small.label} is not contained in {big.label}")
    exact = float(exact_ball_magnitude(dim, radius))
    mags = [cloud_magnitude(c) for c in clouds]
    values = [m.value for m in mags]
    # slack for round-off: magnitudes of nested clouds may tie to machine precision
    slack = 1e-9
    nondecreasing = all(b >= a - slack for a, b in zip(values, values[1:]))
    bounded = all(1 - slack <= v <= exact + slack for v in values)
    return ConvergenceReport(
        dim, str(radius), exact, [len(c) for c in clouds], values,
        [m.residual for m in mags], nondecreasing, bounded, [exact - v for v in values],
    )


def nested_axis_points(lo: int, hi: int) -> list[int]:
    """A nested chain of axis point counts from lo to hi.

    Grid a is contained in grid b when (a - 1) divides (b - 1); each step
    moves to the smallest such refinement that still divides hi - 1.
    """
    if lo < 1 or hi < lo or lo % 2 == 0 or hi % 2 == 0:
        raise ValueError("need odd 1 <= lo <= hi")
    if lo == 1:
        return [1] + nested_axis_points(3, hi) if hi >= 3 else [1]
    cur, top = lo - 1, hi - 1
    if top % cur:
        raise ValueError(f"grid {lo} is not nested in grid {hi}")
    chain = [cur]
    while cur < top:
        cur = next(m for m in range(2 * cur, top + 1, cur) if top % m == 0)
        chain.append(cur)
    return [a + 1 for a in chain]
