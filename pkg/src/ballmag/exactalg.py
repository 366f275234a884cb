"""Exact arithmetic substrate: integer polynomials, Laurent polynomials,
normalized rational functions and fraction-free determinants.

Every value here is immutable and every operation is a pure function, so
values can be shared freely between threads.  Coefficients are Python ints
(arbitrary precision); nothing in the exact path ever touches a float.

Large products go through Kronecker substitution: both polynomials are packed
into one big integer, multiplied with the interpreter's (or GMP's)
sub-quadratic integer multiplication and unpacked again.  Exact division uses
the same trick with a Mignotte bound on the quotient and a multiply-back
check, so a non-divisible input is always detected.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from math import gcd
from typing import Iterable, Sequence, Union

from .errors import NonSquare, NotDivisible

try:  # GMP multiplication is an order of magnitude faster on 10^5-bit ints
    from gmpy2 import mpz as _mpz
except ImportError:  # pragma: no cover
    _mpz = None

__all__ = [
    "NEG_INF",
    "IntPoly",
    "LaurentPoly",
    "RationalFn",
    "PolyMatrix",
    "poly_arith",
    "exact_div",
    "laurent_derivative",
    "poly_gcd",
    "bareiss_det",
    "cofactor_det",
]

# Degree of the zero polynomial.  Never -1: keeps ``deg(a*b) = deg a + deg b``.
NEG_INF = float("-inf")

Coeffs = tuple  # tuple[int, ...], ascending powers, no trailing zeros

_KRONECKER_MIN = 24
_MODULI = (2**61 - 1, 2**89 - 1)


# ---------------------------------------------------------------------------
# coefficient-tuple kernels
# ---------------------------------------------------------------------------

def _trim(c: Sequence[int]) -> Coeffs:
    n = len(c)
    while n and not c[n - 1]:
        n -= 1
    return tuple(c[:n])


def _add(a: Coeffs, b: Coeffs) -> Coeffs:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, v in enumerate(b):
        out[i] += v
    return _trim(out)


def _neg(a: Coeffs) -> Coeffs:
    return tuple(-v for v in a)


def _scale(a: Coeffs, k: int) -> Coeffs:
    if not k:
        return ()
    return tuple(k * v for v in a)


def _school_mul(a: Coeffs, b: Coeffs) -> Coeffs:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def _bytes_per_slot(bits: int) -> int:
    return (bits + 8) // 8  # one spare bit for the sign of a slot


def _pack(a: Coeffs, nbytes: int) -> int:
    """Evaluate ``a`` at ``2**(8*nbytes)``; slots may hold negative values."""
    pos = b"".join((v if v > 0 else 0).to_bytes(nbytes, "little") for v in a)
    neg = b"".join((-v if v < 0 else 0).to_bytes(nbytes, "little") for v in a)
    return int.from_bytes(pos, "little") - int.from_bytes(neg, "little")


def _unpack(value: int, nbytes: int, nslots: int) -> list[int]:
    """Inverse of :func:`_pack` for balanced digits of magnitude < 2**(8*nbytes-1)."""
    sign = 1
    if value < 0:
        sign, value = -1, -value
    raw = value.to_bytes(nslots * nbytes, "little")
    base = 1 << (8 * nbytes)
    half = base >> 1
    out = []
    carry = 0
    for i in range(nslots):
        d = int.from_bytes(raw[i * nbytes:(i + 1) * nbytes], "little") + carry
        if d >= half:
            d -= base
            carry = 1
        else:
            carry = 0
        out.append(sign * d)
    if carry:
        raise OverflowError("Kronecker slot width too small")
    return out


def _bigmul(x: int, y: int) -> int:
    if _mpz is not None:
        return int(_mpz(x) * _mpz(y))
    return x * y


def _bigdivmod(x: int, y: int) -> tuple[int, int]:
    if _mpz is not None:
        q, r = divmod(_mpz(x), _mpz(y))
        return int(q), int(r)
    return divmod(x, y)


def _maxabs(a: Coeffs) -> int:
    return max(max(a), -min(a))


def _mul(a: Coeffs, b: Coeffs) -> Coeffs:
    if not a or not b:
        return ()
    if min(len(a), len(b)) < _KRONECKER_MIN:
        return _school_mul(a, b)
    bound = _maxabs(a) * _maxabs(b) * min(len(a), len(b))
    nb = _bytes_per_slot(bound.bit_length())
    prod = _bigmul(_pack(a, nb), _pack(b, nb))
    return _trim(_unpack(prod, nb, len(a) + len(b) - 1))


def _school_divexact(a: Coeffs, b: Coeffs) -> Coeffs:
    rem = list(a)
    lb = b[-1]
    db = len(b) - 1
    q = [0] * (len(a) - db)
    for k in range(len(q) - 1, -1, -1):
        top = rem[k + db]
        if not top:
            continue
        c, r = divmod(top, lb)
        if r:
            raise NotDivisible("leading coefficient does not divide")
        q[k] = c
        for j, v in enumerate(b):
            rem[k + j] -= c * v
    if any(rem[:db]):
        raise NotDivisible("nonzero remainder")
    return _trim(q)


def _divexact(a: Coeffs, b: Coeffs) -> Coeffs:
    if not b:
        raise ZeroDivisionError("division by the zero polynomial")
    if not a:
        return ()
    if len(a) < len(b):
        raise NotDivisible("dividend degree below divisor degree")
    if len(b) == 1:
        lb = b[0]
        out = []
        for v in a:
            c, r = divmod(v, lb)
            if r:
                raise NotDivisible("constant divisor does not divide content")
            out.append(c)
        return tuple(out)
    nq = len(a) - len(b) + 1
    if nq < _KRONECKER_MIN and len(b) < 2 * _KRONECKER_MIN:
        return _school_divexact(a, b)
    # Mignotte: any factor q of a has |q|_inf <= 2^deg(q) * |a|_2.
    bits = _maxabs(a).bit_length() + nq + len(a).bit_length()
    nb = _bytes_per_slot(max(bits, _maxabs(b).bit_length() + 1))
    qv, rv = _bigdivmod(_pack(a, nb), _pack(b, nb))
    if rv:
        raise NotDivisible("nonzero remainder")
    q = _trim(_unpack(qv, nb, nq))
    if _mul(q, b) != a:
        raise NotDivisible("quotient check failed")
    return q


def _pseudo_rem(a: Coeffs, b: Coeffs) -> Coeffs:
    rem = list(a)
    lb = b[-1]
    db = len(b) - 1
    while len(rem) - 1 >= db and rem:
        top = rem[-1]
        shift = len(rem) - 1 - db
        rem = [lb * v for v in rem]
        for j, v in enumerate(b):
            rem[shift + j] -= top * v
        rem = list(_trim(rem))
    return tuple(rem)


def _content(a: Coeffs) -> int:
    g = 0
    for v in a:
        g = gcd(g, v)
        if g == 1:
            break
    return g


def _primitive(a: Coeffs) -> Coeffs:
    if not a:
        return ()
    g = _content(a)
    if a[-1] < 0:
        g = -g
    return tuple(v // g for v in a)


def _gcd_degree_mod(a: Coeffs, b: Coeffs, m: int) -> int:
    """Degree of gcd(a, b) over GF(m)."""
    x = [v % m for v in a]
    y = [v % m for v in b]
    x = list(_trim(x))
    y = list(_trim(y))
    while y:
        inv = pow(y[-1], -1, m)
        dy = len(y) - 1
        while len(x) - 1 >= dy and x:
            c = x[-1] * inv % m
            s = len(x) - 1 - dy
            for j, v in enumerate(y):
                x[s + j] = (x[s + j] - c * v) % m
            x = list(_trim(x))
        x, y = y, x
    return len(x) - 1


def _gcd(a: Coeffs, b: Coeffs) -> Coeffs:
    """Primitive gcd over Z (positive leading coefficient, content included)."""
    if not a:
        return _primitive(b) if not b or b[-1] > 0 else _neg(_primitive(b))
    if not b:
        return _gcd(b, a)
    cont = gcd(_content(a), _content(b))
    a, b = _primitive(a), _primitive(b)
    # Factor out the common power of R first; it is the usual shared factor.
    za = next(i for i, v in enumerate(a) if v)
    zb = next(i for i, v in enumerate(b) if v)
    z = min(za, zb)
    a, b = a[za:], b[zb:]
    if len(a) == 1 or len(b) == 1:
        return (0,) * z + (cont,)
    for m in _MODULI:
        if a[-1] % m and b[-1] % m:
            if _gcd_degree_mod(a, b, m) == 0:
                return (0,) * z + (cont,)
            break
    if len(a) < len(b):
        a, b = b, a
    while len(b) > 1:
        a, b = b, _primitive(_pseudo_rem(a, b))
    g = (1,) if b else _primitive(a)
    return (0,) * z + tuple(cont * v for v in g)


def _horner(c: Sequence[int], x):
    acc = 0
    for v in reversed(c):
        acc = acc * x + v
    return acc


def _fmt_terms(pairs: Iterable[tuple[int, int]], var: str = "R") -> str:
    parts = []
    for e, v in pairs:
        if not v:
            continue
        mag = abs(v)
        if e == 0:
            body = str(mag)
        else:
            mono = var if e == 1 else f"{var}^{e}"
            body = mono if mag == 1 else f"{mag}*{mono}"
        parts.append(("-" if v < 0 else "+", body))
    if not parts:
        return "0"
    s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        s += f" {sign} {body}"
    return s


# ---------------------------------------------------------------------------
# value types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntPoly:
    """Dense polynomial in R over the integers, ascending coefficients."""

    coeffs: Coeffs = ()

    def __post_init__(self):
        c = self.coeffs
        if not isinstance(c, tuple) or (c and not c[-1]):
            object.__setattr__(self, "coeffs", _trim(tuple(int(v) for v in c)))

    @classmethod
    def monomial(cls, coeff: int, exp: int) -> "IntPoly":
        if exp < 0:
            raise ValueError("negative exponent in IntPoly")
        return cls((0,) * exp + (coeff,))

    @classmethod
    def const(cls, c: int) -> "IntPoly":
        return cls((c,))

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    @property
    def lc(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, k: int) -> int:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def _lift(self, other) -> Coeffs:
        if isinstance(other, IntPoly):
            return other.coeffs
        if isinstance(other, int):
            return _trim((other,))
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return IntPoly(_add(self.coeffs, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return IntPoly(_add(self.coeffs, _neg(o)))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return IntPoly(_neg(self.coeffs))

    def __mul__(self, other):
        if isinstance(other, int):
            return IntPoly(_scale(self.coeffs, other))
        if isinstance(other, IntPoly):
            return IntPoly(_mul(self.coeffs, other.coeffs))
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = IntPoly((1,))
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def shift(self, k: int) -> "IntPoly":
        """Multiply by R**k (k >= 0)."""
        if not self.coeffs or not k:
            return self
        return IntPoly((0,) * k + self.coeffs)

    def derivative(self) -> "IntPoly":
        return IntPoly(tuple(k * v for k, v in enumerate(self.coeffs))[1:])

    def content(self) -> int:
        return _content(self.coeffs)

    def __call__(self, x):
        return _horner(self.coeffs, x)

    def valuation(self):
        """Exponent of the lowest nonzero term (NEG_INF-free: zero gives 0)."""
        for i, v in enumerate(self.coeffs):
            if v:
                return i
        return 0

    def __str__(self) -> str:
        return _fmt_terms((e, v) for e, v in reversed(list(enumerate(self.coeffs))))


@dataclass(frozen=True)
class LaurentPoly:
    """Integer Laurent polynomial: ``sum coeffs[k] * R**(offset + k)``."""

    offset: int = 0
    coeffs: Coeffs = ()

    def __post_init__(self):
        c = tuple(int(v) for v in self.coeffs)
        lo = 0
        while lo < len(c) and not c[lo]:
            lo += 1
        c = _trim(c[lo:])
        off = self.offset + lo if c else 0
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "offset", off)

    @classmethod
    def from_poly(cls, p: Union[IntPoly, int], offset: int = 0) -> "LaurentPoly":
        if isinstance(p, int):
            p = IntPoly.const(p)
        return cls(offset, p.coeffs)

    @classmethod
    def monomial(cls, coeff: int, exp: int) -> "LaurentPoly":
        return cls(exp, (coeff,))

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    @property
    def min_exponent(self):
        return self.offset if self.coeffs else NEG_INF

    @property
    def max_exponent(self):
        return self.offset + len(self.coeffs) - 1 if self.coeffs else NEG_INF

    def coeff(self, e: int) -> int:
        k = e - self.offset
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def terms(self):
        """(exponent, coefficient) pairs with nonzero coefficients, ascending."""
        return [(self.offset + k, v) for k, v in enumerate(self.coeffs) if v]

    def _lift(self, other):
        if isinstance(other, LaurentPoly):
            return other
        if isinstance(other, IntPoly):
            return LaurentPoly(0, other.coeffs)
        if isinstance(other, int):
            return LaurentPoly(0, (other,))
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        if not o.coeffs:
            return self
        if not self.coeffs:
            return o
        lo = min(self.offset, o.offset)
        a = (0,) * (self.offset - lo) + self.coeffs
        b = (0,) * (o.offset - lo) + o.coeffs
        return LaurentPoly(lo, _add(a, b))

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.offset, _neg(self.coeffs))

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return LaurentPoly(self.offset, _scale(self.coeffs, other))
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return LaurentPoly(self.offset + o.offset, _mul(self.coeffs, o.coeffs))

    __rmul__ = __mul__

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by R**k for any integer k."""
        return LaurentPoly(self.offset + k, self.coeffs) if self.coeffs else self

    def derivative(self) -> "LaurentPoly":
        off = self.offset
        return LaurentPoly(off - 1, tuple((off + k) * v for k, v in enumerate(self.coeffs)))

    def is_poly(self) -> bool:
        return not self.coeffs or self.offset >= 0

    def to_poly(self) -> IntPoly:
        if not self.is_poly():
            raise ValueError(f"negative powers present (min exponent {self.offset})")
        return IntPoly(self.coeffs).shift(self.offset)

    def __call__(self, x):
        x = Fraction(x) if isinstance(x, int) else x
        v = _horner(self.coeffs, x)
        return v * x ** self.offset if self.offset >= 0 else v / x ** (-self.offset)

    def __str__(self) -> str:
        return _fmt_terms(reversed(self.terms()))


Polyish = Union[IntPoly, LaurentPoly]


def poly_arith(a: Polyish, b: Polyish, op: str) -> Polyish:
    """Ring operation ``op`` in {'add', 'sub', 'mul'} on two like-typed values."""
    if type(a) is not type(b):
        raise TypeError("operands must share a type")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def exact_div(a: IntPoly, b: IntPoly) -> IntPoly:
    """Return q with ``a == q * b``; raise NotDivisible otherwise."""
    if b.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    return IntPoly(_divexact(a.coeffs, b.coeffs))


def laurent_derivative(f: LaurentPoly) -> LaurentPoly:
    return f.derivative()


def poly_gcd(a: IntPoly, b: IntPoly) -> IntPoly:
    """Greatest common divisor over Z, normalized to positive leading coefficient."""
    return IntPoly(_gcd(a.coeffs, b.coeffs))


@dataclass(frozen=True)
class RationalFn:
    """Quotient num/den of integer polynomials in canonical form.

    Canonical means: gcd(num, den) is a constant, the integer contents share
    no common factor, and den has a positive leading coefficient.  Two
    canonical values are equal as rational functions iff their fields match.
    """

    num: IntPoly
    den: IntPoly = IntPoly((1,))

    def __post_init__(self):
        num, den = self.num, self.den
        if isinstance(num, int):
            num = IntPoly.const(num)
        if isinstance(den, int):
            den = IntPoly.const(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            num, den = IntPoly(), IntPoly((1,))
        else:
            g = _gcd(num.coeffs, den.coeffs)
            if len(g) > 1 or g[0] != 1:
                num = IntPoly(_divexact(num.coeffs, g))
                den = IntPoly(_divexact(den.coeffs, g))
            c = gcd(_content(num.coeffs), _content(den.coeffs))
            if den.lc < 0:
                c = -c
            if c != 1:
                num = IntPoly(tuple(v // c for v in num.coeffs))
                den = IntPoly(tuple(v // c for v in den.coeffs))
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @classmethod
    def from_laurent(cls, num: LaurentPoly, den: LaurentPoly) -> "RationalFn":
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            return cls(IntPoly())
        shift = num.offset - den.offset
        a = IntPoly(num.coeffs).shift(max(shift, 0))
        b = IntPoly(den.coeffs).shift(max(-shift, 0))
        return cls(a, b)

    @classmethod
    def of(cls, x: Union["RationalFn", IntPoly, LaurentPoly, int, Fraction]) -> "RationalFn":
        if isinstance(x, RationalFn):
            return x
        if isinstance(x, LaurentPoly):
            return cls.from_laurent(x, LaurentPoly(0, (1,)))
        if isinstance(x, Fraction):
            return cls(IntPoly.const(x.numerator), IntPoly.const(x.denominator))
        return cls(x)

    def __add__(self, other):
        o = RationalFn.of(other)
        return RationalFn(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFn(-self.num, self.den)

    def __sub__(self, other):
        return self + (-RationalFn.of(other))

    def __rsub__(self, other):
        return RationalFn.of(other) - self

    def __mul__(self, other):
        o = RationalFn.of(other)
        return RationalFn(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = RationalFn.of(other)
        if o.num.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RationalFn(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return RationalFn.of(other) / self

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __call__(self, x):
        if isinstance(x, int):
            x = Fraction(x)
        return self.num(x) / self.den(x)

    def __str__(self) -> str:
        if self.den.coeffs == (1,):
            return str(self.num)
        return f"({self.num}) / ({self.den})"


@dataclass(frozen=True)
class PolyMatrix:
    rows: int
    cols: int
    entries: tuple  # row-major tuple of LaurentPoly

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("matrix dimensions must be positive")
        ents = tuple(
            e if isinstance(e, LaurentPoly) else LaurentPoly.from_poly(e)
            for e in self.entries
        )
        if len(ents) != self.rows * self.cols:
            raise ValueError("entries length must equal rows * cols")
        object.__setattr__(self, "entries", ents)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "PolyMatrix":
        r = len(rows)
        c = len(rows[0])
        if any(len(row) != c for row in rows):
            raise ValueError("ragged rows")
        return cls(r, c, tuple(x for row in rows for x in row))

    def __getitem__(self, ij: tuple[int, int]) -> LaurentPoly:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self) -> list[list[LaurentPoly]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def replace_column(self, j: int, col: Sequence) -> "PolyMatrix":
        rows = self.to_rows()
        for i, v in enumerate(col):
            rows[i][j] = v
        return PolyMatrix.from_rows(rows)

    def min_exponent(self):
        exps = [e.offset for e in self.entries if e.coeffs]
        return min(exps) if exps else 0


def bareiss_det(m: PolyMatrix) -> LaurentPoly:
    """Determinant by fraction-free Bareiss elimination over Z[R].

    A global power R**s is first pulled out of every entry so that the
    elimination runs on honest integer polynomials; the factor R**(s*size)
    is restored at the end.  Each Bareiss division is exact in theory and is
    checked in practice (NotDivisible would mean a bug).
    """
    if m.rows != m.cols:
        raise NonSquare(f"{m.rows}x{m.cols} matrix has no determinant")
    n = m.rows
    s = m.min_exponent()
    a = [
        [(0,) * (e.offset - s) + e.coeffs if e.coeffs else () for e in m.row(i)]
        for i in range(n)
    ]
    sign = 1
    prev: Coeffs = (1,)
    for k in range(n - 1):
        if not a[k][k]:
            piv = next((r for r in range(k + 1, n) if a[r][k]), None)
            if piv is None:
                return LaurentPoly()
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i = a[i]
            row_k = a[k]
            for j in range(k + 1, n):
                t = _add(_mul(akk, row_i[j]), _neg(_mul(aik, row_k[j])))
                row_i[j] = _divexact(t, prev) if t and prev != (1,) else t
            row_i[k] = ()
        prev = akk
    det = a[n - 1][n - 1]
    if sign < 0:
        det = _neg(det)
    return LaurentPoly(s * n, det)


def cofactor_det(m: PolyMatrix) -> LaurentPoly:
    """Leibniz-formula determinant; an independent oracle for small matrices."""
    if m.rows != m.cols:
        raise NonSquare(f"{m.rows}x{m.cols} matrix has no determinant")
    n = m.rows
    total = LaurentPoly()
    for perm in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = LaurentPoly(0, (-1 if inv % 2 else 1,))
        for i, j in enumerate(perm):
            term = term * m[i, j]
            if not term:
                break
        total = total + term
    return total
