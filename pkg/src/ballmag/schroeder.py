"""Weighted Schroeder paths, disjoint path collections and the continued fraction.

A Schroeder path uses ascents (x, y) -> (x+1, y+1), descents
(x, y) -> (x+1, y-1) and flat steps (x, y) -> (x+2, y).  A disjoint
k-collection is a vertex-disjoint family of paths P_i = (-i, i) -> Q_i = (i, i),
i = 0..k, path 0 being the empty path at the origin; X_k is the set of them.

Paths in a disjoint family are nested (vertices live on the even sublattice,
so paths cannot cross), hence a family is disjoint as soon as each path
avoids the one directly below it.  Collections are therefore built level by
level: for every admissible path at level i we memoize the list of paths at
level i+1 that avoid it.  Weighted sums run as a transfer computation over
those lists; the streaming enumerator walks the same lists depth first.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional

from .bessel import chi
from .errors import InsufficientDepth, TooLarge
from .exactalg import IntPoly, PolyMatrix, bareiss_det

ASCENT, DESCENT, FLAT = "U", "D", "F"
K_MAX = 6
T_MAX = 12

Point = tuple  # (x, y)
Monomial = tuple  # (coefficient, exponent of R)


@dataclass(frozen=True)
class SchroederStep:
    kind: str
    start: Point

    @property
    def end(self) -> Point:
        x, y = self.start
        if self.kind == ASCENT:
            return (x + 1, y + 1)
        if self.kind == DESCENT:
            return (x + 1, y - 1)
        return (x + 2, y)


@dataclass(frozen=True)
class SchroederPath:
    start: Point
    word: str = ""

    @property
    def steps(self) -> tuple:
        out = []
        pt = self.start
        for c in self.word:
            st = SchroederStep(c, pt)
            out.append(st)
            pt = st.end
        return tuple(out)

    @property
    def vertices(self) -> tuple:
        pts = [self.start]
        for st in self.steps:
            pts.append(st.end)
        return tuple(pts)

    @property
    def end(self) -> Point:
        return self.vertices[-1]

    def max_height(self) -> int:
        return max(y for _, y in self.vertices)


@dataclass(frozen=True)
class SchroederCollection:
    k: int  # -1 is the empty collection
    paths: tuple


@dataclass(frozen=True)
class PathWeighting:
    """Step weights as monomials: ascents weigh 1, flats and descents vary.

    W0:  flat -> R, descent from height h -> h + 1
    W2:  flat -> R, descent from height h -> h - 1
    WrB: flat at level l -> delta_{l+1}, descent from height h -> alpha_h,
         with alpha = (R, 1, 2, 3, ...) and delta = (0, 0, R, R, ...).
    """

    name: str

    def descent(self, h: int) -> Monomial:
        if self.name == "W0":
            return (h + 1, 0)
        if self.name == "W2":
            return (h - 1, 0)
        if h <= 0:
            return (0, 0)
        return (1, 1) if h == 1 else (h - 1, 0)

    def flat(self, level: int) -> Monomial:
        if self.name == "WrB" and level < 2:
            return (0, 0)
        return (1, 1)

    def step(self, kind: str, y: int) -> Monomial:
        if kind == ASCENT:
            return (1, 0)
        if kind == DESCENT:
            return self.descent(y)
        return self.flat(y)


W0 = PathWeighting("W0")
W2 = PathWeighting("W2")
WRB = PathWeighting("WrB")
WEIGHTINGS = {"W0": W0, "W2": W2, "WrB": WRB}


def weigh_path(path: SchroederPath, w: PathWeighting) -> Monomial:
    coef, exp = 1, 0
    for st in path.steps:
        c, e = w.step(st.kind, st.start[1])
        coef *= c
        exp += e
        if not coef:
            return (0, 0)
    return (coef, exp)


def weight_collection(c: SchroederCollection, w: PathWeighting) -> Monomial:
    coef, exp = 1, 0
    for path in c.paths:
        pc, pe = weigh_path(path, w)
        coef *= pc
        exp += pe
    return (coef, exp) if coef else (0, 0)


def _monomials_to_poly(terms: dict) -> IntPoly:
    if not terms:
        return IntPoly()
    top = max(terms)
    return IntPoly(tuple(terms.get(e, 0) for e in range(top + 1)))


# ---------------------------------------------------------------------------
# level-by-level construction
# ---------------------------------------------------------------------------

def _paths_above(start: Point, end: Point, blocked: frozenset,
                 prune: Optional[PathWeighting] = None) -> list[SchroederPath]:
    """All Schroeder paths start -> end at height >= 0 avoiding ``blocked``.

    With ``prune`` set, steps of weight zero under that weighting are skipped.
    """
    ex, ey = end
    out: list[SchroederPath] = []
    word: list[str] = []

    def walk(x: int, y: int) -> None:
        if x == ex:
            if y == ey:
                out.append(SchroederPath(start, "".join(word)))
            return
        for kind, nx, ny in ((ASCENT, x + 1, y + 1), (DESCENT, x + 1, y - 1), (FLAT, x + 2, y)):
            if ny < 0 or nx > ex or abs(ey - ny) > ex - nx or (nx, ny) in blocked:
                continue
            if prune is not None and not prune.step(kind, y)[0]:
                continue
            word.append(kind)
            walk(nx, ny)
            word.pop()

    walk(*start)
    return out


class _Levels:
    """Admissible paths per level with memoized 'compatible path above' lists."""

    def __init__(self, base: SchroederPath, endpoints, top: int,
                 prune: Optional[PathWeighting] = None):
        self.levels: list[list[SchroederPath]] = [[base]]
        self.above: dict[SchroederPath, list[SchroederPath]] = {}
        for lvl in range(1, top + 1):
            start, end = endpoints(lvl)
            seen: dict[SchroederPath, None] = {}
            for q in self.levels[-1]:
                kids = _paths_above(start, end, frozenset(q.vertices), prune)
                self.above[q] = kids
                for r in kids:
                    seen.setdefault(r, None)
            self.levels.append(list(seen))
        for q in self.levels[-1]:
            self.above[q] = []

    def weighted_sum(self, w: PathWeighting, skip_base: bool = False) -> IntPoly:
        acc: dict[SchroederPath, dict] = {}
        base = self.levels[0][0]
        c, e = (1, 0) if skip_base else weigh_path(base, w)
        acc[base] = {e: c} if c else {}
        for lvl in range(1, len(self.levels)):
            nxt: dict[SchroederPath, dict] = {}
            for q in self.levels[lvl - 1]:
                below = acc.get(q)
                if not below:
                    continue
                for r in self.above[q]:
                    rc, re = weigh_path(r, w)
                    if not rc:
                        continue
                    slot = nxt.setdefault(r, {})
                    for ee, cc in below.items():
                        slot[ee + re] = slot.get(ee + re, 0) + cc * rc
            acc = nxt
        total: dict = {}
        for poly in acc.values():
            for ee, cc in poly.items():
                total[ee] = total.get(ee, 0) + cc
        return _monomials_to_poly({e: c for e, c in total.items() if c})

    def count(self) -> int:
        acc = {self.levels[0][0]: 1}
        for lvl in range(1, len(self.levels)):
            nxt: dict = {}
            for q in self.levels[lvl - 1]:
                n = acc.get(q, 0)
                if n:
                    for r in self.above[q]:
                        nxt[r] = nxt.get(r, 0) + n
            acc = nxt
        return sum(acc.values())

    def chains(self) -> Iterator[tuple]:
        stack = [(self.levels[0][0], 1, (self.levels[0][0],))]
        top = len(self.levels) - 1
        while stack:
            q, lvl, chain = stack.pop()
            if lvl > top:
                yield chain
                continue
            for r in reversed(self.above[q]):
                stack.append((r, lvl + 1, chain + (r,)))


@lru_cache(maxsize=None)
def _collection_levels(k: int) -> _Levels:
    return _Levels(SchroederPath((0, 0)), lambda i: ((-i, i), (i, i)), k)


def _check_k(k: int, k_max: int) -> None:
    if k > k_max:
        raise TooLarge(f"k={k} exceeds K_max={k_max}")


def enumerate_collections(k: int, k_max: int = K_MAX) -> Iterator[SchroederCollection]:
    """Stream every disjoint k-collection exactly once."""
    _check_k(k, k_max)
    if k < 0:
        yield SchroederCollection(-1, ())
        return
    for chain in _collection_levels(k).chains():
        yield SchroederCollection(k, chain)


def count_collections(k: int, k_max: int = K_MAX) -> int:
    _check_k(k, k_max)
    if k < 0:
        return 1
    return _collection_levels(k).count()


def collection_sum(k: int, w: PathWeighting, k_max: int = K_MAX) -> IntPoly:
    """Sum of w-weights over X_k (X_{-1} is one empty collection of weight 1)."""
    _check_k(k, k_max)
    if k < 0:
        return IntPoly((1,))
    return _collection_levels(k).weighted_sum(w)


def combinatorial_N(p: int, k_max: int = K_MAX) -> IntPoly:
    return collection_sum(p + 1, W2, k_max)


def combinatorial_D(p: int, k_max: int = K_MAX) -> IntPoly:
    return collection_sum(p - 1, W0, k_max)


def collection_to_json(c: SchroederCollection) -> str:
    return json.dumps({"k": c.k, "paths": [p.word for p in c.paths]})


def dump_collections(k: int, fp, k_max: int = K_MAX) -> int:
    n = 0
    for c in enumerate_collections(k, k_max):
        fp.write(collection_to_json(c) + "\n")
        n += 1
    return n


# ---------------------------------------------------------------------------
# continued fraction and path counting
# ---------------------------------------------------------------------------

def _cf_alpha(m: int) -> IntPoly:
    return IntPoly((0, 1)) if m == 1 else IntPoly((m - 1,))


def _cf_delta(m: int) -> IntPoly:
    return IntPoly((0, 1)) if m >= 3 else IntPoly()


def _series_inverse_one_minus(u: list, terms: int) -> list:
    """1 / (1 - u) for a series u with u[0] = 0."""
    g = [IntPoly((1,))]
    for n in range(1, terms):
        acc = IntPoly()
        for m in range(1, n + 1):
            if u[m]:
                acc = acc + u[m] * g[n - m]
        g.append(acc)
    return g


def cf_series(depth: int, num_terms: int) -> list[IntPoly]:
    """Series coefficients of the Thron fraction for sum_i chi_i t^i.

    The fraction is 1 / (1 - delta_1 t - alpha_1 t / (1 - delta_2 t - ...)),
    truncated after ``depth`` levels.
    """
    if num_terms < 1 or depth < 1:
        raise ValueError("depth and num_terms must be positive")
    if depth < num_terms + 1:
        raise InsufficientDepth(f"depth {depth} < num_terms + 1 = {num_terms + 1}")
    tail = [IntPoly()] * num_terms  # level depth + 1 truncated to 0
    for m in range(depth, 0, -1):
        u = [IntPoly()] * num_terms
        if num_terms > 1:
            u[1] = _cf_delta(m)
            for i in range(num_terms - 1):
                if tail[i]:
                    u[i + 1] = u[i + 1] + _cf_alpha(m) * tail[i]
        tail = _series_inverse_one_minus(u, num_terms)
    return tail


def path_count_T(i: int, w: PathWeighting = WRB) -> IntPoly:
    """Weighted count of height >= 0 Schroeder paths (0, 0) -> (2i, 0)."""
    if i > T_MAX:
        raise TooLarge(f"i={i} exceeds {T_MAX}")
    width = 2 * i
    cols: list[dict] = [dict() for _ in range(width + 1)]
    cols[0][0] = IntPoly((1,))
    for x in range(width):
        for y, val in cols[x].items():
            for kind, nx, ny in ((ASCENT, x + 1, y + 1), (DESCENT, x + 1, y - 1), (FLAT, x + 2, y)):
                if ny < 0 or nx > width or ny > width - nx:
                    continue
                c, e = w.step(kind, y)
                if not c:
                    continue
                term = (val * c).shift(e)
                cols[nx][ny] = cols[nx].get(ny, IntPoly()) + term
    return cols[width].get(0, IntPoly())


def lgv_collection_sum(k: int, shift: int, w: PathWeighting = WRB) -> IntPoly:
    """Weighted count of disjoint families U_a -> V_a, a = shift..k+shift.

    U_a = (-2a, 0), V_a = (2a, 0); heights stay >= 0.
    """
    def ends(a: int):
        return (-2 * a, 0), (2 * a, 0)

    if shift == 0:
        levels = _Levels(SchroederPath((0, 0)), ends, k, prune=w)
        return levels.weighted_sum(w)
    # lowest path is a genuine path: seed with an empty virtual base below it
    base_start, base_end = ends(shift)
    lowest = _paths_above(base_start, base_end, frozenset(), prune=w)
    total = IntPoly()
    for q in lowest:
        c, e = weigh_path(q, w)
        if not c:
            continue
        lv = _Levels(q, lambda lvl: ends(lvl + shift), k, prune=w)
        total = total + lv.weighted_sum(w)
    return total


def lgv_check(k: int, shift: int) -> bool:
    """det[T_{i+j+2 shift}] equals the enumerated WrB-weighted disjoint families."""
    if k > 3:
        raise TooLarge("lgv_check supports k <= 3")
    if shift not in (0, 1):
        raise ValueError("shift must be 0 or 1")
    m = PolyMatrix.from_rows(
        [[path_count_T(i + j + 2 * shift) for j in range(k + 1)] for i in range(k + 1)]
    )
    lhs = bareiss_det(m).to_poly()
    return lhs == lgv_collection_sum(k, shift)


def factored_identity_check(p: int, k_max: int = K_MAX) -> bool:
    """Both Hankel determinants equal their factored path-collection sums."""
    from .hankel import hankel_determinants
    from .bessel import superfactorial

    if p + 1 > k_max:
        raise TooLarge(f"p+1={p + 1} exceeds K_max={k_max}")
    top, bottom = hankel_determinants(p)
    sf = superfactorial(p)
    ok_bottom = bottom == (combinatorial_D(p, k_max) * sf).shift(p)
    ok_top = top == (combinatorial_N(p, k_max) * sf).shift(p + 1)
    return ok_bottom and ok_top


def chi_from_paths(max_index: int) -> list[IntPoly]:
    return [path_count_T(i) for i in range(max_index + 1)]


def cf_matches_chi(num_terms: int) -> bool:
    return cf_series(num_terms + 1, num_terms) == [chi(i) for i in range(num_terms)]
