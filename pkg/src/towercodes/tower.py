"""The explicit tower  E0 = F_q(z) <= F_q(w) <= F0 = F_q(x0) <= F1 <= ...

with w = x0^l + x0, z = w^(l-1) and the recursion
x_{i+1}^l + x_{i+1} = x_i^l / (x_i^(l-1) + 1).

Levels 0 and 1 carry explicit arithmetic (the fields F0 and F1); places are
coordinate tuples down the chain, divisors are integer-weighted formal sums,
and valuations are computed by exact local expansions.  Only the loci the
constructions touch are catalogued: z=0, z=1, z=inf, rational x0 fibers and
the ramification locus x0^(l-1) + 1 = 0.  Anything else errors loudly.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

from .algebra import FieldCtx, FieldElement, Poly, RatFunc, field_make, solve_additive
from .errors import (ExpansionCapExceeded, NonSquareQ, UnsupportedLevel,
                     UnsupportedLocus, ZeroFunction)

EXPANSION_START = 8
EXPANSION_CAP = 512

_KIND_RANK = {"finite": 0, "infinity": 1, "ramified": 2}


class TowerCtx:
    """Arithmetic context of the tower over GF(q), q = l**2."""

    def __init__(self, F: FieldCtx, max_level: int = 1):
        if F.ell is None:
            raise NonSquareQ(f"tower needs q = l**2, got q = {F.q}")
        if max_level < 1:
            raise UnsupportedLevel("max_level must be >= 1")
        self.F = F
        self.q = F.q
        self.p = F.p
        self.ell = F.ell
        self.max_level = max_level
        x = RatFunc.x(F)
        self.x_rf = x
        self.w_rf = x ** self.ell + x                       # w = x0^l + x0
        self.z_rf = self.w_rf ** (self.ell - 1)             # z = w^(l-1)
        one = RatFunc.one(F)
        self.u_rf = (x ** self.ell) / (x ** (self.ell - 1) + one)
        # kernel of y -> y^l + y; these are exactly the zeros of w
        self.kernel_codes = tuple(e.code for e in solve_additive(F, F.zero))
        # roots of x^(l-1) + 1 (the wildly ramified finite locus)
        ram_poly = Poly.from_codes(F, [1] + [0] * (self.ell - 2) + [1])
        roots, cofactor = ram_poly.roots_with_multiplicity()
        if cofactor.degree > 0:
            raise UnsupportedLocus("x^(l-1)+1 does not split over GF(q)")
        self.ram_root_codes = tuple(sorted(roots))
        self._check_bookkeeping()

    def _check_bookkeeping(self):
        # recursion RHS matches the defining equation after canonicalization
        ell, F = self.ell, self.F
        assert self.u_rf.num == Poly.from_codes(F, [0] * ell + [1])
        assert self.u_rf.den == Poly.from_codes(F, [1] + [0] * (ell - 2) + [1])
        # [F0 : F_q(w)] = l and [F_q(w) : E0] = l - 1 as degree bookkeeping
        assert self.w_rf.num.degree == ell and self.w_rf.den.degree == 0
        assert self.z_rf.num.degree == ell * (ell - 1)
        assert len(self.kernel_codes) == ell
        assert len(self.ram_root_codes) == ell - 1

    def el(self, code: int) -> FieldElement:
        return self.F.el(code)

    def w_at(self, alpha: FieldElement) -> FieldElement:
        return self.w_rf.eval(alpha)

    def z_at(self, alpha: FieldElement) -> FieldElement:
        return self.z_rf.eval(alpha)

    def u_at(self, alpha: FieldElement) -> FieldElement:
        return self.u_rf.eval(alpha)

    def __repr__(self):
        return f"TowerCtx(q={self.q}, max_level={self.max_level})"


@functools.lru_cache(maxsize=None)
def tower_make(q_or_p: int, m: int | None = None, max_level: int = 1) -> TowerCtx:
    """Tower context for GF(q); accepts tower_make(q) or tower_make(p, m)."""
    if m is None:
        q = q_or_p
        p = None
        for cand in range(2, q + 1):
            if q % cand == 0:
                p = cand
                break
        mm = 0
        t = q
        while t > 1:
            if t % p:
                raise NonSquareQ(f"q = {q} is not a prime power")
            t //= p
            mm += 1
        return TowerCtx(field_make(p, mm), max_level=max_level)
    return TowerCtx(field_make(q_or_p, m), max_level=max_level)


# ---------------------------------------------------------------------------
# Places and divisors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Place:
    """A catalogued place of a tower level.

    coords holds the chain values (w, x0, ..., x_level) as integer element
    encodings; the infinity chain place has empty coords, and the ramified
    places over x0^(l-1)+1 = 0 stop at their x0 coordinate (x1 = infinity
    there).  The lexicographic sort key on (level, kind, coords) fixes the
    coordinate order of every divisor and code built downstream.
    """

    level: int
    kind: str                       # "finite" | "infinity" | "ramified"
    coords: tuple[int, ...]
    locus: str
    degree: int = 1
    e_profile: tuple[int, ...] = ()
    d_profile: tuple[int, ...] = ()

    def sort_key(self):
        return (self.level, _KIND_RANK[self.kind], self.coords)

    def __eq__(self, other):
        return (isinstance(other, Place)
                and (self.level, self.kind, self.coords)
                == (other.level, other.kind, other.coords))

    def __hash__(self):
        return hash((self.level, self.kind, self.coords))

    @property
    def x0_code(self) -> int | None:
        return self.coords[1] if len(self.coords) >= 2 else None

    @property
    def x1_code(self) -> int | None:
        return self.coords[2] if len(self.coords) >= 3 else None

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "kind": self.kind,
            "coords": list(self.coords),
            "locus": self.locus,
            "degree": self.degree,
            "e_profile": list(self.e_profile),
            "d_profile": list(self.d_profile),
        }

    def __repr__(self):
        return f"Place(L{self.level},{self.kind},{self.coords})"


class Divisor:
    """Finite formal integer combination of places."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[Place, int] | None = None):
        self.terms = {p: c for p, c in (terms or {}).items() if c != 0}

    @classmethod
    def of(cls, *pairs) -> "Divisor":
        d: dict[Place, int] = {}
        for place, c in pairs:
            d[place] = d.get(place, 0) + c
        return cls(d)

    def coeff(self, place: Place) -> int:
        return self.terms.get(place, 0)

    def support(self) -> list[Place]:
        return sorted(self.terms, key=Place.sort_key)

    def degree(self) -> int:
        return sum(c * p.degree for p, c in self.terms.items())

    def is_effective(self) -> bool:
        return all(c >= 0 for c in self.terms.values())

    def __add__(self, other: "Divisor") -> "Divisor":
        d = dict(self.terms)
        for p, c in other.terms.items():
            d[p] = d.get(p, 0) + c
        return Divisor(d)

    def __sub__(self, other: "Divisor") -> "Divisor":
        d = dict(self.terms)
        for p, c in other.terms.items():
            d[p] = d.get(p, 0) - c
        return Divisor(d)

    def __neg__(self) -> "Divisor":
        return Divisor({p: -c for p, c in self.terms.items()})

    def __rmul__(self, k: int) -> "Divisor":
        return Divisor({p: k * c for p, c in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, Divisor) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def positive_part(self) -> "Divisor":
        return Divisor({p: c for p, c in self.terms.items() if c > 0})

    def negative_part(self) -> "Divisor":
        return Divisor({p: -c for p, c in self.terms.items() if c < 0})

    def to_json(self) -> list[dict]:
        out = []
        for p in self.support():
            entry = p.to_json()
            entry["coeff"] = self.terms[p]
            out.append(entry)
        return out

    def __repr__(self):
        parts = [f"{c}*{p!r}" for p, c in sorted(
            self.terms.items(), key=lambda t: t[0].sort_key())]
        return "Divisor(" + " + ".join(parts) + ")" if parts else "Divisor(0)"


# -- place constructors ------------------------------------------------------

def _finite_place0(ctx: TowerCtx, alpha: FieldElement, locus: str) -> Place:
    w = ctx.w_at(alpha)
    e_w = ctx.ell - 1 if w.is_zero() else 1      # Kummer step ramifies over z=0
    return Place(level=0, kind="finite",
                 coords=(w.code, alpha.code), locus=locus,
                 e_profile=(e_w, 1), d_profile=(e_w - 1, 0))

def _finite_place1(ctx: TowerCtx, alpha: FieldElement, xi: FieldElement,
                   locus: str) -> Place:
    w = ctx.w_at(alpha)
    e_w = ctx.ell - 1 if w.is_zero() else 1
    return Place(level=1, kind="finite",
                 coords=(w.code, alpha.code, xi.code), locus=locus,
                 e_profile=(e_w, 1, 1), d_profile=(e_w - 1, 0, 0))

def _ramified_place1(ctx: TowerCtx, alpha: FieldElement) -> Place:
    ell = ctx.ell
    return Place(level=1, kind="ramified", coords=(0, alpha.code),
                 locus="x0^(l-1)+1=0",
                 e_profile=(ell - 1, 1, ell),
                 d_profile=(ell - 2, 0, 2 * (ell - 1)))

def infinity_place(ctx: TowerCtx, level: int) -> Place:
    ell = ctx.ell
    e = (ell - 1,) + (ell,) * (level + 1)
    d = (ell - 2,) + (2 * (ell - 1),) * (level + 1)
    return Place(level=level, kind="infinity", coords=(),
                 locus="z=inf", e_profile=e, d_profile=d)


def places_over(ctx: TowerCtx, locus, level: int) -> list[Place]:
    """Rational places of F_level over the given base locus.

    locus is one of the strings "z=1", "w=0", "z=0", "w=inf", "z=inf", or a
    pair ("x0", code) for a rational x0 fiber.  Split loci are enumerated by
    iterating solve_additive up the recursion; ramified loci come back as
    catalogued places with their e/d profiles filled in.
    """
    if level not in (0, 1) or level > ctx.max_level:
        raise UnsupportedLevel(f"level {level} outside explicit support")
    F = ctx.F
    if locus in ("w=inf", "z=inf"):
        return [infinity_place(ctx, level)]
    if locus == "z=1":
        alphas = [F.el(c) for c in range(ctx.q)
                  if ctx.z_at(F.el(c)) == F.one]
        return _lift_and_sort(ctx, alphas, level, "z=1", allow_ram=False)
    if locus in ("w=0", "z=0"):
        alphas = [F.el(c) for c in ctx.kernel_codes]
        return _lift_and_sort(ctx, alphas, level, "w=0", allow_ram=True)
    if isinstance(locus, tuple) and locus[0] == "x0":
        alpha = F.el(locus[1])
        tag = f"x0={locus[1]}"
        return _lift_and_sort(ctx, [alpha], level, tag, allow_ram=True)
    raise UnsupportedLocus(f"locus {locus!r} is not catalogued")


def _lift_and_sort(ctx, alphas, level, tag, allow_ram):
    out = []
    ram = set(ctx.ram_root_codes)
    for alpha in alphas:
        if alpha.code in ram:
            if not allow_ram:
                raise UnsupportedLocus(f"{tag}: x0={alpha.code} is ramified")
            if level == 0:
                out.append(_finite_place0(ctx, alpha, tag))
            else:
                out.append(_ramified_place1(ctx, alpha))
            continue
        if level == 0:
            out.append(_finite_place0(ctx, alpha, tag))
        else:
            roots = solve_additive(ctx.F, ctx.u_at(alpha))
            if not roots:
                raise UnsupportedLocus(
                    f"{tag}: fiber over x0={alpha.code} has no rational points")
            out.extend(_finite_place1(ctx, alpha, xi, tag) for xi in roots)
    return sorted(out, key=Place.sort_key)


def divisor_A(ctx: TowerCtx) -> Divisor:
    """Reduced zero locus of w at level 0 (the divisor A at n = 1)."""
    return Divisor({p: 1 for p in places_over(ctx, "w=0", 0)})


def divisor_B(ctx: TowerCtx) -> Divisor:
    """Reduced pole locus of w at level 0 (the divisor B at n = 1)."""
    return Divisor({infinity_place(ctx, 0): 1})


def divisor_D(ctx: TowerCtx, level: int = 0) -> Divisor:
    """Sum of the places over z = 1 at the given level, in the fixed order."""
    return Divisor({p: 1 for p in places_over(ctx, "z=1", level)})


# ---------------------------------------------------------------------------
# Truncated power series over GF(q) (local expansions)
# ---------------------------------------------------------------------------

class Series:
    """Truncated power series sum(c_k t^k, k < trunc) over GF(q)."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: FieldCtx, coeffs):
        self.ctx = ctx
        self.coeffs = list(coeffs)

    @classmethod
    def zero(cls, ctx, trunc):
        return cls(ctx, [ctx.zero] * trunc)

    @property
    def trunc(self):
        return len(self.coeffs)

    def __add__(self, other):
        n = min(self.trunc, other.trunc)
        return Series(self.ctx, [self.coeffs[i] + other.coeffs[i] for i in range(n)])

    def __sub__(self, other):
        n = min(self.trunc, other.trunc)
        return Series(self.ctx, [self.coeffs[i] - other.coeffs[i] for i in range(n)])

    def __mul__(self, other):
        n = min(self.trunc, other.trunc)
        zero = self.ctx.zero
        out = [zero] * n
        for i, a in enumerate(self.coeffs[:n]):
            if a.is_zero():
                continue
            for j in range(n - i):
                b = other.coeffs[j]
                if not b.is_zero():
                    out[i + j] = out[i + j] + a * b
        return Series(self.ctx, out)

    def scale(self, c):
        return Series(self.ctx, [a * c for a in self.coeffs])

    def inverse(self):
        if self.coeffs[0].is_zero():
            raise ZeroDivisionError("series inverse needs a unit")
        n = self.trunc
        inv0 = self.coeffs[0].inverse()
        out = [self.ctx.zero] * n
        out[0] = inv0
        for k in range(1, n):
            acc = self.ctx.zero
            for i in range(1, k + 1):
                acc = acc + self.coeffs[i] * out[k - i]
            out[k] = -acc * inv0
        return Series(self.ctx, out)

    def pow(self, e: int):
        result = Series(self.ctx, [self.ctx.one] + [self.ctx.zero] * (self.trunc - 1))
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def first_nonzero(self):
        for i, c in enumerate(self.coeffs):
            if not c.is_zero():
                return i
        return None


def poly_series_at(poly: Poly, alpha: FieldElement, trunc: int) -> Series:
    tay = poly.taylor_at(alpha)
    coeffs = [tay[i] for i in range(trunc)]
    return Series(poly.ctx, coeffs)


def rat_series_at(rf: RatFunc, alpha: FieldElement, trunc: int):
    """Laurent data (offset, Series) of rf at x = alpha: rf = t^offset * S
    with S a unit series, t = x - alpha."""
    if rf.is_zero():
        raise ZeroFunction("series of the zero function")
    vn = rf.num.valuation_at(alpha)
    vd = rf.den.valuation_at(alpha)
    lin = Poly(rf.ctx, [-alpha, rf.ctx.one])
    num = rf.num
    for _ in range(vn):
        num = num // lin
    den = rf.den
    for _ in range(vd):
        den = den // lin
    s = poly_series_at(num, alpha, trunc) * poly_series_at(den, alpha, trunc).inverse()
    return vn - vd, s


def x1_series_at(ctx: TowerCtx, alpha: FieldElement, xi: FieldElement,
                 trunc: int) -> Series:
    """Series of x1 at the split place (x0 = alpha, x1 = xi), t = x0 - alpha.

    The defining equation gives x_k = U_k - x_{k/l}^l when l | k and
    x_k = U_k otherwise (Frobenius kills all cross terms)."""
    off, U = rat_series_at(ctx.u_rf, alpha, trunc)
    assert off >= 0, "x1 series requested at a pole of the recursion RHS"
    Ucoeffs = [ctx.F.zero] * off + U.coeffs[:max(0, trunc - off)]
    ell = ctx.ell
    xs = [xi]
    for k in range(1, trunc):
        c = Ucoeffs[k] if k < len(Ucoeffs) else ctx.F.zero
        if k % ell == 0:
            c = c - xs[k // ell] ** ell
        xs.append(c)
    return Series(ctx.F, xs)


# ---------------------------------------------------------------------------
# Tower functions
# ---------------------------------------------------------------------------

class TowerFunc:
    """Element of F_level: level 0 is a rational function of x0; level 1 is
    sum(a_j(x0) * x1^j, j < l) with the reduction x1^l = u - x1."""

    __slots__ = ("ctx", "level", "comps")

    def __init__(self, ctx: TowerCtx, level: int, comps):
        self.ctx = ctx
        self.level = level
        comps = tuple(comps)
        want = 1 if level == 0 else ctx.ell
        assert len(comps) == want
        self.comps = comps

    # -- constructors --------------------------------------------------------

    @classmethod
    def from_rat(cls, ctx: TowerCtx, rf: RatFunc, level: int = 0) -> "TowerFunc":
        if level == 0:
            return cls(ctx, 0, (rf,))
        zero = RatFunc.zero(ctx.F)
        return cls(ctx, 1, (rf,) + (zero,) * (ctx.ell - 1))

    @classmethod
    def constant(cls, ctx: TowerCtx, c: FieldElement, level: int = 0) -> "TowerFunc":
        return cls.from_rat(ctx, RatFunc.const(c), level)

    @classmethod
    def x0(cls, ctx: TowerCtx, level: int = 0) -> "TowerFunc":
        return cls.from_rat(ctx, ctx.x_rf, level)

    @classmethod
    def x1(cls, ctx: TowerCtx) -> "TowerFunc":
        zero = RatFunc.zero(ctx.F)
        one = RatFunc.one(ctx.F)
        comps = [zero] * ctx.ell
        comps[1] = one
        return cls(ctx, 1, comps)

    def lift(self) -> "TowerFunc":
        assert self.level == 0
        return TowerFunc.from_rat(self.ctx, self.comps[0], 1)

    # -- predicates ------------------------------------------------------------

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.comps)

    def is_constant(self) -> bool:
        if self.level == 0:
            return self.comps[0].is_constant()
        return (self.comps[0].is_constant()
                and all(c.is_zero() for c in self.comps[1:]))

    # -- arithmetic -------------------------------------------------------------

    def _coerce(self, other: "TowerFunc"):
        a, b = self, other
        if a.level < b.level:
            a = a.lift()
        elif b.level < a.level:
            b = b.lift()
        return a, b

    def __add__(self, other):
        a, b = self._coerce(other)
        return TowerFunc(a.ctx, a.level,
                         tuple(x + y for x, y in zip(a.comps, b.comps)))

    def __sub__(self, other):
        a, b = self._coerce(other)
        return TowerFunc(a.ctx, a.level,
                         tuple(x - y for x, y in zip(a.comps, b.comps)))

    def __neg__(self):
        return TowerFunc(self.ctx, self.level, tuple(-c for c in self.comps))

    def __mul__(self, other):
        a, b = self._coerce(other)
        if a.level == 0:
            return TowerFunc(a.ctx, 0, (a.comps[0] * b.comps[0],))
        ell = a.ctx.ell
        prod = [RatFunc.zero(a.ctx.F) for _ in range(2 * ell - 1)]
        for i, x in enumerate(a.comps):
            if x.is_zero():
                continue
            for j, y in enumerate(b.comps):
                if not y.is_zero():
                    prod[i + j] = prod[i + j] + x * y
        # reduce with x1^l = u - x1
        u = a.ctx.u_rf
        for k in range(2 * ell - 2, ell - 1, -1):
            c = prod[k]
            if c.is_zero():
                continue
            prod[k] = RatFunc.zero(a.ctx.F)
            prod[k - ell] = prod[k - ell] + c * u
            prod[k - ell + 1] = prod[k - ell + 1] - c
        return TowerFunc(a.ctx, 1, tuple(prod[:ell]))

    def scale(self, c: FieldElement) -> "TowerFunc":
        return TowerFunc(self.ctx, self.level,
                         tuple(rf.scale(c) for rf in self.comps))

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = TowerFunc.constant(self.ctx, self.ctx.F.one, self.level)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def mult_matrix(self) -> list[list[RatFunc]]:
        """Matrix of y -> self*y on the basis 1, x1, ..., x1^(l-1);
        column j holds the components of self * x1^j."""
        assert self.level == 1
        ell = self.ctx.ell
        cols = []
        cur = self
        x1 = TowerFunc.x1(self.ctx)
        for _ in range(ell):
            cols.append(cur.comps)
            cur = cur * x1
        return [[cols[j][i] for j in range(ell)] for i in range(ell)]

    def inverse(self) -> "TowerFunc":
        if self.is_zero():
            raise ZeroDivisionError("inverse of the zero function")
        if self.level == 0:
            return TowerFunc(self.ctx, 0, (self.comps[0].inverse(),))
        # solve (mult matrix) * g = e_0 by Gaussian elimination over GF(q)(x0)
        ell = self.ctx.ell
        F = self.ctx.F
        M = self.mult_matrix()
        rhs = [RatFunc.one(F)] + [RatFunc.zero(F)] * (ell - 1)
        rows = [M[i] + [rhs[i]] for i in range(ell)]
        for c in range(ell):
            piv = next(i for i in range(c, ell) if not rows[i][c].is_zero())
            rows[c], rows[piv] = rows[piv], rows[c]
            inv = rows[c][c].inverse()
            rows[c] = [x * inv for x in rows[c]]
            for i in range(ell):
                if i != c and not rows[i][c].is_zero():
                    f = rows[i][c]
                    rows[i] = [x - f * y for x, y in zip(rows[i], rows[c])]
        return TowerFunc(self.ctx, 1, tuple(rows[i][ell] for i in range(ell)))

    def __truediv__(self, other):
        return self * other.inverse()

    def norm(self) -> RatFunc:
        """Norm to F0 = determinant of the multiplication matrix."""
        assert self.level == 1
        ell = self.ctx.ell
        F = self.ctx.F
        rows = [list(r) for r in self.mult_matrix()]
        det = RatFunc.one(F)
        for c in range(ell):
            piv = next((i for i in range(c, ell) if not rows[i][c].is_zero()), None)
            if piv is None:
                return RatFunc.zero(F)
            if piv != c:
                rows[c], rows[piv] = rows[piv], rows[c]
                det = -det
            det = det * rows[c][c]
            inv = rows[c][c].inverse()
            for i in range(c + 1, ell):
                if not rows[i][c].is_zero():
                    f = rows[i][c] * inv
                    rows[i] = [x - f * y for x, y in zip(rows[i], rows[c])]
        return det

    def __eq__(self, other):
        if not isinstance(other, TowerFunc):
            return NotImplemented
        a, b = self._coerce(other)
        return a.comps == b.comps

    def __hash__(self):
        return hash(("TowerFunc", self.level, self.comps))

    # -- evaluation and expansion -------------------------------------------

    def evaluate(self, place: Place) -> FieldElement:
        """Value at a rational finite place (error on a pole)."""
        f = self
        if f.level == 0 and place.level == 1:
            f = f.lift()
        if place.kind != "finite" or place.level != f.level:
            raise UnsupportedLocus(f"cannot evaluate at {place!r}")
        alpha = f.ctx.el(place.coords[1])
        if f.level == 0:
            return f.comps[0].eval(alpha)
        xi = f.ctx.el(place.coords[2])
        acc = f.ctx.F.zero
        xpow = f.ctx.F.one
        for a in f.comps:
            acc = acc + a.eval(alpha) * xpow
            xpow = xpow * xi
        return acc

    def series_at_split_place(self, place: Place, trunc: int):
        """Laurent data (offset, coeff list) at a finite split level-1 place,
        local parameter t = x0 - alpha."""
        assert self.level == 1 and place.kind == "finite" and place.level == 1
        ctx = self.ctx
        alpha = ctx.el(place.coords[1])
        xi = ctx.el(place.coords[2])
        shift = max(0, max((-a.valuation_at(alpha)
                            for a in self.comps if not a.is_zero()), default=0))
        lin = Poly(ctx.F, [-alpha, ctx.F.one])
        shift_poly = RatFunc.from_poly(lin ** shift)
        x1s = x1_series_at(ctx, alpha, xi, trunc)
        total = Series.zero(ctx.F, trunc)
        xpow = Series(ctx.F, [ctx.F.one] + [ctx.F.zero] * (trunc - 1))
        for j, a in enumerate(self.comps):
            if not a.is_zero():
                off, s = rat_series_at(a * shift_poly, alpha, trunc)
                assert off >= 0
                padded = Series(ctx.F, [ctx.F.zero] * off + s.coeffs[:trunc - off])
                total = total + padded * xpow
            if j + 1 < len(self.comps):
                xpow = xpow * x1s
        return -shift, total.coeffs


def w_func(ctx: TowerCtx, level: int = 0) -> TowerFunc:
    return TowerFunc.from_rat(ctx, ctx.w_rf, level)


def z_func(ctx: TowerCtx, level: int = 0) -> TowerFunc:
    return TowerFunc.from_rat(ctx, ctx.z_rf, level)


# ---------------------------------------------------------------------------
# Valuations, principal divisors, genus
# ---------------------------------------------------------------------------

def valuation(ctx: TowerCtx, f: TowerFunc, place: Place) -> int:
    """Exact discrete valuation of f at a catalogued place.

    At the infinity-chain place and at the ramified places the pole orders
    of 1, x1, ..., x1^(l-1) are distinct mod l, so the valuation is an exact
    minimum over components; at finite split places an adaptive local
    expansion resolves the leading term.
    """
    if f.is_zero():
        raise ZeroFunction("valuation of the zero function")
    if f.level == 0 and place.level == 1:
        f = f.lift()
    if f.level != place.level:
        raise UnsupportedLevel("place and function live at different levels")
    if f.level == 0:
        rf = f.comps[0]
        if place.kind == "infinity":
            return rf.valuation_at_infinity()
        return rf.valuation_at(ctx.el(place.coords[1]))
    ell = ctx.ell
    if place.kind == "infinity":
        return min(ell * a.valuation_at_infinity() - j
                   for j, a in enumerate(f.comps) if not a.is_zero())
    if place.kind == "ramified":
        alpha = ctx.el(place.coords[1])
        return min(ell * a.valuation_at(alpha) - j
                   for j, a in enumerate(f.comps) if not a.is_zero())
    # finite split place: adaptive expansion
    trunc = EXPANSION_START
    while trunc <= EXPANSION_CAP:
        off, coeffs = f.series_at_split_place(place, trunc)
        lead = next((i for i, c in enumerate(coeffs) if not c.is_zero()), None)
        if lead is not None:
            return off + lead
        trunc *= 2
    raise ExpansionCapExceeded(
        f"no leading term within {EXPANSION_CAP} terms at {place!r}")


def _shadow_places(ctx: TowerCtx, alpha_code: int, level: int) -> list[Place]:
    """All catalogued places over x0 = alpha at the given level."""
    return places_over(ctx, ("x0", alpha_code), level)


def principal_divisor(ctx: TowerCtx, f: TowerFunc, level: int | None = None):
    """Principal divisor of f as a Divisor over catalogued places.

    Raises UnsupportedLocus when a zero or pole sits over a locus outside
    the catalogue (non-rational x0 shadow or a non-split fiber)."""
    if f.is_zero():
        raise ZeroFunction("divisor of the zero function")
    if level is None:
        level = f.level
    if f.level == 0 and level == 1:
        f = f.lift()
    if f.is_constant():
        return Divisor()
    shadows: set[int] = set()
    if f.level == 0:
        rf = f.comps[0]
        for poly in (rf.num, rf.den):
            roots, cof = poly.roots_with_multiplicity()
            if cof.degree > 0:
                raise UnsupportedLocus(
                    "zero/pole locus does not split over GF(q)")
            shadows.update(roots)
    else:
        nrm = f.norm()
        if nrm.is_zero():
            raise ZeroFunction("norm vanished for a nonzero function")
        for poly in (nrm.num, nrm.den):
            roots, cof = poly.roots_with_multiplicity()
            if cof.degree > 0:
                raise UnsupportedLocus(
                    "norm locus does not split over GF(q)")
            shadows.update(roots)
        for a in f.comps:
            roots, cof = a.den.roots_with_multiplicity()
            if cof.degree > 0:
                raise UnsupportedLocus("component pole does not split")
            shadows.update(roots)
        shadows.update(ctx.ram_root_codes)
    terms: dict[Place, int] = {}
    for code in sorted(shadows):
        for place in _shadow_places(ctx, code, f.level):
            v = valuation(ctx, f, place)
            if v:
                terms[place] = v
    pinf = infinity_place(ctx, f.level)
    v = valuation(ctx, f, pinf)
    if v:
        terms[pinf] = v
    div = Divisor(terms)
    assert div.degree() == 0, f"principal divisor degree {div.degree()} != 0"
    return div


def genus_level(ctx: TowerCtx, n: int) -> int:
    """Genus of F_n by iterated Hurwitz over the ramification catalogue."""
    if n == 0:
        return 0
    if n != 1 or n > ctx.max_level:
        raise UnsupportedLevel(f"genus only explicit for n <= 1, got {n}")
    ell = ctx.ell
    # F1/F0 has degree l, base genus 0; ramified places: infinity chain and
    # the l-1 places over x0^(l-1)+1 = 0, all totally ramified with
    # d = 2(e-1) per the Artin-Schreier catalogue.
    ram_places = [infinity_place(ctx, 1)] + [
        p for p in places_over(ctx, "w=0", 1) if p.kind == "ramified"]
    diff_deg = sum(p.d_profile[-1] * p.degree for p in ram_places)
    two_g_minus_2 = ell * (-2) + diff_deg
    assert two_g_minus_2 % 2 == 0
    return (two_g_minus_2 + 2) // 2
