"""Exact arithmetic over GF(p^m), univariate polynomials and rational
functions over it, and dense linear algebra over GF(q).

Field elements are vectors of GF(p) digits in the power basis of a monic
irreducible modulus.  The modulus is always the lexicographically least
monic irreducible of its degree (constant term compared first), so any two
runs -- or any two programs following the same convention -- agree on the
encoding.  For I/O an element is the integer sum(c_j * p**j) of its digit
vector.

All values are immutable after construction; every operation is a pure
function, so everything here is safe to share across threads.
"""

from __future__ import annotations

import functools
from typing import Iterable, Iterator, Sequence

from .errors import DegreeTooLarge, NonSquare, NotPrime

Q_CAP = 1 << 16  # desk-scale cap: exhaustive tables and scans stay feasible


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


# ---------------------------------------------------------------------------
# GF(p) polynomial helpers used only for modulus selection.
# Polynomials over GF(p) are coefficient tuples, constant term first.
# ---------------------------------------------------------------------------

def _gfp_mul(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return tuple(out)


def _gfp_mod(a, mod, p):
    a = list(a)
    dm = len(mod) - 1
    inv_lead = pow(mod[-1], p - 2, p)
    while len(a) - 1 >= dm and any(a):
        while len(a) > 1 and a[-1] == 0:
            a.pop()
        if len(a) - 1 < dm:
            break
        shift = len(a) - 1 - dm
        factor = (a[-1] * inv_lead) % p
        for i, c in enumerate(mod):
            a[shift + i] = (a[shift + i] - factor * c) % p
        while len(a) > 1 and a[-1] == 0:
            a.pop()
    return tuple(a)


def _gfp_powmod_x(e: int, mod, p):
    """x**e mod (mod) over GF(p)."""
    result = (1,)
    base = _gfp_mod((0, 1), mod, p)
    while e:
        if e & 1:
            result = _gfp_mod(_gfp_mul(result, base, p), mod, p)
        base = _gfp_mod(_gfp_mul(base, base, p), mod, p)
        e >>= 1
    return result


def _gfp_sub_x(poly, p):
    """poly - x, trimmed."""
    out = list(poly) + [0] * max(0, 2 - len(poly))
    out[1] = (out[1] - 1) % p
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return tuple(out)


def _gfp_gcd(a, b, p):
    a, b = tuple(a), tuple(b)
    while any(b):
        a, b = b, _gfp_mod(a, b, p)
    return a


def _gfp_is_irreducible(poly, p) -> bool:
    """Rabin test: x^(p^m) == x mod f, and gcd(x^(p^(m/r)) - x, f) = 1
    for every prime divisor r of m."""
    m = len(poly) - 1
    if m < 1:
        return False
    if _gfp_sub_x(_gfp_powmod_x(p ** m, poly, p), p) != (0,):
        return False
    divisors = set()
    mm = m
    r = 2
    while r * r <= mm:
        if mm % r == 0:
            divisors.add(r)
            while mm % r == 0:
                mm //= r
        r += 1
    if mm > 1:
        divisors.add(mm)
    for r in divisors:
        g = _gfp_gcd(_gfp_sub_x(_gfp_powmod_x(p ** (m // r), poly, p), p), poly, p)
        if len(g) - 1 > 0:
            return False
    return True


def _lex_least_irreducible(p: int, m: int):
    """Lexicographically least monic irreducible of degree m over GF(p),
    comparing digit tuples constant-term first."""
    if m == 1:
        return (0, 1)  # the polynomial x
    from itertools import product
    for tail in product(range(p), repeat=m):
        poly = tuple(tail) + (1,)
        if _gfp_is_irreducible(poly, p):
            return poly
    raise AssertionError("no irreducible polynomial found")  # unreachable


# ---------------------------------------------------------------------------
# Field context and elements
# ---------------------------------------------------------------------------

class FieldCtx:
    """Arithmetic context for GF(p^m).

    Elements are referenced by their integer encoding 0 <= code < q.
    Multiplication and inversion go through exp/log tables of a fixed
    primitive element (the one with the least encoding); addition is
    digit-wise mod p via a precomputed table.
    """

    def __init__(self, p: int, m: int):
        if not _is_prime(p):
            raise NotPrime(f"p={p} is not prime")
        if m < 1 or p ** m > Q_CAP:
            raise DegreeTooLarge(f"p^m = {p}**{m} exceeds the cap {Q_CAP}")
        self.p = p
        self.m = m
        self.q = p ** m
        self.modulus = _lex_least_irreducible(p, m)
        self._digits = [self._decode(c) for c in range(self.q)]
        self._add = None
        if self.q <= 4096:
            self._add = [
                [self._encode([(a + b) % p for a, b in zip(da, db)])
                 for db in self._digits]
                for da in self._digits
            ]
        self._exp, self._log, self.generator_code = self._build_tables()
        # squares: subfield GF(l) for square q
        if m % 2 == 0:
            self.ell = p ** (m // 2)
            self.subfield_codes = tuple(
                c for c in range(self.q) if self.pow_code(c, self.ell) == c)
            assert len(self.subfield_codes) == self.ell
        else:
            self.ell = None
            self.subfield_codes = None

    # -- encoding ----------------------------------------------------------

    def _decode(self, code: int):
        digits = []
        for _ in range(self.m):
            digits.append(code % self.p)
            code //= self.p
        return digits

    def _encode(self, digits) -> int:
        code = 0
        for d in reversed(digits):
            code = code * self.p + (d % self.p)
        return code

    # -- raw polynomial arithmetic on codes (used to bootstrap tables) ------

    def _mul_raw(self, a: int, b: int) -> int:
        da, db = self._digits[a], self._digits[b]
        prod = [0] * (2 * self.m - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] = (prod[i + j] + x * y) % self.p
        # reduce modulo the modulus polynomial
        for i in range(len(prod) - 1, self.m - 1, -1):
            c = prod[i]
            if c:
                prod[i] = 0
                for j, mc in enumerate(self.modulus[:-1]):
                    prod[i - self.m + j] = (prod[i - self.m + j] - c * mc) % self.p
        return self._encode(prod[:self.m])

    def _build_tables(self):
        q = self.q
        for g in range(2, q):
            seen = [False] * q
            val, order = 1, 0
            while True:
                val = self._mul_raw(val, g)
                order += 1
                if val == 1:
                    break
                if seen[val]:
                    order = -1
                    break
                seen[val] = True
            if order == q - 1:
                exp = [0] * (2 * (q - 1))
                log = [0] * q
                val = 1
                for i in range(q - 1):
                    exp[i] = val
                    log[val] = i
                    val = self._mul_raw(val, g)
                for i in range(q - 1, 2 * (q - 1)):
                    exp[i] = exp[i - (q - 1)]
                return exp, log, g
        raise AssertionError("no primitive element found")  # unreachable

    # -- code-level operations ----------------------------------------------

    def add_code(self, a: int, b: int) -> int:
        if self._add is not None:
            return self._add[a][b]
        return self._encode([(x + y) % self.p
                             for x, y in zip(self._digits[a], self._digits[b])])

    def neg_code(self, a: int) -> int:
        return self._encode([(-x) % self.p for x in self._digits[a]])

    def sub_code(self, a: int, b: int) -> int:
        return self.add_code(a, self.neg_code(b))

    def mul_code(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv_code(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in GF(q)")
        return self._exp[(self.q - 1) - self._log[a]]

    def pow_code(self, a: int, e: int) -> int:
        if a == 0:
            if e == 0:
                return 1
            if e < 0:
                raise ZeroDivisionError("0**negative")
            return 0
        le = (self._log[a] * e) % (self.q - 1)
        return self._exp[le]

    # -- public element API ---------------------------------------------------

    def el(self, code: int) -> "FieldElement":
        return FieldElement(self, code % self.q)

    def from_digits(self, digits: Sequence[int]) -> "FieldElement":
        return FieldElement(self, self._encode(list(digits) + [0] * (self.m - len(digits))))

    def from_int(self, n: int) -> "FieldElement":
        """Image of the integer n under the prime-field embedding."""
        return FieldElement(self, n % self.p)

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    def elements(self) -> Iterator["FieldElement"]:
        return (FieldElement(self, c) for c in range(self.q))

    def subfield_elements(self) -> Iterator["FieldElement"]:
        """Elements of GF(l), the fixed field of the l-power Frobenius."""
        if self.subfield_codes is None:
            raise NonSquare("q is not a square; no distinguished subfield")
        return (FieldElement(self, c) for c in self.subfield_codes)

    def trace_to_prime(self, a: "FieldElement") -> int:
        """Trace GF(q) -> GF(p), returned as an integer in [0, p)."""
        acc, cur = 0, a.code
        for _ in range(self.m):
            acc = self.add_code(acc, cur)
            cur = self.pow_code(cur, self.p)
        return self._digits[acc][0] if self.m >= 1 else acc

    def __repr__(self):
        return f"GF({self.q})"

    def __eq__(self, other):
        return isinstance(other, FieldCtx) and (self.p, self.m) == (other.p, other.m)

    def __hash__(self):
        return hash(("FieldCtx", self.p, self.m))


@functools.lru_cache(maxsize=None)
def field_make(p: int, m: int) -> FieldCtx:
    """Deterministic GF(p^m) context with the lex-least monic irreducible
    modulus.  Cached so element identity checks stay cheap."""
    return FieldCtx(p, m)


class FieldElement:
    """Element of a FieldCtx, canonical (fully reduced) at all times."""

    __slots__ = ("ctx", "code")

    def __init__(self, ctx: FieldCtx, code: int):
        self.ctx = ctx
        self.code = code

    @property
    def digits(self):
        return tuple(self.ctx._digits[self.code])

    def is_zero(self) -> bool:
        return self.code == 0

    def __add__(self, other):
        return FieldElement(self.ctx, self.ctx.add_code(self.code, other.code))

    def __sub__(self, other):
        return FieldElement(self.ctx, self.ctx.sub_code(self.code, other.code))

    def __neg__(self):
        return FieldElement(self.ctx, self.ctx.neg_code(self.code))

    def __mul__(self, other):
        return FieldElement(self.ctx, self.ctx.mul_code(self.code, other.code))

    def __truediv__(self, other):
        return FieldElement(self.ctx, self.ctx.mul_code(self.code, self.ctx.inv_code(other.code)))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.ctx, self.ctx.inv_code(self.code))

    def __pow__(self, e: int):
        return FieldElement(self.ctx, self.ctx.pow_code(self.code, e))

    def __eq__(self, other):
        return (isinstance(other, FieldElement)
                and self.code == other.code and self.ctx == other.ctx)

    def __hash__(self):
        return hash((self.ctx.q, self.code))

    def __repr__(self):
        return f"{self.code}@GF({self.ctx.q})"


def sqrt_in_Fq(a: FieldElement) -> FieldElement:
    """Square root of a nonzero square; the paper only ever needs this for
    elements of GF(l)^x inside GF(l^2), where every element is a square.

    Tie-break for odd characteristic: of the two roots +-v, return the one
    with the lexicographically smaller digit vector.  In characteristic 2
    the root is unique.
    """
    ctx = a.ctx
    if a.is_zero():
        raise NonSquare("zero has no preferred square root here")
    if ctx.p == 2:
        return a ** (ctx.q // 2)  # Frobenius inverse of squaring
    la = ctx._log[a.code]
    if la % 2 != 0:
        raise NonSquare(f"{a!r} is not a square in GF({ctx.q})")
    v = ctx.el(ctx._exp[la // 2])
    w = -v
    return v if v.digits <= w.digits else w


def solve_additive(ctx: FieldCtx, beta: FieldElement) -> list[FieldElement]:
    """All y in GF(q) with y^l + y = beta, found by GF(p)-linear algebra on
    the additive map y -> y^l + y.  Returns [] or exactly l solutions,
    sorted by integer encoding."""
    if ctx.ell is None:
        raise NonSquare("solve_additive needs q = l**2")
    ell = ctx.ell
    p, m = ctx.p, ctx.m
    # matrix of the map in the power basis, columns = images of basis vectors
    cols = []
    for j in range(m):
        e = ctx.el(p ** j)
        img = e ** ell + e
        cols.append(img.digits)
    # solve M x = beta over GF(p)
    rows = [[cols[j][i] for j in range(m)] + [beta.digits[i]] for i in range(m)]
    # Gaussian elimination mod p
    pivots = []
    r = 0
    for c in range(m):
        piv = next((i for i in range(r, m) if rows[i][c] % p), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], p - 2, p)
        rows[r] = [(x * inv) % p for x in rows[r]]
        for i in range(m):
            if i != r and rows[i][c] % p:
                f = rows[i][c]
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    # consistency
    for i in range(r, m):
        if rows[i][m] % p:
            return []
    # particular solution
    part = [0] * m
    for i, c in enumerate(pivots):
        part[c] = rows[i][m]
    # kernel basis
    free = [c for c in range(m) if c not in pivots]
    kernel = []
    for fc in free:
        vec = [0] * m
        vec[fc] = 1
        for i, c in enumerate(pivots):
            vec[c] = (-rows[i][fc]) % p
        kernel.append(vec)
    sols = set()
    # enumerate the kernel coset (size l = p^(m/2))
    from itertools import product
    for coeffs in product(range(p), repeat=len(free)):
        digs = list(part)
        for co, kv in zip(coeffs, kernel):
            digs = [(d + co * k) % p for d, k in zip(digs, kv)]
        sols.add(ctx.from_digits(digs).code)
    out = sorted(sols)
    assert len(out) in (0, ell)
    return [ctx.el(c) for c in out]


# ---------------------------------------------------------------------------
# Polynomials over GF(q)
# ---------------------------------------------------------------------------

NEG_INF = float("-inf")


class Poly:
    """Dense univariate polynomial over a FieldCtx, no trailing zeros.

    deg(0) is the float -inf sentinel so degree comparisons always work.
    """

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: FieldCtx, coeffs: Iterable[FieldElement]):
        cs = list(coeffs)
        while cs and cs[-1].is_zero():
            cs.pop()
        self.ctx = ctx
        self.coeffs = tuple(cs)

    @classmethod
    def from_codes(cls, ctx: FieldCtx, codes: Iterable[int]) -> "Poly":
        return cls(ctx, [ctx.el(c) for c in codes])

    @classmethod
    def zero(cls, ctx) -> "Poly":
        return cls(ctx, [])

    @classmethod
    def one(cls, ctx) -> "Poly":
        return cls(ctx, [ctx.one])

    @classmethod
    def x(cls, ctx) -> "Poly":
        return cls(ctx, [ctx.zero, ctx.one])

    @classmethod
    def const(cls, c: FieldElement) -> "Poly":
        return cls(c.ctx, [c])

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, i: int) -> FieldElement:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return self.ctx.zero

    def __add__(self, other: "Poly") -> "Poly":
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(self.ctx, [self[i] + other[i] for i in range(n)])

    def __sub__(self, other: "Poly") -> "Poly":
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(self.ctx, [self[i] - other[i] for i in range(n)])

    def __neg__(self) -> "Poly":
        return Poly(self.ctx, [-c for c in self.coeffs])

    def __mul__(self, other: "Poly") -> "Poly":
        if self.is_zero() or other.is_zero():
            return Poly.zero(self.ctx)
        out = [self.ctx.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(self.ctx, out)

    def scale(self, c: FieldElement) -> "Poly":
        return Poly(self.ctx, [a * c for a in self.coeffs])

    def shift_up(self, k: int) -> "Poly":
        """Multiply by x**k."""
        if self.is_zero():
            return self
        return Poly(self.ctx, [self.ctx.zero] * k + list(self.coeffs))

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        quo = [self.ctx.zero] * max(0, len(rem) - len(other.coeffs) + 1)
        inv_lead = other.coeffs[-1].inverse()
        do = len(other.coeffs) - 1
        for i in range(len(rem) - 1, do - 1, -1):
            if rem[i].is_zero():
                continue
            f = rem[i] * inv_lead
            quo[i - do] = f
            for j, b in enumerate(other.coeffs):
                rem[i - do + j] = rem[i - do + j] - f * b
        return Poly(self.ctx, quo), Poly(self.ctx, rem)

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def __pow__(self, e: int) -> "Poly":
        result = Poly.one(self.ctx)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        return self.scale(self.coeffs[-1].inverse())

    def gcd(self, other: "Poly") -> "Poly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic() if not a.is_zero() else a

    def derivative(self) -> "Poly":
        ctx = self.ctx
        return Poly(ctx, [ctx.from_int(i) * c
                          for i, c in enumerate(self.coeffs)][1:])

    def eval(self, x: FieldElement) -> FieldElement:
        acc = self.ctx.zero
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def compose_linear(self, a: FieldElement, b: FieldElement) -> "Poly":
        """p(a*x + b)."""
        ctx = self.ctx
        lin = Poly(ctx, [b, a])
        acc = Poly.zero(ctx)
        for c in reversed(self.coeffs):
            acc = acc * lin + Poly.const(c)
        return acc

    def roots_with_multiplicity(self) -> tuple[dict, "Poly"]:
        """Rational roots and their multiplicities; also returns the
        root-free cofactor (1 if the polynomial splits over GF(q))."""
        rem = self
        roots: dict[int, int] = {}
        for code in range(self.ctx.q):
            alpha = self.ctx.el(code)
            mult = 0
            while not rem.is_zero() and rem.degree >= 1 and rem.eval(alpha).is_zero():
                lin = Poly(self.ctx, [-alpha, self.ctx.one])
                q, r = rem.divmod(lin)
                if not r.is_zero():
                    break
                rem = q
                mult += 1
            if mult:
                roots[code] = mult
        return roots, rem

    def valuation_at(self, alpha: FieldElement) -> int:
        """Multiplicity of alpha as a root (0 if p(alpha) != 0)."""
        if self.is_zero():
            raise ZeroDivisionError("valuation of zero polynomial")
        v = 0
        rem = self
        lin = Poly(self.ctx, [-alpha, self.ctx.one])
        while True:
            q, r = rem.divmod(lin)
            if r.is_zero():
                v += 1
                rem = q
            else:
                return v

    def taylor_at(self, alpha: FieldElement) -> "Poly":
        """Coefficients of p(alpha + t) as a polynomial in t."""
        rem = self
        lin = Poly(self.ctx, [-alpha, self.ctx.one])
        out = []
        while not rem.is_zero():
            rem, r = rem.divmod(lin)
            out.append(r[0])
        return Poly(self.ctx, out)

    def __eq__(self, other):
        return isinstance(other, Poly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(("Poly",) + tuple(c.code for c in self.coeffs))

    def __repr__(self):
        if self.is_zero():
            return "Poly(0)"
        return "Poly(" + " + ".join(
            f"{c.code}*x^{i}" for i, c in enumerate(self.coeffs) if not c.is_zero()) + ")"


class RatFunc:
    """Rational function num/den in canonical form: den monic,
    gcd(num, den) = 1."""

    __slots__ = ("ctx", "num", "den")

    def __init__(self, num: Poly, den: Poly):
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        g = num.gcd(den)
        if not g.is_zero() and g.degree >= 1:
            num = num // g
            den = den // g
        lead = den.coeffs[-1]
        if lead.code != 1:
            inv = lead.inverse()
            num = num.scale(inv)
            den = den.scale(inv)
        self.ctx = num.ctx
        self.num = num
        self.den = den

    @classmethod
    def from_poly(cls, p: Poly) -> "RatFunc":
        return cls(p, Poly.one(p.ctx))

    @classmethod
    def const(cls, c: FieldElement) -> "RatFunc":
        return cls(Poly.const(c), Poly.one(c.ctx))

    @classmethod
    def zero(cls, ctx) -> "RatFunc":
        return cls(Poly.zero(ctx), Poly.one(ctx))

    @classmethod
    def one(cls, ctx) -> "RatFunc":
        return cls(Poly.one(ctx), Poly.one(ctx))

    @classmethod
    def x(cls, ctx) -> "RatFunc":
        return cls(Poly.x(ctx), Poly.one(ctx))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, other):
        return RatFunc(self.num * other.den + other.num * self.den,
                       self.den * other.den)

    def __sub__(self, other):
        return RatFunc(self.num * other.den - other.num * self.den,
                       self.den * other.den)

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __mul__(self, other):
        return RatFunc(self.num * other.num, self.den * other.den)

    def __truediv__(self, other):
        if other.is_zero():
            raise ZeroDivisionError("division by the zero function")
        return RatFunc(self.num * other.den, self.den * other.num)

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of the zero function")
        return RatFunc(self.den, self.num)

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = RatFunc.one(self.ctx)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def scale(self, c: FieldElement):
        return RatFunc(self.num.scale(c), self.den)

    def is_constant(self) -> bool:
        return self.den.degree == 0 and self.num.degree <= 0

    def eval(self, x: FieldElement) -> FieldElement:
        d = self.den.eval(x)
        if d.is_zero():
            raise ZeroDivisionError(f"pole at {x!r}")
        return self.num.eval(x) / d

    def has_pole_at(self, x: FieldElement) -> bool:
        return self.valuation_at(x) < 0

    def valuation_at(self, alpha: FieldElement) -> int:
        if self.is_zero():
            raise ZeroDivisionError("valuation of zero function")
        return self.num.valuation_at(alpha) - self.den.valuation_at(alpha)

    def valuation_at_infinity(self) -> int:
        if self.is_zero():
            raise ZeroDivisionError("valuation of zero function")
        return int(self.den.degree - self.num.degree)

    def derivative(self) -> "RatFunc":
        return RatFunc(self.num.derivative() * self.den
                       - self.num * self.den.derivative(),
                       self.den * self.den)

    def compose_linear(self, a: FieldElement, b: FieldElement) -> "RatFunc":
        """f(a*x + b)."""
        return RatFunc(self.num.compose_linear(a, b),
                       self.den.compose_linear(a, b))

    def __eq__(self, other):
        return (isinstance(other, RatFunc)
                and self.num == other.num and self.den == other.den)

    def __hash__(self):
        return hash(("RatFunc", self.num, self.den))

    def __repr__(self):
        return f"({self.num!r})/({self.den!r})"


# ---------------------------------------------------------------------------
# Dense matrices over GF(q)
# ---------------------------------------------------------------------------

class MatrixGFq:
    """Row-major dense matrix over GF(q) with exact Gaussian elimination."""

    __slots__ = ("ctx", "rows", "ncols")

    def __init__(self, ctx: FieldCtx, rows: Sequence[Sequence[FieldElement]],
                 ncols: int | None = None):
        self.ctx = ctx
        self.rows = [list(r) for r in rows]
        if self.rows:
            self.ncols = len(self.rows[0])
            assert all(len(r) == self.ncols for r in self.rows)
        else:
            self.ncols = 0 if ncols is None else ncols

    @classmethod
    def from_codes(cls, ctx, code_rows, ncols=None):
        return cls(ctx, [[ctx.el(c) for c in r] for r in code_rows], ncols=ncols)

    @classmethod
    def identity(cls, ctx, n):
        return cls(ctx, [[ctx.one if i == j else ctx.zero for j in range(n)]
                         for i in range(n)])

    @classmethod
    def zero(cls, ctx, nrows, ncols):
        return cls(ctx, [[ctx.zero] * ncols for _ in range(nrows)], ncols=ncols)

    @property
    def nrows(self):
        return len(self.rows)

    def to_codes(self):
        return [[c.code for c in r] for r in self.rows]

    def copy(self):
        return MatrixGFq(self.ctx, [list(r) for r in self.rows], ncols=self.ncols)

    def stack(self, other: "MatrixGFq") -> "MatrixGFq":
        assert self.ncols == other.ncols
        return MatrixGFq(self.ctx, self.rows + other.rows, ncols=self.ncols)

    def transpose(self) -> "MatrixGFq":
        return MatrixGFq(self.ctx,
                         [[self.rows[i][j] for i in range(self.nrows)]
                          for j in range(self.ncols)], ncols=self.nrows)

    def mul(self, other: "MatrixGFq") -> "MatrixGFq":
        assert self.ncols == other.nrows
        zero = self.ctx.zero
        out = []
        for r in self.rows:
            row = [zero] * other.ncols
            for k, a in enumerate(r):
                if a.is_zero():
                    continue
                orow = other.rows[k]
                for j in range(other.ncols):
                    b = orow[j]
                    if not b.is_zero():
                        row[j] = row[j] + a * b
            out.append(row)
        return MatrixGFq(self.ctx, out, ncols=other.ncols)

    def is_zero(self) -> bool:
        return all(c.is_zero() for r in self.rows for c in r)

    def rref(self) -> tuple["MatrixGFq", list[int]]:
        """Reduced row echelon form and pivot columns; zero rows dropped."""
        rows = [list(r) for r in self.rows]
        pivots = []
        r = 0
        for c in range(self.ncols):
            piv = next((i for i in range(r, len(rows)) if not rows[i][c].is_zero()), None)
            if piv is None:
                continue
            rows[r], rows[piv] = rows[piv], rows[r]
            inv = rows[r][c].inverse()
            rows[r] = [x * inv for x in rows[r]]
            for i in range(len(rows)):
                if i != r and not rows[i][c].is_zero():
                    f = rows[i][c]
                    rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
            pivots.append(c)
            r += 1
            if r == len(rows):
                break
        return MatrixGFq(self.ctx, rows[:r], ncols=self.ncols), pivots

    def rank(self) -> int:
        return len(self.rref()[1])

    def nullspace(self) -> "MatrixGFq":
        """Rows form a basis of {v : M v^T = 0}; rank + nullity = ncols."""
        R, pivots = self.rref()
        free = [c for c in range(self.ncols) if c not in pivots]
        basis = []
        for fc in free:
            vec = [self.ctx.zero] * self.ncols
            vec[fc] = self.ctx.one
            for i, pc in enumerate(pivots):
                vec[pc] = -R.rows[i][fc]
            basis.append(vec)
        return MatrixGFq(self.ctx, basis, ncols=self.ncols)

    def row_space_equals(self, other: "MatrixGFq") -> bool:
        a, _ = self.rref()
        b, _ = other.rref()
        return a.to_codes() == b.to_codes()

    def solve(self, rhs: list[FieldElement]):
        """One solution x of M x = rhs, or None."""
        aug = MatrixGFq(self.ctx,
                        [row + [rhs[i]] for i, row in enumerate(self.rows)],
                        ncols=self.ncols + 1)
        R, pivots = aug.rref()
        if self.ncols in pivots:
            return None
        x = [self.ctx.zero] * self.ncols
        for i, pc in enumerate(pivots):
            x[pc] = R.rows[i][self.ncols]
        return x

    def __repr__(self):
        return f"MatrixGFq({self.nrows}x{self.ncols} over GF({self.ctx.q}))"


def nullspace(M: MatrixGFq) -> MatrixGFq:
    return M.nullspace()


# ---------------------------------------------------------------------------
# numpy bridges (tables for vectorized scans; exactness is preserved because
# every op is a table lookup or digit arithmetic mod p)
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def numpy_tables(p: int, m: int):
    """(add, mul, digit_planes) numpy tables for GF(p^m), q <= 256."""
    import numpy as np
    ctx = field_make(p, m)
    q = ctx.q
    if q > 256:
        raise DegreeTooLarge("numpy tables capped at q <= 256")
    add = np.zeros((q, q), dtype=np.uint8)
    mul = np.zeros((q, q), dtype=np.uint8)
    for a in range(q):
        for b in range(q):
            add[a, b] = ctx.add_code(a, b)
            mul[a, b] = ctx.mul_code(a, b)
    planes = np.zeros((q, m), dtype=np.uint8)
    for a in range(q):
        planes[a] = ctx._digits[a]
    return add, mul, planes
