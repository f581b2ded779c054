"""Bases of Riemann-Roch spaces L(G) for divisors supported on the
catalogued loci of tower levels 0 and 1.

The method is ansatz + linear algebra.  A candidate space of monomials
x0^d * x1^j * ramfactor_j(x0) / q0(x0) is cut out so that the conditions at
the infinity chain place and at the ramified places become pure degree /
divisibility bounds (the pole orders of 1, x1, ..., x1^(l-1) are distinct
mod l there), and the remaining conditions at finite split places become
linear constraints on local expansion coefficients.  The result is reduced
to RREF over the monomial order (x1-degree, then x0-degree) so the basis is
canonical.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import FieldElement, MatrixGFq, Poly, RatFunc
from .errors import UnsupportedLevel, UnsupportedLocus
from .tower import (Divisor, Place, TowerCtx, TowerFunc, genus_level,
                    infinity_place, places_over, valuation)


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


@dataclass
class Ansatz:
    """Monomial grid underlying an rr_space computation."""

    ctx: TowerCtx
    level: int
    monomials: list            # list of (j, d)
    foundations: dict          # j -> RatFunc factor (ramfactor_j / q0)
    inf_budget: int            # coefficient of the infinity place in G
    ram_budget: dict           # ram root code -> budget
    shadow_exps: dict          # shadow x0 code -> denominator exponent

    def mono_func(self, k: int) -> TowerFunc:
        j, d = self.monomials[k]
        rf = self.foundations[j] * RatFunc.from_poly(
            Poly.from_codes(self.ctx.F, [0] * d + [1]))
        if self.level == 0:
            return TowerFunc.from_rat(self.ctx, rf, 0)
        comps = [RatFunc.zero(self.ctx.F) for _ in range(self.ctx.ell)]
        comps[j] = rf
        return TowerFunc(self.ctx, 1, comps)

    def build(self, vec: list[FieldElement]) -> TowerFunc:
        if self.level == 0:
            acc = RatFunc.zero(self.ctx.F)
            for k, c in enumerate(vec):
                if not c.is_zero():
                    j, d = self.monomials[k]
                    acc = acc + self.foundations[j].scale(c) * RatFunc.from_poly(
                        Poly.from_codes(self.ctx.F, [0] * d + [1]))
            return TowerFunc.from_rat(self.ctx, acc, 0)
        comps = [RatFunc.zero(self.ctx.F) for _ in range(self.ctx.ell)]
        for k, c in enumerate(vec):
            if not c.is_zero():
                j, d = self.monomials[k]
                comps[j] = comps[j] + self.foundations[j].scale(c) * RatFunc.from_poly(
                    Poly.from_codes(self.ctx.F, [0] * d + [1]))
        return TowerFunc(self.ctx, 1, comps)

    def valuation_at_infinity(self, k: int) -> int:
        j, d = self.monomials[k]
        rf = self.foundations[j]
        v0 = rf.den.degree - rf.num.degree - d
        if self.level == 0:
            return int(v0)
        return int(self.ctx.ell * v0 - j)

    def valuation_at_ramified(self, k: int, alpha: FieldElement) -> int:
        j, d = self.monomials[k]
        va = self.foundations[j].valuation_at(alpha)
        if self.level == 0:
            return va
        return self.ctx.ell * va - j

    def coords_of(self, f: TowerFunc) -> list[FieldElement] | None:
        """Coefficient vector of f over the monomial grid, or None when f
        lies outside the span (used to embed smaller spaces canonically)."""
        index = {m: i for i, m in enumerate(self.monomials)}
        vec = [self.ctx.F.zero] * len(self.monomials)
        comps = f.comps if self.level == f.level else (f.comps[0],)
        for j, a in enumerate(comps):
            if a.is_zero():
                continue
            if j not in self.foundations:
                return None
            quot = a / self.foundations[j]
            if quot.den.degree != 0:
                return None
            for d in range(int(quot.num.degree) + 1):
                c = quot.num[d]
                if c.is_zero():
                    continue
                if (j, d) not in index:
                    return None
                vec[index[(j, d)]] = c
        return vec


@dataclass
class RRBasis:
    """Canonical basis of a Riemann-Roch space."""

    divisor: Divisor
    level: int
    basis: list                 # list of TowerFunc
    coeffs: MatrixGFq           # RREF rows over the ansatz monomials
    ansatz: Ansatz

    @property
    def dim(self) -> int:
        return len(self.basis)

    def verify(self, ctx: TowerCtx) -> bool:
        """(f) + G >= 0 for every basis element, checked by valuations at
        the support and the UnsupportedLocus guard for poles elsewhere."""
        from .tower import principal_divisor
        for f in self.basis:
            div = principal_divisor(ctx, f, self.level)
            if not (div + self.divisor).is_effective():
                return False
        return True

    def evaluate_at(self, places: list[Place]) -> MatrixGFq:
        ctx = self.ansatz.ctx
        return MatrixGFq(ctx.F,
                         [[f.evaluate(p) for p in places] for f in self.basis],
                         ncols=len(places))

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "dim": self.dim,
            "divisor": self.divisor.to_json(),
            "monomials": [list(m) for m in self.ansatz.monomials],
            "coefficients": self.coeffs.to_codes(),
        }


def _split_divisor(ctx: TowerCtx, G: Divisor, level: int):
    """(inf coefficient, ram budgets, finite places with coefficients)."""
    r_inf = 0
    ram: dict[int, int] = {c: 0 for c in ctx.ram_root_codes} if level == 1 else {}
    finite: dict[Place, int] = {}
    for place, c in G.terms.items():
        if place.level != level:
            raise UnsupportedLevel(
                f"divisor place {place!r} not at level {level}")
        if place.kind == "infinity":
            r_inf = c
        elif place.kind == "ramified":
            ram[place.coords[1]] = c
        else:
            finite[place] = c
    return r_inf, ram, finite


def _make_ansatz(ctx: TowerCtx, G: Divisor, level: int) -> Ansatz:
    F = ctx.F
    ell = ctx.ell
    r_inf, ram, finite = _split_divisor(ctx, G, level)
    shadows: dict[int, int] = {}
    for place, c in finite.items():
        code = place.coords[1]
        if code in ram:
            raise UnsupportedLocus("finite place over the ramification locus")
        shadows[code] = max(shadows.get(code, 0), c, 0)
    q0 = Poly.one(F)
    for code in sorted(shadows):
        lin = Poly(F, [-F.el(code), F.one])
        q0 = q0 * (lin ** shadows[code])
    jrange = range(1) if level == 0 else range(ell)
    monomials = []
    foundations = {}
    for j in jrange:
        rf_j = Poly.one(F)
        for code in sorted(ram):
            e_j = max(0, _ceil_div(j - ram[code], ell))
            if e_j:
                lin = Poly(F, [-F.el(code), F.one])
                rf_j = rf_j * (lin ** e_j)
        if level == 0:
            D_j = int(q0.degree) - int(rf_j.degree) + r_inf
        else:
            D_j = int(q0.degree) - int(rf_j.degree) + (r_inf - j) // ell
        if D_j < 0:
            continue
        foundations[j] = RatFunc(rf_j, q0)
        monomials.extend((j, d) for d in range(D_j + 1))
    return Ansatz(ctx=ctx, level=level, monomials=monomials,
                  foundations=foundations, inf_budget=r_inf, ram_budget=ram,
                  shadow_exps=shadows)


def _constraint_rows(ctx: TowerCtx, ansatz: Ansatz, G: Divisor):
    """Linear conditions cutting L(G) out of the ansatz span: valuation
    conditions at every place over every shadow x0 value."""
    F = ctx.F
    rows = []
    _, _, finite = _split_divisor(ctx, G, ansatz.level)
    coeff_of = {p: c for p, c in finite.items()}
    for code in sorted(ansatz.shadow_exps):
        d_alpha = ansatz.shadow_exps[code]
        alpha = F.el(code)
        fiber = places_over(ctx, ("x0", code), ansatz.level)
        shift_poly = RatFunc.from_poly(
            Poly(F, [-alpha, F.one]) ** d_alpha)
        for place in fiber:
            m_p = coeff_of.get(place, 0)
            need = d_alpha - m_p
            if need <= 0:
                continue
            if ansatz.level == 0:
                # expansion of monomial * (x-alpha)^d_alpha at alpha
                from .tower import rat_series_at
                cols = []
                for k in range(len(ansatz.monomials)):
                    j, d = ansatz.monomials[k]
                    rf = ansatz.foundations[j] * RatFunc.from_poly(
                        Poly.from_codes(F, [0] * d + [1])) * shift_poly
                    off, s = rat_series_at(rf, alpha, need)
                    assert off >= 0
                    col = [F.zero] * off + s.coeffs[:need - off] \
                        if off < need else [F.zero] * need
                    col = col + [F.zero] * (need - len(col))
                    cols.append(col)
                for t in range(need):
                    rows.append([cols[k][t] for k in range(len(cols))])
            else:
                cols = []
                for k in range(len(ansatz.monomials)):
                    mono = ansatz.mono_func(k)
                    shifted = mono * TowerFunc.from_rat(ctx, shift_poly, 1)
                    off, coeffs = shifted.series_at_split_place(place, need)
                    assert off >= 0 or all(
                        c.is_zero() for c in coeffs[:max(0, -off)]), \
                        "monomial pole exceeds the shadow budget"
                    if off < 0:
                        coeffs = coeffs[-off:]
                        off = 0
                    col = [F.zero] * off + coeffs[:need - off] \
                        if off < need else [F.zero] * need
                    col = col + [F.zero] * (need - len(col))
                    cols.append(col)
                for t in range(need):
                    rows.append([cols[k][t] for k in range(len(cols))])
    return rows


def rr_space(ctx: TowerCtx, G: Divisor, level: int) -> RRBasis:
    """Canonical basis of L(G) = {f : (f) + G >= 0}."""
    if level not in (0, 1) or level > ctx.max_level:
        raise UnsupportedLevel(f"rr_space supports levels 0..1, got {level}")
    ansatz = _make_ansatz(ctx, G, level)
    nmono = len(ansatz.monomials)
    if nmono == 0:
        return RRBasis(divisor=G, level=level, basis=[],
                       coeffs=MatrixGFq(ctx.F, [], ncols=0), ansatz=ansatz)
    rows = _constraint_rows(ctx, ansatz, G)
    if rows:
        sol = MatrixGFq(ctx.F, rows, ncols=nmono).nullspace()
    else:
        sol = MatrixGFq.identity(ctx.F, nmono)
    canon, _ = sol.rref()
    basis = [ansatz.build(row) for row in canon.rows]
    rr = RRBasis(divisor=G, level=level, basis=basis, coeffs=canon,
                 ansatz=ansatz)
    deg = G.degree()
    g = genus_level(ctx, level)
    if deg >= 2 * g - 1:
        assert rr.dim == deg + 1 - g, \
            f"Riemann-Roch violated: dim={rr.dim}, deg={deg}, g={g}"
    else:
        assert rr.dim >= max(0, deg + 1 - g)
    return rr


# ---------------------------------------------------------------------------
# Exact-order subsets  M = { x in L(G) : v_P(x) = v exactly }
# ---------------------------------------------------------------------------

@dataclass
class ExactOrderSet:
    """Description of an exact-valuation subset of a Riemann-Roch space.

    The subset is space minus the union over constraints of the kernels of
    the leading-coefficient functionals; with several constraints that union
    is not a single subspace, so membership tests and counting go through
    the functional rows (one per constraint)."""

    space: RRBasis
    constraints: list            # list of (Place, exact valuation)
    functionals: MatrixGFq       # one row per constraint, over space coords
    empty: bool

    def count(self) -> int:
        """|M| by inclusion-exclusion over constraint subsets."""
        if self.empty:
            return 0
        q = self.space.ansatz.ctx.q
        n = len(self.constraints)
        total = 0
        from itertools import combinations
        for r in range(n + 1):
            for S in combinations(range(n), r):
                rows = [self.functionals.rows[i] for i in S]
                if rows:
                    rank = MatrixGFq(self.functionals.ctx, rows,
                                     ncols=self.space.dim).rank()
                else:
                    rank = 0
                total += (-1) ** r * q ** (self.space.dim - rank)
        return total

    def accepts(self, coeff_vec) -> bool:
        """Membership test for a coefficient vector over the space basis."""
        if self.empty:
            return False
        for row in self.functionals.rows:
            acc = self.functionals.ctx.zero
            for u, c in zip(row, coeff_vec):
                acc = acc + u * c
            if acc.is_zero():
                return False
        return True


def _leading_functional(ctx: TowerCtx, rr: RRBasis, place: Place,
                        target_v: int) -> list[FieldElement]:
    """Linear functional on L(G) whose nonvanishing is v_place(x) == target_v
    (given that every x in the space already has v_place(x) >= target_v)."""
    F = ctx.F
    ans = rr.ansatz
    nm = len(ans.monomials)
    if place.kind == "infinity":
        vec = [F.zero] * nm
        for k in range(nm):
            if ans.valuation_at_infinity(k) == target_v:
                vec[k] = F.one
        return _apply_to_basis(rr, vec)
    if place.kind == "ramified":
        alpha = F.el(place.coords[1])
        vec = [F.zero] * nm
        for k in range(nm):
            if ans.valuation_at_ramified(k, alpha) == target_v:
                j, d = ans.monomials[k]
                rf = ans.foundations[j]
                va = rf.valuation_at(alpha)
                lin = Poly(F, [-alpha, F.one])
                unit = RatFunc(rf.num, lin ** va * rf.den) if va >= 0 else \
                    RatFunc(rf.num, rf.den) * RatFunc.from_poly(lin ** (-va))
                vec[k] = unit.eval(alpha) * (alpha ** d)
        return _apply_to_basis(rr, vec)
    # finite place: leading expansion coefficient at order target_v
    alpha = F.el(place.coords[1])
    shift = max(0, -target_v)
    lin = Poly(F, [-alpha, F.one])
    shift_rf = RatFunc.from_poly(lin ** shift)
    out = []
    for f in rr.basis:
        g = f * TowerFunc.from_rat(ctx, shift_rf, rr.level)
        need = target_v + shift + 1
        if rr.level == 0:
            from .tower import rat_series_at
            rf = g.comps[0]
            if rf.is_zero():
                out.append(F.zero)
                continue
            off, s = rat_series_at(rf, alpha, need)
            idx = target_v + shift
            out.append(s.coeffs[idx - off] if 0 <= idx - off < len(s.coeffs)
                       else F.zero)
        else:
            if g.is_zero():
                out.append(F.zero)
                continue
            off, coeffs = g.series_at_split_place(place, need + 4)
            idx = target_v + shift - off
            out.append(coeffs[idx] if 0 <= idx < len(coeffs) else F.zero)
    return out


def _apply_to_basis(rr: RRBasis, mono_vec) -> list[FieldElement]:
    """Pull a functional given on monomials back to the RREF basis rows."""
    out = []
    for row in rr.coeffs.rows:
        acc = rr.coeffs.ctx.zero
        for c, u in zip(row, mono_vec):
            if not c.is_zero() and not u.is_zero():
                acc = acc + c * u
        out.append(acc)
    return out


def rr_space_with_exact_orders(ctx: TowerCtx, G: Divisor, level: int,
                               constraints) -> ExactOrderSet:
    """{ x in L(G) : v_P(x) = v for each (P, v) in constraints }.

    Realized as L(G') for the capped divisor G' (coefficient at each
    constrained place lowered to -v) together with one leading-coefficient
    functional per constraint; callers enumerate or count the complement of
    the union of the functional kernels."""
    capped = G
    empty = False
    for place, v in constraints:
        have = G.coeff(place)
        if -v > have:
            empty = True
        if -v < have:
            capped = capped + Divisor({place: -v - have})
    rr = rr_space(ctx, capped, level)
    if rr.dim == 0:
        empty = empty or True if constraints else empty
        # with no room, any exact-order demand of a pole is unmeetable
        empty = True if constraints else empty
    rows = []
    for place, v in constraints:
        if empty:
            rows.append([ctx.F.zero] * rr.dim)
        else:
            rows.append(_leading_functional(ctx, rr, place, v))
    return ExactOrderSet(space=rr, constraints=list(constraints),
                         functionals=MatrixGFq(ctx.F, rows, ncols=rr.dim),
                         empty=empty)
