"""Geometric Goppa codes from the tower: the family C^(n)_{a,b}, the
eta-differential duality, self-dual rescaling, transitivity certification,
the rate/distance planner, and exhaustive minimum-distance scans.

Duality is never assumed: every dual built through the differential is
checked against the nullspace of the generator matrix, and the self-dual
rescaling is checked by G * G^T = 0.  Scaling vectors are stored separately
from the (RREF-canonical) generator matrix so that equivalence is an
explicit, invertible transformation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import (FieldElement, MatrixGFq, RatFunc, numpy_tables,
                      sqrt_in_Fq)
from .errors import (DualityCheckFailed, EtaValuationMismatch,
                     InfeasibleTarget, PlaceNotMapped, RangeError,
                     SelfDualityCheckFailed, SupportOverlap, UnsupportedLevel)
from .galois import AutMap, automorphism_group, closure_compute
from .rrspace import RRBasis, rr_space
from .tower import (Divisor, Place, TowerCtx, divisor_A, divisor_B,
                    divisor_D, genus_level, places_over, tower_make)

MIN_DISTANCE_BUDGET = 10_000_000


def thread_cap() -> int:
    """Worker-thread cap from TOWERCODES_THREADS (default: all cores)."""
    import os
    v = os.environ.get("TOWERCODES_THREADS", "").strip()
    if v:
        return max(1, int(v))
    return os.cpu_count() or 1


@dataclass
class LinearCode:
    """Evaluation code with designed parameters and optional scaling.

    G_mat is the RREF of the unscaled evaluation matrix of an RRBasis at
    place_order; the scaling vector (if any) multiplies coordinates
    pointwise and never changes weights or parameters."""

    q: int
    level: int
    N: int
    k: int
    G_mat: MatrixGFq
    designed_k_lower: int
    designed_d_lower: int
    deg_G: int
    divisor_G: Divisor
    place_order: tuple
    scaling: tuple | None = None
    meta: dict = field(default_factory=dict)

    @property
    def rate(self) -> float:
        return self.k / self.N

    def scaled_matrix(self) -> MatrixGFq:
        if self.scaling is None:
            return self.G_mat
        rows = [[c * s for c, s in zip(row, self.scaling)]
                for row in self.G_mat.rows]
        return MatrixGFq(self.G_mat.ctx, rows, ncols=self.N)

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "level": self.level,
            "N": self.N,
            "k": self.k,
            "designed_k_lower": self.designed_k_lower,
            "designed_d_lower": self.designed_d_lower,
            "deg_G": self.deg_G,
            "R": self.k / self.N,
            "place_order": [p.to_json() for p in self.place_order],
            "scaling": [s.code for s in self.scaling] if self.scaling else None,
            "generator_matrix": self.G_mat.to_codes(),
            "divisor_G": self.divisor_G.to_json(),
            "meta": dict(self.meta),
        }


def goppa_code(ctx: TowerCtx, D_places, G: Divisor, level: int,
               meta: dict | None = None) -> LinearCode:
    """C_L(D, G): evaluations of a canonical basis of L(G) at D_places."""
    D_places = tuple(D_places)
    seen = set()
    for p in D_places:
        if p in seen:
            raise SupportOverlap(f"repeated evaluation place {p!r}")
        seen.add(p)
        if G.coeff(p) != 0:
            raise SupportOverlap(f"supp(D) meets supp(G) at {p!r}")
    rr = rr_space(ctx, G, level)
    evals = rr.evaluate_at(list(D_places))
    canon, _ = evals.rref()
    k = canon.nrows
    g = genus_level(ctx, level)
    deg = G.degree()
    code = LinearCode(
        q=ctx.q, level=level, N=len(D_places), k=k, G_mat=canon,
        designed_k_lower=max(0, deg + 1 - g),
        designed_d_lower=len(D_places) - deg,
        deg_G=deg, divisor_G=G, place_order=D_places,
        meta=meta or {})
    assert code.k >= code.designed_k_lower, "Goppa dimension bound violated"
    return code


# ---------------------------------------------------------------------------
# The differential eta = dw / (1 - z) and its duality
# ---------------------------------------------------------------------------

@dataclass
class EtaForm:
    """Divisor and residues of eta = dw/(1-z) on E_n (explicit n = 1)."""

    n: int
    a: int
    b: int
    divisor: Divisor
    places: tuple
    residues: tuple
    genus: int
    a_positive_in_range: bool    # the "a_n > 0" clause holds only for n >= 2

    def to_json(self) -> dict:
        return {
            "n": self.n, "a": self.a, "b": self.b,
            "degree": self.divisor.degree(),
            "residues": [r.code for r in self.residues],
            "genus": self.genus,
            "a_positive_in_range": self.a_positive_in_range,
        }


def eta_form(ctx: TowerCtx, n: int = 1) -> EtaForm:
    """(eta) = a_n A + b_n B - D with a_n = 2(e0 - 1) and
    b_n = (l-1) e_inf - 2, and residues res_P(eta) = w(P) at every P | (z=1).

    Both the divisor identity and the residue formula are cross-checked:
    the symbolic identity w z' + z w' = 0 certifies eta = (w/z) dt/t for
    t = z - 1, deg(eta) must equal 2g - 2, and every residue must be an
    (l-1)-th root of unity."""
    if n != 1:
        raise UnsupportedLevel("eta_form explicit only at n = 1")
    report = closure_compute(ctx, 1)
    ell = ctx.ell
    a_n = 2 * (report.e0 - 1)
    b_n = (ell - 1) * report.einf - 2
    assert a_n % 2 == 0 and b_n % 2 == 0
    A, B, D = divisor_A(ctx), divisor_B(ctx), divisor_D(ctx, 0)
    div = a_n * A + b_n * B - D
    assert div.degree() == 2 * report.genus - 2
    # local form at the places over z = 1: with t = z - 1 a prime element,
    # eta = (w/z) * dt/t; the identity below is exactly that rewriting
    wp = ctx.w_rf.derivative()
    zp = ctx.z_rf.derivative()
    assert (ctx.w_rf * zp + ctx.z_rf * wp).is_zero(), \
        "eta local form identity failed"
    places = tuple(places_over(ctx, "z=1", 0))
    res = []
    for p in places:
        alpha = ctx.el(p.coords[1])
        r = (ctx.w_rf / ctx.z_rf).eval(alpha)   # w/z at a zero of z-1
        assert r == ctx.w_at(alpha)
        assert (r ** (ell - 1)).code == 1, "residue outside GF(l)^x"
        res.append(r)
    for p in places:
        assert div.coeff(p) == -1, "v_P(eta) != -1 at an evaluation place"
    return EtaForm(n=n, a=a_n, b=b_n, divisor=div, places=places,
                   residues=tuple(res), genus=report.genus,
                   a_positive_in_range=(a_n > 0))


def dual_via_eta(ctx: TowerCtx, C: LinearCode, eta: EtaForm) -> LinearCode:
    """Dual of C = C_L(D, G) as res-vector * C_L(D, D - G + (eta)).

    The returned code's scaled row space is asserted equal to the nullspace
    of C's generator matrix; disagreement raises DualityCheckFailed."""
    if C.level != 0:
        raise UnsupportedLevel("eta duality explicit at level 0 (n = 1)")
    res_by_place = dict(zip(eta.places, eta.residues))
    for p in C.place_order:
        if eta.divisor.coeff(p) != -1 or p not in res_by_place:
            raise EtaValuationMismatch(f"v_P(eta) != -1 at {p!r}")
    D_div = Divisor({p: 1 for p in C.place_order})
    H = D_div - C.divisor_G + eta.divisor
    rrH = rr_space(ctx, H, 0)
    evals = rrH.evaluate_at(list(C.place_order))
    canon, _ = evals.rref()
    scaling = tuple(res_by_place[p] for p in C.place_order)
    dual = LinearCode(
        q=C.q, level=0, N=C.N, k=canon.nrows, G_mat=canon,
        designed_k_lower=max(0, H.degree() + 1 - genus_level(ctx, 0)),
        designed_d_lower=C.N - H.degree(),
        deg_G=H.degree(), divisor_G=H, place_order=C.place_order,
        scaling=scaling,
        meta={"dual_of": dict(C.meta), "scaled_by": "eta residues"})
    oracle = C.G_mat.nullspace()
    if not dual.scaled_matrix().row_space_equals(oracle):
        raise DualityCheckFailed(
            "eta-dual row space differs from the nullspace oracle")
    assert C.k + dual.k == C.N
    return dual


def family_code(ctx: TowerCtx, n: int, a: int, b: int) -> LinearCode:
    """C^(n)_{a,b} = C_L(D^(n), a A^(n) + b B^(n)); its eta-dual identity
    (dual equals the rescaled complementary member) is asserted on the way."""
    if n != 1:
        raise UnsupportedLevel("family codes explicit at n = 1")
    eta = eta_form(ctx, 1)
    if not (0 <= a <= eta.a and 0 <= b <= eta.b):
        raise RangeError(
            f"(a, b) = ({a}, {b}) outside 0 <= a <= {eta.a}, 0 <= b <= {eta.b}")
    G = a * divisor_A(ctx) + b * divisor_B(ctx)
    C = goppa_code(ctx, eta.places, G, 0,
                   meta={"family": {"n": n, "a": a, "b": b}})
    dual = dual_via_eta(ctx, C, eta)
    # Prop-level identity: the dual's divisor is the complementary member's
    comp = (eta.a - a) * divisor_A(ctx) + (eta.b - b) * divisor_B(ctx)
    assert dual.divisor_G == comp
    C.meta["dual_params"] = {"a": eta.a - a, "b": eta.b - b}
    return C


def selfdual_scale(ctx: TowerCtx, C: LinearCode, eta: EtaForm) -> LinearCode:
    """Rescale an iso-orthogonal family code by v with v_i^2 = res_i(eta).

    At (a, b) = (a_n/2, b_n/2) the result is checked self-dual
    (G G^T = 0 and 2k = N); below the midpoint it is checked
    self-orthogonal."""
    fam = C.meta.get("family")
    if fam is None:
        raise RangeError("selfdual_scale expects a family code")
    a, b = fam["a"], fam["b"]
    if not (2 * a <= eta.a and 2 * b <= eta.b):
        raise RangeError(
            f"(a, b) = ({a}, {b}) outside the iso-orthogonal range "
            f"a <= {eta.a}/2, b <= {eta.b}/2")
    v = tuple(sqrt_in_Fq(r) for r in eta.residues)
    scaled = LinearCode(
        q=C.q, level=C.level, N=C.N, k=C.k, G_mat=C.G_mat,
        designed_k_lower=C.designed_k_lower,
        designed_d_lower=C.designed_d_lower,
        deg_G=C.deg_G, divisor_G=C.divisor_G, place_order=C.place_order,
        scaling=v, meta=dict(C.meta))
    M = scaled.scaled_matrix()
    gram = M.mul(M.transpose())
    if not gram.is_zero():
        raise SelfDualityCheckFailed("scaled code is not self-orthogonal")
    exact_half = (2 * a == eta.a and 2 * b == eta.b)
    if exact_half:
        if 2 * C.k != C.N:
            raise SelfDualityCheckFailed(
                f"midpoint code has k = {C.k} != N/2 = {C.N // 2}")
        scaled.meta["selfdual"] = True
    scaled.meta["selforthogonal"] = True
    return scaled


# ---------------------------------------------------------------------------
# Transitivity certification
# ---------------------------------------------------------------------------

@dataclass
class TransitivityCertificate:
    group: list
    perms: list                  # index permutations, one per group element
    invariant: list              # per permutation: code preserved?
    orbit: set
    transitive: bool
    all_invariant: bool

    def to_json(self) -> dict:
        return {
            "group_size": len(self.group),
            "perms": [list(p) for p in self.perms],
            "invariant": list(self.invariant),
            "orbit_size": len(self.orbit),
            "transitive": self.transitive,
            "all_invariant": self.all_invariant,
        }


def certify_transitive(ctx: TowerCtx, C: LinearCode,
                       group: list[AutMap]) -> TransitivityCertificate:
    """Induced coordinate permutations of the group, a rank test per map
    (code preserved), and orbit closure from index 0."""
    index = {p: i for i, p in enumerate(C.place_order)}
    G_supp = set(C.divisor_G.support())
    perms = []
    for sigma in group:
        for sp in G_supp:
            img = sigma.apply_place(ctx, sp)
            if img not in G_supp:
                raise PlaceNotMapped(f"supp(G) not invariant under {sigma}")
        pi = []
        for p in C.place_order:
            img = sigma.apply_place(ctx, p)
            if img not in index:
                raise PlaceNotMapped(f"{sigma} maps {p!r} outside place list")
            pi.append(index[img])
        perms.append(tuple(pi))
    M = C.scaled_matrix()
    invariant = []
    for pi in perms:
        permuted = MatrixGFq(M.ctx, [[row[pi[i]] for i in range(C.N)]
                                     for row in M.rows], ncols=C.N)
        invariant.append(M.stack(permuted).rank() == C.k)
    orbit = {0}
    frontier = [0]
    while frontier:
        i = frontier.pop()
        for pi in perms:
            j = pi[i]
            if j not in orbit:
                orbit.add(j)
                frontier.append(j)
    return TransitivityCertificate(
        group=list(group), perms=perms, invariant=invariant, orbit=orbit,
        transitive=(len(orbit) == C.N), all_invariant=all(invariant))


# ---------------------------------------------------------------------------
# Planner (Theorem-1.5 recipe)
# ---------------------------------------------------------------------------

def plan_transitive_code(q: int, delta, eps) -> dict:
    """Smallest tower level and largest Riemann-Roch multiple meeting the
    (delta, eps) target; purely arithmetic on ledger quantities.

    For n <= 2 the ledger values are computed exactly; beyond that the
    report is symbolic in t(n) (and assumes s(n) = 0 for the concrete r),
    which the paper leaves unspecified."""
    delta = Fraction(str(delta))
    eps = Fraction(str(eps))
    if delta <= 0 or eps <= 0:
        raise InfeasibleTarget("need delta > 0 and eps > 0")
    ell = _isqrt_exact(q)
    R_target = 1 - delta - Fraction(1, ell - 1)
    if R_target < 0:
        raise InfeasibleTarget(
            f"R = 1 - delta - 1/(l-1) = {R_target} is negative")
    n = 1
    while Fraction(1, ell ** n * (ell - 1)) >= eps:
        n += 1
    out = {"q": q, "ell": ell, "delta": float(delta), "eps": float(eps),
           "R_target": float(R_target), "n": n}
    if n <= 2:
        ctx = tower_make(q)
        rep = closure_compute(ctx, n)
        N = rep.degree
        deg_G0 = rep.deg_B
        g = rep.genus
        r = int((1 - delta) * N / deg_G0)
        assert Fraction(r * deg_G0, N) > 1 - delta - eps, \
            "chosen r violates the right inequality of the planner window"
        out.update({
            "symbolic": False,
            "N": N, "deg_G0": deg_G0, "genus": g, "r": r,
            "predicted_R": float(Fraction(r * deg_G0 + 1 - g, N)),
            "predicted_delta": float(1 - Fraction(r * deg_G0, N)),
        })
    else:
        # ledger-symbolic: deg_G0/N = 1/((l-1) l^n p^s); the concrete r
        # below takes s(n) = 0, everything else is independent of t(n)
        p = _char(ell)
        r = int((1 - delta) * (ell - 1) * ell ** n)
        out.update({
            "symbolic": True,
            "assumes_s_n": 0,
            "N": f"(l-1)*l^{n}*p^t({n})",
            "deg_G0": f"p^(t({n})-s({n}))",
            "r": r,
            "predicted_delta": float(1 - Fraction(r, (ell - 1) * ell ** n)),
            "predicted_R_lower": float(R_target - eps),
        })
    pr = out.get("predicted_R", out.get("predicted_R_lower"))
    assert pr >= float(R_target - eps) - 1e-12, \
        "planner failed its own rate guarantee"
    assert out["predicted_delta"] >= float(delta) - 1e-12
    return out


def _isqrt_exact(q: int) -> int:
    import math
    ell = math.isqrt(q)
    if ell * ell != q or ell < 2:
        from .errors import NonSquareQ
        raise NonSquareQ(f"q = {q} is not a square")
    return ell


def _char(ell: int) -> int:
    for p in range(2, ell + 1):
        if ell % p == 0:
            return p
    raise AssertionError


# ---------------------------------------------------------------------------
# Minimum distance
# ---------------------------------------------------------------------------

@dataclass
class MinDistanceResult:
    d: int | None                # exact minimum distance when exact
    exact: bool
    d_upper: int
    d_lower: int                 # designed bound (always valid)
    scanned: int

    def to_json(self) -> dict:
        return {"d": self.d, "exact": self.exact, "d_upper": self.d_upper,
                "d_lower": self.d_lower, "scanned": self.scanned}


def min_distance(C: LinearCode, budget: int = MIN_DISTANCE_BUDGET) -> MinDistanceResult:
    """Exhaustive scan over all q^k codewords when q^k <= budget (vectorized
    meet-in-the-middle over GF(p)-digit planes); otherwise the designed
    lower bound plus the best upper bound from low-weight messages."""
    import numpy as np
    ctx = C.G_mat.ctx
    q, k, N = C.q, C.k, C.N
    designed = max(1, C.designed_d_lower)
    if k == 0:
        return MinDistanceResult(d=None, exact=False, d_upper=N,
                                 d_lower=designed, scanned=0)
    add, mul, planes = numpy_tables(ctx.p, ctx.m)
    G = np.array(C.G_mat.to_codes(), dtype=np.uint8)
    if q ** k <= budget:
        d = _exact_scan(np, add, mul, planes, G, q, k, N, ctx.m, ctx.p)
        assert d >= designed, "exhaustive distance fell below designed bound"
        return MinDistanceResult(d=d, exact=True, d_upper=d,
                                 d_lower=designed, scanned=q ** k)
    best = N
    scanned = 0
    for i in range(k):
        for ci in range(1, q):
            w = int(np.count_nonzero(mul[ci, G[i]]))
            best = min(best, w)
            scanned += 1
    for i in range(k):
        for j in range(i + 1, k):
            for ci in range(1, q):
                rowi = mul[ci, G[i]]
                for cj in range(1, q):
                    w = int(np.count_nonzero(add[rowi, mul[cj, G[j]]]))
                    best = min(best, w)
                    scanned += 1
    if best == designed:
        # pinched between the designed bound and a found word: exact
        return MinDistanceResult(d=best, exact=True, d_upper=best,
                                 d_lower=designed, scanned=scanned)
    return MinDistanceResult(d=None, exact=False, d_upper=best,
                             d_lower=designed, scanned=scanned)


def _exact_scan(np, add, mul, planes, G, q, k, N, m, p):
    """Minimum weight over all nonzero combinations of the rows of G.

    Meet-in-the-middle over GF(p)-digit planes; the block loop may fan out
    over worker threads (capped by TOWERCODES_THREADS) with a min-reduction,
    so the result is independent of the parallelism degree."""
    k1 = min(k, 6)
    k2 = k - k1
    T1 = _all_combinations(np, add, mul, G[:k1], q, N)       # (q^k1, N)
    D1 = planes[T1].astype(np.uint8)                          # (q^k1, N, m)
    if k2 == 0:
        w = _weights(np, D1)
        return int(w[w > 0].min())
    T2 = _all_combinations(np, add, mul, G[k1:], q, N)

    def block_min(idx):
        D2 = planes[T2[idx]].astype(np.uint8)                 # (N, m)
        S = (D1 + D2[None, :, :]) % p
        w = _weights(np, S)
        if idx == 0:
            w = w[1:]                                          # drop the zero word
        return int(w.min()) if w.size else N

    workers = thread_cap()
    if workers > 1 and T2.shape[0] >= 4:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return min(pool.map(block_min, range(T2.shape[0])))
    return min(block_min(i) for i in range(T2.shape[0]))


def _all_combinations(np, add, mul, rows, q, N):
    """Codeword table of all q^r combinations of the given rows (codes)."""
    T = np.zeros((1, N), dtype=np.uint8)
    for r in range(rows.shape[0]):
        scaled = mul[:, rows[r]]                               # (q, N)
        T = add[T[:, None, :], scaled[None, :, :]].reshape(-1, N)
    return T


def _weights(np, D):
    nz = (D != 0).any(axis=-1)
    return nz.sum(axis=-1)
