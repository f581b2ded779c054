"""The nonlinear codebook C(H, P, s, t): union over divisors
G = sum(m_j P_j) (t support points inside P, deg G = s) of the exact-order
sets M_H(G) = { x in L(H+G) : v_{P_j}(x) = -m_j }, pushed to words by
evaluation with zeros at supp(G).

Disjointness of the M_H(G) is checked exhaustively by embedding every
enumerated function into one common Riemann-Roch space and comparing
canonical coefficient keys; collisions of the word map phi are counted,
never assumed absent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb, log

from .algebra import numpy_tables
from .errors import (EnumerationBudgetExceeded, RangeError, SupportOverlap,
                     UnsupportedLevel)
from .galois import AutMap
from .rrspace import rr_space, rr_space_with_exact_orders
from .tower import Divisor, Place, TowerCtx, genus_level

ENUM_BUDGET = 10_000_000
PAIR_BUDGET = 100_000_000


def sx_divisors(places, s: int, t: int) -> list[Divisor]:
    """All divisors sum(m_j P_{i_j}) with t support points chosen among the
    places, all multiplicities >= 1 and total degree s.
    Count: C(N, t) * C(s-1, t-1)."""
    places = list(places)
    N = len(places)
    if not (1 <= t <= N) or s < t:
        raise RangeError(f"need 1 <= t <= {N} and s >= t; got s={s}, t={t}")
    out = []
    for subset in combinations(range(N), t):
        for cuts in combinations(range(1, s), t - 1):
            bounds = (0,) + cuts + (s,)
            mults = [bounds[i + 1] - bounds[i] for i in range(t)]
            out.append(Divisor({places[i]: m
                                for i, m in zip(subset, mults)}))
    assert len(out) == comb(N, t) * comb(s - 1, t - 1)
    return out


@dataclass
class SxCodebook:
    H: Divisor
    places: tuple
    s: int
    t: int
    level: int
    q: int
    census: list                        # [(divisor, |M_H(G)| enumerated)]
    size_S: int
    size_C: int
    codewords: set                      # set of word tuples (codes)
    disjoint: bool
    min_dist: int | None
    min_dist_exact: bool
    gamma_invariant: bool | None
    pairs_scanned: int

    @property
    def rate(self) -> float:
        if self.size_C <= 1:
            return 0.0
        return log(self.size_C, self.q) / len(self.places)

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "N": len(self.places),
            "s": self.s,
            "t": self.t,
            "deg_H": self.H.degree(),
            "per_G_census": [c for _, c in self.census],
            "size_S": self.size_S,
            "size_C": self.size_C,
            "disjoint": self.disjoint,
            "rate": self.rate,
            "min_dist": self.min_dist,
            "exact": self.min_dist_exact,
            "gamma_invariant": self.gamma_invariant,
        }


def sx_codebook(ctx: TowerCtx, H: Divisor, places, s: int, t: int,
                level: int = 0, group: list[AutMap] | None = None,
                enum_budget: int = ENUM_BUDGET,
                pair_budget: int = PAIR_BUDGET) -> SxCodebook:
    """Enumerate the codebook and its census at desk scale."""
    import numpy as np
    places = tuple(places)
    N = len(places)
    g = genus_level(ctx, level)
    if H.degree() < 2 * g - 1:
        raise RangeError(f"deg H = {H.degree()} < 2g - 1 = {2 * g - 1}")
    for p in places:
        if H.coeff(p) != 0:
            raise SupportOverlap(f"supp(H) meets the place set at {p!r}")
    divisors = sx_divisors(places, s, t)
    add, mul, _ = numpy_tables(ctx.p, ctx.F.m)
    # common superspace for exact function identity across all G
    big = H + Divisor({p: s for p in places})
    rr_big = rr_space(ctx, big, level)
    index_of = {p: i for i, p in enumerate(places)}
    seen: dict[bytes, int] = {}
    words: set[tuple] = set()
    census = []
    disjoint = True
    size_S = 0
    for gi, G in enumerate(divisors):
        eo = rr_space_with_exact_orders(
            ctx, H + G, level,
            [(p, -m) for p, m in sorted(G.terms.items(),
                                        key=lambda kv: kv[0].sort_key())])
        dim = eo.space.dim
        if ctx.q ** dim > enum_budget:
            raise EnumerationBudgetExceeded(
                f"q^dim = {ctx.q}**{dim} exceeds budget {enum_budget}")
        expected = eo.count()
        # vectorized enumeration of all coefficient vectors
        coeffs = _all_vectors(np, ctx.q, dim)
        funm = np.array(eo.functionals.to_codes(), dtype=np.uint8) \
            if eo.functionals.nrows else np.zeros((0, dim), dtype=np.uint8)
        keep = np.ones(len(coeffs), dtype=bool)
        for row in funm:
            vals = _gf_matvec(np, add, mul, coeffs, row)
            keep &= vals != 0
        if eo.empty:
            keep[:] = False
        acc = coeffs[keep]
        assert acc.shape[0] == expected, \
            f"census mismatch: enumerated {acc.shape[0]}, counted {expected}"
        census.append((G, int(acc.shape[0])))
        size_S += int(acc.shape[0])
        # canonical keys in the common superspace
        emb_rows = []
        for f in eo.space.basis:
            vec = rr_big.ansatz.coords_of(f)
            assert vec is not None, "basis escaped the common superspace"
            emb_rows.append([c.code for c in vec])
        emb = np.array(emb_rows, dtype=np.uint8) if emb_rows else \
            np.zeros((0, len(rr_big.ansatz.monomials)), dtype=np.uint8)
        keys = _gf_matmul(np, add, mul, acc, emb)
        # evaluation columns (zeros at supp G by the map phi)
        supp_idx = {index_of[p] for p in G.terms}
        keep_cols = [i for i in range(N) if i not in supp_idx]
        eval_rows = [[f.evaluate(places[i]).code for i in keep_cols]
                     for f in eo.space.basis]
        evm = np.array(eval_rows, dtype=np.uint8) if eval_rows else \
            np.zeros((0, len(keep_cols)), dtype=np.uint8)
        vals = _gf_matmul(np, add, mul, acc, evm)
        full = np.zeros((acc.shape[0], N), dtype=np.uint8)
        full[:, keep_cols] = vals
        for r in range(acc.shape[0]):
            kb = keys[r].tobytes()
            if kb in seen and seen[kb] != gi:
                disjoint = False
            seen[kb] = gi
            words.add(tuple(int(x) for x in full[r]))
    if disjoint:
        assert len(seen) == size_S
    md, exact, pairs = _codebook_min_dist(np, words, N, pair_budget)
    gamma_ok = None
    if group is not None and level == 0:
        gamma_ok = _gamma_invariant(ctx, words, places, group)
    return SxCodebook(H=H, places=places, s=s, t=t, level=level, q=ctx.q,
                      census=census, size_S=size_S, size_C=len(words),
                      codewords=words, disjoint=disjoint,
                      min_dist=md, min_dist_exact=exact,
                      gamma_invariant=gamma_ok, pairs_scanned=pairs)


def _all_vectors(np, q, dim):
    out = np.zeros((1, 0), dtype=np.uint8)
    for _ in range(dim):
        n = out.shape[0]
        rep = np.repeat(out, q, axis=0)
        col = np.tile(np.arange(q, dtype=np.uint8), n)[:, None]
        out = np.concatenate([rep, col], axis=1)
    return out


def _gf_matvec(np, add, mul, A, v):
    acc = np.zeros(A.shape[0], dtype=np.uint8)
    for i in range(A.shape[1]):
        acc = add[acc, mul[A[:, i], v[i]]]
    return acc


def _gf_matmul(np, add, mul, A, B):
    acc = np.zeros((A.shape[0], B.shape[1]), dtype=np.uint8)
    for i in range(A.shape[1]):
        acc = add[acc, mul[A[:, i]][:, B[i, :]]]
    return acc


def _codebook_min_dist(np, words, N, pair_budget):
    """Pairwise Hamming minimum; exact when the pair count fits the budget,
    otherwise a deterministic sorted-window upper bound marked non-exact."""
    n = len(words)
    if n < 2:
        return None, True, 0
    arr = np.array(sorted(words), dtype=np.uint8)
    pairs_total = n * (n - 1) // 2
    if pairs_total <= pair_budget:
        best = N
        block = max(1, min(2048, pair_budget // max(1, n)))
        for i0 in range(0, n, block):
            A = arr[i0:i0 + block]
            for j0 in range(i0, n, block):
                B = arr[j0:j0 + block]
                dist = (A[:, None, :] != B[None, :, :]).sum(axis=2)
                if i0 == j0:
                    iu = np.triu_indices(A.shape[0], k=1, m=B.shape[0])
                    vals = dist[iu]
                else:
                    vals = dist.ravel()
                if vals.size:
                    best = min(best, int(vals.min()))
        return best, True, pairs_total
    window = 64
    best = N
    pairs = 0
    for off in range(1, window + 1):
        if off >= n:
            break
        dist = (arr[:-off] != arr[off:]).sum(axis=1)
        best = min(best, int(dist.min()))
        pairs += dist.shape[0]
    return best, False, pairs


def _gamma_invariant(ctx, words, places, group):
    """Does every group permutation map the word set onto itself?"""
    import numpy as np
    index = {p: i for i, p in enumerate(places)}
    arr = np.array(sorted(words), dtype=np.uint8)
    base = {w.tobytes() for w in arr}
    for sigma in group:
        pi = [index[sigma.apply_place(ctx, p)] for p in places]
        permuted = arr[:, pi]
        if {w.tobytes() for w in permuted} != base:
            return False
    return True
