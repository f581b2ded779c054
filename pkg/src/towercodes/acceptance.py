"""The acceptance suite: every constructive claim checked exactly at desk
scale, each criterion a self-contained function returning a CheckResult.

The CLI subcommand `verify all` and tests/test_acceptance.py both run
through run_acceptance(); a criterion passes only if every stated equality
holds exactly and the stated runtime budget is met.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import bounds
from .agcodes import (certify_transitive, dual_via_eta, eta_form,
                      family_code, goppa_code, min_distance, selfdual_scale)
from .galois import automorphism_group, closure_compute, verify_theorem_1_7
from .rrspace import rr_space
from .sxcodes import sx_codebook
from .tower import (Divisor, divisor_B, genus_level, infinity_place,
                    places_over, tower_make)


@dataclass
class CheckResult:
    cid: str
    description: str
    passed: bool
    stretch: bool = False
    seconds: float = 0.0
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        tag = " (stretch)" if self.stretch else ""
        return f"[{self.cid}] {status}{tag} {self.description} ({self.seconds:.2f}s)"

    def to_json(self) -> dict:
        return {"id": self.cid, "description": self.description,
                "passed": self.passed, "stretch": self.stretch,
                "seconds": round(self.seconds, 3), "details": self.details}


def _run(cid, description, fn, stretch=False) -> CheckResult:
    t0 = time.time()
    try:
        ok, details = fn()
    except Exception as exc:  # a criterion failure is a result, not a crash
        ok, details = False, {"error": f"{type(exc).__name__}: {exc}"}
    return CheckResult(cid=cid, description=description, passed=ok,
                       stretch=stretch, seconds=time.time() - t0,
                       details=details)


SEMIGROUP_GENS = (3, 7, 8)      # pole orders of x0, x1(x0^2+1), x1^2(x0^2+1)


def _semigroup_counts(r_max: int) -> list[int]:
    elems = {0}
    for a in range(r_max // 3 + 1):
        for b in range(r_max // 7 + 1):
            for c in range(r_max // 8 + 1):
                v = 3 * a + 7 * b + 8 * c
                if v <= r_max:
                    elems.add(v)
    return [len([e for e in elems if e <= r]) for r in range(r_max + 1)]


def criterion_1() -> CheckResult:
    def fn():
        ctx = tower_make(9)
        rep = closure_compute(ctx, 1)
        ok = (rep.t == 0 and rep.degree == 6 and rep.deg_A == 3
              and rep.deg_B == 1 and rep.genus == 0)
        return ok, rep.to_json()
    res = _run("ACCEPT-01",
               "q=9 n=1 closure: t=0, [E1:E0]=6, degA=3, degB=1, g=0", fn)
    res.passed = res.passed and res.seconds < 1.0
    res.details["runtime_budget_s"] = 1.0
    return res


def criterion_2() -> CheckResult:
    def fn():
        ctx = tower_make(9)
        eta = eta_form(ctx, 1)
        C = family_code(ctx, 1, 0, 2)
        sd = selfdual_scale(ctx, C, eta)
        M = sd.scaled_matrix()
        gram_zero = M.mul(M.transpose()).is_zero()
        md = min_distance(sd)
        ok = (sd.N == 6 and sd.k == 3 and gram_zero
              and md.exact and md.d == 4 and md.scanned == 729
              and Fraction(sd.k, sd.N) == Fraction(1, 2))
        return ok, {"N": sd.N, "k": sd.k, "gram_zero": gram_zero,
                    "d": md.d, "scanned": md.scanned,
                    "rate": f"{sd.k}/{sd.N}"}
    return _run("ACCEPT-02",
                "q=9 self-dual [6,3]: G*G^T=0, exhaustive d=4, rate 1/2", fn)


def criterion_3() -> CheckResult:
    def fn():
        ctx = tower_make(9)
        C = family_code(ctx, 1, 0, 2)
        grp = automorphism_group(ctx, 1)
        cert = certify_transitive(ctx, C, grp)
        ok = (len(grp) == 6 and cert.transitive and cert.all_invariant)
        return ok, cert.to_json()
    return _run("ACCEPT-03",
                "6-element Gamma transitive on 6 coordinates, code preserved", fn)


def criterion_4() -> CheckResult:
    def fn():
        ctx = tower_make(9)
        eta = eta_form(ctx, 1)
        checked = []
        for b in range(eta.b + 1):
            C = family_code(ctx, 1, 0, b)      # asserts the nullspace oracle
            dual = dual_via_eta(ctx, C, eta)
            checked.append({"a": 0, "b": b, "k": C.k, "dual_k": dual.k})
        ok = len(checked) == 5 and all(c["k"] + c["dual_k"] == 6
                                       for c in checked)
        return ok, {"cases": checked}
    return _run("ACCEPT-04",
                "dual_via_eta row space = nullspace for all (0,b), b=0..4", fn)


def criterion_5() -> CheckResult:
    def fn():
        ctx = tower_make(9)
        eta = eta_form(ctx, 1)
        res_codes = [r.code for r in eta.residues]
        in_subfield = all((r ** 2).code == 1 for r in eta.residues)
        deg = eta.divisor.degree()
        rr = rr_space(ctx, 2 * divisor_B(ctx), 0)
        sums = []
        for f in rr.basis:
            for g in rr.basis:
                acc = ctx.F.zero
                for p, r in zip(eta.places, eta.residues):
                    acc = acc + r * f.evaluate(p) * g.evaluate(p)
                sums.append(acc.code)
        ok = (res_codes == [1, 1, 1, 2, 2, 2] and in_subfield
              and deg == -2 and deg == 2 * eta.genus - 2
              and len(sums) == 9 and all(s == 0 for s in sums))
        return ok, {"residues": res_codes, "deg_eta": deg,
                    "pair_sums": sums}
    return _run("ACCEPT-05",
                "residues (1,1,1,2,2,2), deg(eta)=-2=2g-2, 9 pair sums zero", fn)


def criterion_6() -> CheckResult:
    def fn():
        ctx = tower_make(9)
        g = genus_level(ctx, 1)
        pinf = infinity_place(ctx, 1)
        expected = _semigroup_counts(17)
        dims = [rr_space(ctx, Divisor({pinf: r}), 1).dim for r in range(18)]
        semigroup_ok = dims[:7] == expected[:7]
        rr_ok = all(dims[r] == r - 3 for r in range(7, 18))
        D1 = places_over(ctx, "z=1", 1)
        ratio_ok = len(D1) == 18 and len(D1) / g >= 2
        ok = g == 4 and semigroup_ok and rr_ok and ratio_ok
        return ok, {"genus": g, "dims": dims, "expected": expected,
                    "places": len(D1), "ratio": len(D1) / g}
    return _run("ACCEPT-06",
                "level-1 RR dims match semigroup <3,7,8> and r-3; 18/4 >= 2", fn)


def criterion_7(budget: int = 10_000_000) -> CheckResult:
    def fn():
        ctx = tower_make(9)
        D1 = places_over(ctx, "z=1", 1)
        pinf = infinity_place(ctx, 1)
        rows = []
        ok = True
        for r in range(8, 14):
            C = goppa_code(ctx, D1, Divisor({pinf: r}), 1)
            md = min_distance(C, budget=budget)
            k_ok = C.k == r - 3
            # d >= 18 - r: exactly measured within budget, otherwise the
            # designed Goppa bound (a theorem) certifies it; the scan's
            # best-found word must stay consistent either way
            if md.exact:
                d_ok = md.d >= 18 - r
                d_cert = "exhaustive"
            else:
                d_ok = C.designed_d_lower == 18 - r and md.d_upper >= 18 - r
                d_cert = "designed bound (scan upper bound consistent)"
            sum_ok = C.k + max(md.d or 0, md.d_lower) >= 15
            ok = ok and k_ok and d_ok and sum_ok
            rows.append({"r": r, "k": C.k, "d": md.d, "d_upper": md.d_upper,
                         "d_lower": md.d_lower, "exact": md.exact,
                         "certificate": d_cert, "scanned": md.scanned})
        return ok, {"sweep": rows, "budget": budget}
    res = _run("ACCEPT-07",
               "one-point codes r=8..13: k=r-3, d >= 18-r, k+d >= 15", fn)
    res.passed = res.passed and res.seconds < 120.0
    res.details["runtime_budget_s"] = 120.0
    return res


def criterion_8() -> CheckResult:
    def fn():
        c49 = bounds.crossover(49)
        c25 = bounds.crossover(25)
        ds = bounds.delta_star(49)
        cmp9 = bounds.improved_and_selfdual(49)
        ok = (c49["exists"]
              and not c25["exists"]
              and abs(float(ds) - 0.666632) <= 1e-5
              and cmp9["selfdual_delta"] == Fraction(1, 3)
              and cmp9["isodual_old_delta"] == Fraction(1, 4)
              and cmp9["selfdual_delta"] > cmp9["isodual_old_delta"])
        return ok, {"q49_gap": c49["max_gap"], "q49_witness": c49["witness_delta"],
                    "q25_gap": c25["max_gap"],
                    "delta_star_49": float(ds),
                    "selfdual_delta": str(cmp9["selfdual_delta"]),
                    "isodual_old_delta": str(cmp9["isodual_old_delta"])}
    return _run("ACCEPT-08",
                "bounds: q=49 crossover, q=25 none, delta*(49), l=7 comparison", fn)


def criterion_9() -> CheckResult:
    def fn():
        ctx = tower_make(9)
        P = places_over(ctx, "z=1", 0)
        H = 2 * divisor_B(ctx)
        grp = automorphism_group(ctx, 1)
        results = []
        ok = True
        for (s, t) in [(1, 1), (2, 1), (2, 2)]:
            cb = sx_codebook(ctx, H, P, s, t, group=grp)
            cons = (cb.disjoint
                    and cb.size_S == sum(c for _, c in cb.census)
                    and cb.gamma_invariant is True)
            ok = ok and cons
            results.append({"s": s, "t": t, "size_S": cb.size_S,
                            "size_C": cb.size_C, "disjoint": cb.disjoint,
                            "gamma_invariant": cb.gamma_invariant})
        return ok, {"cases": results}
    res = _run("ACCEPT-09",
               "S-X censuses (1,1),(2,1),(2,2): disjoint, Gamma-invariant", fn)
    res.passed = res.passed and res.seconds < 60.0
    res.details["runtime_budget_s"] = 60.0
    return res


def criterion_10() -> CheckResult:
    def fn():
        ctx = tower_make(9)
        rep = closure_compute(ctx, 2)
        checks = verify_theorem_1_7(ctx, [rep])
        shape = {c["item"]: c["passed"] for c in checks}
        ok = shape.get("d") and shape.get("f") and shape.get("h")
        return bool(ok), {"t2_computed": rep.t, "report": rep.to_json(),
                          "checklist": checks}
    return _run("ACCEPT-10",
                "stretch: q=9 n=2 closure computes t(2); d/f/h identities hold",
                fn, stretch=True)


def run_acceptance(q: int = 9, include_stretch: bool = False,
                   budget: int = 10_000_000) -> list[CheckResult]:
    """All primary criteria (the suite is specific to q = 9 with the bound
    checks at 25/49 built in); stretch is reported but never blocking."""
    if q != 9:
        raise ValueError("the acceptance suite is defined at q = 9")
    results = [
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(budget=budget),
        criterion_8(),
        criterion_9(),
    ]
    if include_stretch:
        results.append(criterion_10())
    return results
