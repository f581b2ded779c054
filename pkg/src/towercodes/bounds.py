"""Asymptotic bound curves and their comparisons: Gilbert-Varshamov,
Tsfasman-Vladut-Zink (with A(q) = sqrt(q) - 1 for square q), the nonlinear
improvement log_q(1 + q^-3), the delta* threshold of the transitive
nonlinear construction, and the self-dual / iso-dual delta bounds.

Rational arithmetic everywhere the formula is rational; floats only enter
through the entropy terms of GV (double precision, oracle-checked to 1e-12
against a high-precision evaluation in the test suite).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, EllTooSmall, NonSquareQ

CROSSOVER_STEP = Fraction(1, 10_000)
CROSSOVER_TOL = 1e-12


def _ell(q: int) -> int:
    ell = math.isqrt(q)
    if ell * ell != q or ell < 2:
        raise NonSquareQ(f"q = {q} is not a square")
    return ell


def gv(q: int, delta) -> float:
    """Asymptotic Gilbert-Varshamov bound
    1 - delta*log_q(q-1) + delta*log_q(delta) + (1-delta)*log_q(1-delta),
    valid on 0 < delta < 1 - 1/q."""
    d = float(delta)
    if not 0.0 < d < 1.0 - 1.0 / q:
        raise DomainError(f"delta = {d} outside (0, 1 - 1/q) for q = {q}")
    lq = math.log(q)
    return (1.0
            - d * (math.log(q - 1) / lq)
            + d * (math.log(d) / lq)
            + (1.0 - d) * (math.log1p(-d) / lq))


def tvz_fraction(q: int, delta: Fraction) -> Fraction:
    """Exact rational Tsfasman-Vladut-Zink value max(0, 1 - delta - 1/(l-1))."""
    ell = _ell(q)
    val = 1 - Fraction(delta) - Fraction(1, ell - 1)
    return val if val > 0 else Fraction(0)


def tvz(q: int, delta) -> float:
    """TVZ lower bound for square q, clamped at zero."""
    if isinstance(delta, Fraction):
        return float(tvz_fraction(q, delta))
    ell = _ell(q)
    return max(0.0, 1.0 - float(delta) - 1.0 / (ell - 1))


def sx_improved(q: int, delta) -> float:
    """TVZ plus the nonlinear gain log_q(1 + q^-3), clamped at zero."""
    ell = _ell(q)
    gain = math.log1p(q ** -3) / math.log(q)
    return max(0.0, 1.0 - float(delta) - 1.0 / (ell - 1) + gain)


def delta_star(q: int) -> Fraction:
    """Threshold 1 - 2/(l-1) - (4q-2)/((q-1)(q^3+1)) of the transitive
    nonlinear construction, as an exact rational."""
    ell = _ell(q)
    return (1 - Fraction(2, ell - 1)
            - Fraction(4 * q - 2, (q - 1) * (q ** 3 + 1)))


def selfdual_delta(q: int) -> Fraction:
    """Self-dual relative-distance bound 1/2 - 1/(l-1)."""
    ell = _ell(q)
    return Fraction(1, 2) - Fraction(1, ell - 1)


def isodual_old_delta(q: int) -> Fraction:
    """The earlier iso-dual bound 1/2 - 1/(l-3); requires l > 3."""
    ell = _ell(q)
    if ell <= 3:
        raise EllTooSmall(f"iso-dual comparison bound needs l > 3, got l = {ell}")
    return Fraction(1, 2) - Fraction(1, ell - 3)


def crossover(q: int, step: Fraction = CROSSOVER_STEP,
              tol: float = CROSSOVER_TOL) -> dict:
    """Grid search for delta with tvz - gv > tol; reports the witness of the
    maximum gap (or absence)."""
    _ell(q)
    best_gap = None
    witness = None
    d = step
    upper = Fraction(1) - Fraction(1, q)
    while d < upper:
        gap = tvz(q, d) - gv(q, d)
        if best_gap is None or gap > best_gap:
            best_gap = gap
            witness = d
        d += step
    exists = best_gap is not None and best_gap > tol
    return {
        "q": q,
        "exists": exists,
        "witness_delta": float(witness) if exists else None,
        "max_gap": best_gap,
        "step": float(step),
        "tol": tol,
    }


def improved_and_selfdual(q: int) -> dict:
    """The four section-3/4 quantities; the comparison against the old
    iso-dual bound is asserted for l > 3 and reported as skipped below."""
    ell = _ell(q)
    ds = delta_star(q)
    sd = selfdual_delta(q)
    out = {
        "q": q,
        "ell": ell,
        "sx_gain": math.log1p(q ** -3) / math.log(q),
        "delta_star": ds,
        "delta_star_float": float(ds),
        "delta_star_interval_empty": ds <= 0,
        "selfdual_delta": sd,
        "selfdual_delta_float": float(sd),
    }
    if ell > 3:
        iso = isodual_old_delta(q)
        assert sd > iso, "self-dual bound must beat the old iso-dual bound"
        out["isodual_old_delta"] = iso
        out["isodual_old_delta_float"] = float(iso)
        out["beats_isodual_old"] = True
    else:
        out["isodual_old_delta"] = None
        out["isodual_old_delta_float"] = None
        out["beats_isodual_old"] = None     # comparison needs l > 3
    return out


@dataclass
class BoundCurve:
    q: int
    kind: str                   # GV | TVZ | SX_IMPROVED | SELF_DUAL_NEW | ISO_DUAL_OLD
    grid: list                  # [(delta, value)]
    domain_note: str

    def to_rows(self):
        return [(self.kind, float(d), v) for d, v in self.grid]


_CURVE_FUNCS = {
    "GV": ("gv", "valid on (0, 1 - 1/q); 0 at the endpoints by convention"),
    "TVZ": ("tvz", "clamped at 0 beyond 1 - 1/(l-1)"),
    "SX_IMPROVED": ("sx", "TVZ + log_q(1+q^-3), clamped at 0"),
    "SELF_DUAL_NEW": ("selfdual", "horizontal marker at R = 1/2 up to delta bound"),
    "ISO_DUAL_OLD": ("isodual", "horizontal marker, needs l > 3"),
}


def bound_table(q: int, kinds: list[str], step: Fraction) -> list[BoundCurve]:
    """Sampled curves on the delta grid (exact rational grid points)."""
    _ell(q)
    step = Fraction(step)
    if step <= 0:
        raise DomainError("step must be positive")
    grid_pts = []
    d = Fraction(0)
    while d <= 1:
        grid_pts.append(d)
        d += step
    curves = []
    for kind in kinds:
        if kind not in _CURVE_FUNCS:
            raise DomainError(f"unknown curve kind {kind!r}")
        note = _CURVE_FUNCS[kind][1]
        pts = []
        for d in grid_pts:
            if kind == "GV":
                if 0 < d < 1 - Fraction(1, q):
                    v = max(0.0, gv(q, d))
                elif d == 0:
                    v = 1.0
                else:
                    v = 0.0
            elif kind == "TVZ":
                v = tvz(q, d)
            elif kind == "SX_IMPROVED":
                v = sx_improved(q, d)
            elif kind == "SELF_DUAL_NEW":
                v = 0.5 if d <= selfdual_delta(q) else 0.0
            else:
                v = 0.5 if d <= isodual_old_delta(q) else 0.0
            assert -1e-15 <= v <= 1.0 + 1e-15
            pts.append((d, min(1.0, max(0.0, v))))
        curves.append(BoundCurve(q=q, kind=kind, grid=pts, domain_note=note))
    return curves
