"""Exact one-variable sign conditions over Q[x].

Real algebraic numbers are carried as a squarefree defining polynomial plus a
rational isolating interval. The cell decomposition of the line induced by a
family of polynomials lets us decide conjunctions of ``>=``/``>`` constraints
without rounding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .polyalg import Poly, poly_gcd


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def sturm_sequence(p: Poly) -> list[Poly]:
    seq = [p, p.derivative()]
    while not seq[-1].is_zero():
        r = seq[-2] % seq[-1]
        seq.append(-r)
    return seq[:-1]


def _variations(seq: list[Poly], x: Fraction) -> int:
    signs = [_sign(q(x)) for q in seq]
    signs = [s for s in signs if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(seq: list[Poly], a: Fraction, b: Fraction) -> int:
    """Distinct roots in ``(a, b]`` of the squarefree polynomial ``seq[0]``."""
    return _variations(seq, a) - _variations(seq, b)


def cauchy_bound(p: Poly) -> Fraction:
    lc = abs(p.lc)
    return 1 + max((abs(c) / lc for c in p.coeffs[:-1]), default=Fraction(0))


@dataclass(frozen=True)
class AlgebraicReal:
    """The unique root of squarefree ``poly`` in ``[lo, hi]`` (``lo == hi`` when rational)."""

    poly: Poly
    lo: Fraction
    hi: Fraction

    @property
    def is_rational(self) -> bool:
        return self.lo == self.hi

    def refine(self, width: Fraction) -> AlgebraicReal:
        lo, hi = self.lo, self.hi
        if lo == hi:
            return self
        slo = _sign(self.poly(lo))
        while hi - lo > width:
            mid = (lo + hi) / 2
            sm = _sign(self.poly(mid))
            if sm == 0:
                return AlgebraicReal(self.poly, mid, mid)
            if sm == slo:
                lo = mid
            else:
                hi = mid
        return AlgebraicReal(self.poly, lo, hi)

    def __float__(self) -> float:
        if self.is_rational:
            return float(self.lo)
        mag = max(abs(self.lo), abs(self.hi), Fraction(1))
        r = self.refine(mag * Fraction(1, 2 ** 60))
        return float((r.lo + r.hi) / 2)

    def sign_of(self, g: Poly) -> int:
        """Exact sign of ``g`` at this number."""
        if self.is_rational:
            return _sign(g(self.lo))
        h = poly_gcd(g, self.poly)
        # h divides the squarefree defining polynomial, so it is squarefree and
        # nonzero at both endpoints; a sign change means the root is shared.
        if h.degree > 0 and _sign(h(self.lo)) * _sign(h(self.hi)) < 0:
            return 0
        if g.degree <= 0:
            return _sign(g.lc)
        seq = sturm_sequence(_squarefree(g))
        r = self
        while g(r.lo) == 0 or count_roots(seq, r.lo, r.hi) > 0:
            r = r.refine((r.hi - r.lo) / 4)
            if r.is_rational:
                return _sign(g(r.lo))
        return _sign(g(r.lo))


def _squarefree(p: Poly) -> Poly:
    if p.degree <= 0:
        return p
    return p // poly_gcd(p, p.derivative())


def isolate_real_roots(p: Poly) -> list[AlgebraicReal]:
    """All distinct real roots of ``p`` in increasing order.

    Isolating intervals always have non-root endpoints; a root hit exactly by
    bisection is returned as a rational point.
    """
    if p.degree <= 0:
        return []
    s = _squarefree(p).monic()
    seq = sturm_sequence(s)
    bound = cauchy_bound(s)
    out: list[AlgebraicReal] = []
    stack = [(-bound, bound)]
    while stack:
        a, b = stack.pop()
        n = count_roots(seq, a, b)
        if n == 0:
            continue
        if n == 1:
            out.append(AlgebraicReal(s, a, b))
            continue
        mid = (a + b) / 2
        if s(mid) != 0:
            stack.append((a, mid))
            stack.append((mid, b))
            continue
        out.append(AlgebraicReal(s, mid, mid))
        delta = (b - a) / 4
        while s(mid - delta) == 0 or s(mid + delta) == 0 or count_roots(seq, mid - delta, mid + delta) > 1:
            delta /= 2
        stack.append((a, mid - delta))
        stack.append((mid + delta, b))
    out.sort(key=lambda r: r.lo)
    return out


@dataclass(frozen=True)
class Cell:
    """A point cell (``point`` set) or an open cell with a rational ``sample``."""

    lo: AlgebraicReal | None
    hi: AlgebraicReal | None
    point: AlgebraicReal | None = None
    sample: Fraction | None = None

    @property
    def is_point(self) -> bool:
        return self.point is not None


def coprime_base(polys: Sequence[Poly]) -> list[Poly]:
    """Pairwise coprime squarefree monic polynomials with the same real zeros as ``polys``."""
    base: list[Poly] = []
    for g in polys:
        if g.degree <= 0:
            continue
        p = _squarefree(g).monic()
        nxt: list[Poly] = []
        for b in base:
            h = poly_gcd(p, b)
            if h.degree > 0:
                p = p // h
                nxt.append(h)
                rest = b // h
                if rest.degree > 0:
                    nxt.append(rest.monic())
            else:
                nxt.append(b)
        if p.degree > 0:
            nxt.append(p.monic())
        base = nxt
    return base


def decompose(polys: Sequence[Poly]) -> list[Cell]:
    """Ordered cells on which every polynomial in ``polys`` has constant sign."""
    roots: list[AlgebraicReal] = []
    for b in coprime_base(polys):
        roots.extend(isolate_real_roots(b))
    # shrink isolating intervals so neighbours are separated by rational gaps
    roots = _separate(roots)
    cells: list[Cell] = []
    if not roots:
        return [Cell(None, None, sample=Fraction(0))]
    first = roots[0]
    cells.append(Cell(None, first, sample=first.lo - 1))
    for i, r in enumerate(roots):
        cells.append(Cell(r, r, point=r))
        if i + 1 < len(roots):
            nxt = roots[i + 1]
            cells.append(Cell(r, nxt, sample=(r.hi + nxt.lo) / 2))
    last = roots[-1]
    cells.append(Cell(last, None, sample=last.hi + 1))
    return cells


def _separate(roots: list[AlgebraicReal]) -> list[AlgebraicReal]:
    # roots are distinct, so refining overlapping neighbours terminates
    roots = sorted(roots, key=lambda r: (r.lo + r.hi) / 2)
    changed = True
    while changed:
        changed = False
        for i in range(len(roots) - 1):
            a, b = roots[i], roots[i + 1]
            if a.hi >= b.lo:
                if not a.is_rational:
                    roots[i] = a.refine((a.hi - a.lo) / 2)
                if not b.is_rational:
                    roots[i + 1] = b.refine((b.hi - b.lo) / 2)
                changed = True
        if changed:
            roots.sort(key=lambda r: (r.lo + r.hi) / 2)
    return roots


def cell_signs(cell: Cell, g: Poly) -> int:
    if cell.is_point:
        return cell.point.sign_of(g)
    return _sign(g(cell.sample))


@dataclass(frozen=True)
class Interval:
    """A connected piece of a semialgebraic subset of the line. ``None`` ends are infinite."""

    lo: AlgebraicReal | None
    hi: AlgebraicReal | None
    lo_closed: bool
    hi_closed: bool
    sample: Fraction

    @property
    def bounds(self) -> tuple[float, float]:
        lo = -math.inf if self.lo is None else float(self.lo)
        hi = math.inf if self.hi is None else float(self.hi)
        return lo, hi

    @property
    def is_point(self) -> bool:
        return self.lo is not None and self.hi is not None and self.lo is self.hi


def solve_constraints(constraints: Sequence[tuple[Poly, str]]) -> list[Interval]:
    """The set ``{x : g(x) >= 0 or > 0 for each (g, op)}`` as disjoint intervals.

    ``op`` is ``">="`` or ``">"``; constant polynomials are allowed.
    """
    cells = decompose([g for g, _ in constraints])

    def ok(cell: Cell) -> bool:
        for g, op in constraints:
            s = cell_signs(cell, g)
            if s < 0 or (op == ">" and s == 0):
                return False
        return True

    flags = [ok(c) for c in cells]
    out: list[Interval] = []
    i = 0
    while i < len(cells):
        if not flags[i]:
            i += 1
            continue
        j = i
        while j + 1 < len(cells) and flags[j + 1]:
            j += 1
        first, last = cells[i], cells[j]
        lo = first.point if first.is_point else first.lo
        hi = last.point if last.is_point else last.hi
        sample = next((c.sample for c in cells[i:j + 1] if not c.is_point), None)
        if sample is None:
            sample = first.point.lo if first.point.is_rational else None
        out.append(Interval(lo, hi, first.is_point, last.is_point, sample))
        i = j + 1
    return out
