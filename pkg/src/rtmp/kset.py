"""Closed subsets of the line as finite unions of disjoint closed intervals.

Also builds the natural description of such a set (the degree <= 2
generators x - a, b - x and the gap quadratics), the products of distinct
generators, and the atom-count classes used to bound minimal measures.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .polyalg import Poly, to_rat

INF = math.inf


def _endpoint(v):
    if isinstance(v, str):
        s = v.strip().lower()
        if s in ("inf", "+inf", "infinity"):
            return INF
        if s in ("-inf", "-infinity"):
            return -INF
    if isinstance(v, float) and math.isinf(v):
        return v
    return to_rat(v)


@dataclass(frozen=True)
class ClosedSet:
    intervals: tuple[tuple, ...]

    def __init__(self, intervals: Iterable):
        ivs = []
        for lo, hi in intervals:
            lo, hi = _endpoint(lo), _endpoint(hi)
            if lo == INF or hi == -INF:
                raise ValueError(f"interval [{lo}, {hi}] has an infinite endpoint on the wrong side")
            if lo > hi:
                raise ValueError(f"interval [{lo}, {hi}] has lo > hi")
            ivs.append((lo, hi))
        if not ivs:
            raise ValueError("K must contain at least one interval")
        ivs.sort(key=lambda iv: iv[0])
        for (_, h1), (l2, _) in zip(ivs, ivs[1:]):
            if not h1 < l2:
                raise ValueError("intervals must be pairwise disjoint with strict gaps")
        object.__setattr__(self, "intervals", tuple(ivs))

    @classmethod
    def real_line(cls) -> ClosedSet:
        return cls([(-INF, INF)])

    @property
    def lower(self):
        return self.intervals[0][0]

    @property
    def upper(self):
        return self.intervals[-1][1]

    @property
    def bounded_below(self) -> bool:
        return self.lower != -INF

    @property
    def bounded_above(self) -> bool:
        return self.upper != INF

    @property
    def is_bounded(self) -> bool:
        return self.bounded_below and self.bounded_above

    @property
    def has_interior(self) -> bool:
        return any(lo < hi for lo, hi in self.intervals)

    def isolated_points(self) -> list[Fraction]:
        return [lo for lo, hi in self.intervals if lo == hi]

    def boundary_points(self) -> list[Fraction]:
        pts: list[Fraction] = []
        for lo, hi in self.intervals:
            for e in (lo, hi):
                if not (isinstance(e, float) and math.isinf(e)) and (not pts or pts[-1] != e):
                    pts.append(e)
        return pts

    def gaps(self) -> list[tuple[Fraction, Fraction]]:
        return [(h1, l2) for (_, h1), (l2, _) in zip(self.intervals, self.intervals[1:])]

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return any(lo - tol <= x <= hi + tol for lo, hi in self.intervals)

    def __str__(self) -> str:
        def fmt(e):
            if e == INF:
                return "inf"
            if e == -INF:
                return "-inf"
            return str(e)

        return " U ".join(f"[{fmt(lo)}, {fmt(hi)}]" for lo, hi in self.intervals)


def contains(K: ClosedSet, x: float, tol: float = 0.0) -> bool:
    return K.contains(x, tol)


@dataclass(frozen=True)
class Generator:
    poly: Poly
    kind: str  # least_element | greatest_element | gap
    zeros: tuple[Fraction, ...]


@dataclass(frozen=True)
class NaturalDescription:
    generators: tuple[Generator, ...]

    def __len__(self) -> int:
        return len(self.generators)


def natural_description(K: ClosedSet) -> NaturalDescription:
    gens = []
    if K.bounded_below:
        a = K.lower
        gens.append(Generator(Poly([-a, 1]), "least_element", (a,)))
    if K.bounded_above:
        b = K.upper
        gens.append(Generator(Poly([b, -1]), "greatest_element", (b,)))
    for a, b in K.gaps():
        gens.append(Generator(Poly([a * b, -(a + b), 1]), "gap", (a, b)))
    return NaturalDescription(tuple(gens))


@dataclass(frozen=True)
class PiProduct:
    f: Poly
    exponent_vector: tuple[int, ...]
    zeros: tuple[Fraction, ...]

    @property
    def degree(self) -> int:
        return self.f.degree

    @property
    def parity(self) -> str:
        return "odd" if self.f.degree % 2 else "even"

    @property
    def leading_sign(self) -> int:
        return 1 if self.f.lc > 0 else -1

    @property
    def order_key(self) -> tuple:
        # lowest degree first, then by which generators are used (earlier generators first)
        return (self.degree, tuple(i for i, e in enumerate(self.exponent_vector) if e))


def pi_products(S: NaturalDescription, degree_budget: int | None = None) -> list[PiProduct]:
    """All products of distinct generators with degree <= ``degree_budget``, in canonical order."""
    m = len(S.generators)
    out = []
    for e in itertools.product((0, 1), repeat=m):
        f = Poly([1])
        zs: set[Fraction] = set()
        for bit, g in zip(e, S.generators):
            if bit:
                f = f * g.poly
                zs.update(g.zeros)
        if degree_budget is not None and f.degree > degree_budget:
            continue
        out.append(PiProduct(f, tuple(e), tuple(sorted(zs))))
    out.sort(key=lambda p: p.order_key)
    return out


@dataclass(frozen=True)
class KClass:
    kind: str
    l1: int
    l2: int
    base: int  # atom_bound(k) = k + base, except for finite sets
    n_points: int | None = None

    def atom_bound(self, k: int) -> int:
        if self.kind == "finite_set":
            return min(k + 1, self.n_points)
        return k + self.base


def classify(K: ClosedSet, k: int | None = None) -> KClass:
    card = len(K.boundary_points())
    l1, l2 = divmod(card, 2)
    single_unbounded = len(K.intervals) == 1 and not K.is_bounded
    if single_unbounded:
        return KClass("whole_or_halfline", l1, l2, 1)
    if K.is_bounded:
        if not K.has_interior:
            return KClass("finite_set", l1, l2, 1, n_points=len(K.intervals))
        return KClass("bounded_with_interior", l1, l2, l1 + 1)
    if K.bounded_below or K.bounded_above:
        return KClass("one_sided_unbounded", l1, l2, l1 + l2 + 1)
    return KClass("two_sided_unbounded", l1, l2, l1 + 2)
