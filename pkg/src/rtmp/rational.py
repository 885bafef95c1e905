"""Rational moment data ``L(f / q)`` and its power-moment form ``L(f) = L(f / q)``.

The basis of the rational functions with denominator ``q`` is, in order,
``x^i`` (``i <= 2 k0``), ``(x - lam)^-i`` for each real pole, then
``(x^2 + eta)^-i`` and ``x (x^2 + eta)^-i`` for each complex pole. Multiplying
each basis function by ``q`` gives a basis of the polynomials of degree
``<= 2k``; all conversions are one exact linear solve against that basis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from . import linalg
from .hankel import MomentSequence
from .kset import ClosedSet
from .polyalg import Poly, to_rat
from .solver import AtomicMeasure, InfeasibleReason, PoleSet, SolverConfig, solve


class AtomOnPoleError(ValueError):
    pass


@dataclass(frozen=True)
class PoleSpec:
    k0: int = 0
    real_poles: tuple[tuple[Fraction, int], ...] = ()
    complex_poles: tuple[tuple[Fraction, int], ...] = ()

    def __init__(self, k0: int = 0, real_poles: Iterable = (), complex_poles: Iterable = ()):
        if k0 < 0:
            raise ValueError("k0 must be nonnegative")
        real = tuple((to_rat(lam), int(m)) for lam, m in real_poles)
        cplx = tuple((to_rat(eta), int(m)) for eta, m in complex_poles)
        if len({lam for lam, _ in real}) != len(real):
            raise ValueError("duplicate real pole")
        if len({eta for eta, _ in cplx}) != len(cplx):
            raise ValueError("duplicate complex pole")
        if any(m < 1 for _, m in real + cplx):
            raise ValueError("pole orders must be at least 1; omit zero-order poles")
        if any(eta <= 0 for eta, _ in cplx):
            raise ValueError("complex poles need eta > 0")
        object.__setattr__(self, "k0", int(k0))
        object.__setattr__(self, "real_poles", real)
        object.__setattr__(self, "complex_poles", cplx)

    @property
    def k(self) -> int:
        return self.k0 + sum(m for _, m in self.real_poles) + sum(m for _, m in self.complex_poles)

    @property
    def poles(self) -> PoleSet:
        return PoleSet(lam for lam, _ in self.real_poles)

    def shape(self) -> tuple:
        return (2 * self.k0 + 1, tuple(2 * m for _, m in self.real_poles), tuple(m for _, m in self.complex_poles))


@dataclass(frozen=True)
class RationalMoments:
    gamma0: tuple[Fraction, ...]
    real: tuple[tuple[Fraction, ...], ...] = ()
    complex: tuple[tuple[tuple[Fraction, ...], tuple[Fraction, ...]], ...] = ()

    def __init__(self, gamma0: Iterable, real: Iterable = (), complex: Iterable = ()):
        object.__setattr__(self, "gamma0", tuple(to_rat(v) for v in gamma0))
        object.__setattr__(self, "real", tuple(tuple(to_rat(v) for v in seq) for seq in real))
        object.__setattr__(self, "complex",
                           tuple((tuple(to_rat(v) for v in s0), tuple(to_rat(v) for v in s1)) for s0, s1 in complex))

    def check(self, spec: PoleSpec) -> None:
        n0, nr, nc = spec.shape()
        if len(self.gamma0) != n0:
            raise ValueError(f"gamma0 needs {n0} values, got {len(self.gamma0)}")
        if tuple(len(s) for s in self.real) != nr:
            raise ValueError(f"real-pole data lengths {tuple(len(s) for s in self.real)} do not match {nr}")
        if len(self.complex) != len(nc) or any(len(a) != m or len(b) != m for (a, b), m in zip(self.complex, nc)):
            raise ValueError("complex-pole data lengths do not match the pole orders")

    def flat(self) -> list[Fraction]:
        out = list(self.gamma0)
        for seq in self.real:
            out.extend(seq)
        for s0, s1 in self.complex:
            out.extend(s0)
            out.extend(s1)
        return out

    @classmethod
    def from_flat(cls, values: Sequence, spec: PoleSpec) -> RationalMoments:
        vals = list(values)
        n0, nr, nc = spec.shape()
        pos = n0
        real = []
        for n in nr:
            real.append(vals[pos:pos + n])
            pos += n
        cplx = []
        for m in nc:
            cplx.append((vals[pos:pos + m], vals[pos + m:pos + 2 * m]))
            pos += 2 * m
        return cls(vals[:n0], real, cplx)

    def __add__(self, other: RationalMoments) -> RationalMoments:
        return _combine(self, other, lambda a, b: a + b)

    def scale(self, c) -> RationalMoments:
        c = to_rat(c)
        return _combine(self, self, lambda a, _: c * a)


def _combine(a: RationalMoments, b: RationalMoments, op) -> RationalMoments:
    return RationalMoments(
        [op(u, v) for u, v in zip(a.gamma0, b.gamma0)],
        [[op(u, v) for u, v in zip(s, t)] for s, t in zip(a.real, b.real)],
        [([op(u, v) for u, v in zip(s0, t0)], [op(u, v) for u, v in zip(s1, t1)])
         for (s0, s1), (t0, t1) in zip(a.complex, b.complex)],
    )


@dataclass(frozen=True)
class BasisFunction:
    label: str  # e.g. "x^2", "(x-1)^-2", "(x^2+1)^-1", "x(x^2+1)^-1"
    numerator: Poly
    kind: str  # power | real | complex0 | complex1
    pole: Fraction | None
    power: int

    def __call__(self, x):
        if self.kind == "power":
            return x ** self.power
        if self.kind == "real":
            return 1 / (x - self.pole) ** self.power
        base = 1 / (x * x + self.pole) ** self.power
        return base if self.kind == "complex0" else x * base


def build_q(spec: PoleSpec) -> Poly:
    q = Poly([1])
    for lam, m in spec.real_poles:
        q = q * Poly([-lam, 1]) ** (2 * m)
    for eta, m in spec.complex_poles:
        q = q * Poly([eta, 0, 1]) ** m
    return q


def basis_functions(spec: PoleSpec) -> list[BasisFunction]:
    q = build_q(spec)
    out = []
    for i in range(2 * spec.k0 + 1):
        out.append(BasisFunction(f"x^{i}", Poly.monomial(i) * q, "power", None, i))
    for lam, m in spec.real_poles:
        lin = Poly([-lam, 1])
        for i in range(1, 2 * m + 1):
            out.append(BasisFunction(f"(x-{lam})^-{i}", q // lin ** i, "real", lam, i))
    for eta, m in spec.complex_poles:
        quad = Poly([eta, 0, 1])
        for i in range(1, m + 1):
            out.append(BasisFunction(f"(x^2+{eta})^-{i}", q // quad ** i, "complex0", eta, i))
        for i in range(1, m + 1):
            out.append(BasisFunction(f"x(x^2+{eta})^-{i}", Poly.x() * (q // quad ** i), "complex1", eta, i))
    return out


def basis_numerators(spec: PoleSpec) -> list[Poly]:
    return [b.numerator for b in basis_functions(spec)]


def _numerator_matrix(spec: PoleSpec) -> list[list[Fraction]]:
    # column b holds the coefficients of the b-th numerator
    n = 2 * spec.k + 1
    cols = [b.padded(n) for b in basis_numerators(spec)]
    return linalg.transpose(cols)


@dataclass(frozen=True)
class BasisCoefficients:
    a: tuple[Fraction, ...]
    b: tuple[tuple[Fraction, ...], ...]
    c: tuple[tuple[Fraction, ...], ...]
    d: tuple[tuple[Fraction, ...], ...]
    spec: PoleSpec = field(repr=False)

    def flat(self) -> list[Fraction]:
        out = list(self.a)
        for seq in self.b:
            out.extend(seq)
        for cs, ds in zip(self.c, self.d):
            out.extend(cs)
            out.extend(ds)
        return out

    def recombine(self) -> Poly:
        """The numerator over ``q`` these coefficients represent."""
        acc = Poly()
        for coef, num in zip(self.flat(), basis_numerators(self.spec)):
            acc = acc + num * coef
        return acc


def partial_fractions(f: Poly, spec: PoleSpec) -> BasisCoefficients:
    n = 2 * spec.k + 1
    if f.degree >= n:
        raise ValueError(f"deg f = {f.degree} exceeds 2k = {n - 1}")
    sol = linalg.solve(_numerator_matrix(spec), f.padded(n))
    split = RationalMoments.from_flat(sol, spec)
    out = BasisCoefficients(split.gamma0, split.real, tuple(s0 for s0, _ in split.complex),
                            tuple(s1 for _, s1 in split.complex), spec)
    if out.recombine() != f:
        raise ArithmeticError("partial-fraction recombination mismatch")
    return out


def rational_to_power(data: RationalMoments, spec: PoleSpec) -> MomentSequence:
    """Power moments ``L(x^m)`` for ``m = 0..2k``; solves ``M^T gamma = data``."""
    data.check(spec)
    m = _numerator_matrix(spec)
    return MomentSequence(linalg.solve(linalg.transpose(m), data.flat()))


def power_to_rational(gamma: MomentSequence, spec: PoleSpec) -> RationalMoments:
    """Rational data from power moments: each datum is ``L`` of its numerator."""
    if gamma.degree != 2 * spec.k:
        raise ValueError(f"need {2 * spec.k + 1} power moments, got {len(gamma)}")
    vals = [sum((c * g for c, g in zip(num.coeffs, gamma.values)), Fraction(0)) for num in basis_numerators(spec)]
    return RationalMoments.from_flat(vals, spec)


def rational_moments_of(mu: AtomicMeasure, spec: PoleSpec) -> RationalMoments:
    """Rational data of ``mu`` by direct summation of the basis functions."""
    vals = []
    for b in basis_functions(spec):
        if mu.exact:
            vals.append(sum((r * b(x) for x, r in zip(mu.atoms, mu.densities)), Fraction(0)))
        else:
            vals.append(math.fsum(float(r) * float(b(float(x))) for x, r in zip(mu.atoms, mu.densities)))
    if mu.exact:
        return RationalMoments.from_flat(vals, spec)
    return RationalMoments.from_flat([Fraction(v) for v in vals], spec)


def _on_pole(q: Poly, x, tol: float) -> bool:
    if isinstance(x, Fraction) or isinstance(x, int):
        return q(Fraction(x)) == 0
    return False


def _q_at(q: Poly, x) -> Fraction:
    # exact even for float atoms: Horner in floats loses digits where q is small
    return q(x if isinstance(x, Fraction) else Fraction(float(x)))


def pushforward_q(mu: AtomicMeasure, q: Poly, tol: float = 1e-12) -> AtomicMeasure:
    """``q * mu``: same atoms, densities multiplied by ``q(x)``."""
    dens = []
    for x, r in zip(mu.atoms, mu.densities):
        qx = _q_at(q, x)
        if _on_pole(q, x, tol) or (not mu.exact and abs(float(qx)) <= tol * (1 + abs(float(x))) ** q.degree):
            raise AtomOnPoleError(f"atom {x} is a zero of q")
        dens.append(r * qx if mu.exact else float(Fraction(float(r)) * qx))
    return AtomicMeasure(mu.atoms, tuple(dens), mu.exact, dict(mu.info))


def pullback_q(mu: AtomicMeasure, q: Poly, tol: float = 1e-12) -> AtomicMeasure:
    """Inverse of :func:`pushforward_q`: densities divided by ``q(x)``."""
    dens = []
    for x, r in zip(mu.atoms, mu.densities):
        qx = _q_at(q, x)
        if qx == 0 or (not mu.exact and abs(float(qx)) <= tol):
            raise AtomOnPoleError(f"atom {x} is a zero of q")
        dens.append(r / qx if mu.exact else float(Fraction(float(r)) / qx))
    return AtomicMeasure(mu.atoms, tuple(dens), mu.exact, dict(mu.info))


def solve_rtmp(
    data: RationalMoments, spec: PoleSpec, K: ClosedSet, cfg: SolverConfig | None = None,
    fixed_extension: Sequence | None = None,
) -> AtomicMeasure | InfeasibleReason:
    """Representing measure for the rational data, or the reason none exists.

    The returned measure carries the power-moment measure under ``info["power_measure"]``.
    """
    cfg = cfg or SolverConfig()
    gamma = rational_to_power(data, spec)
    res = solve(gamma, K, spec.poles, cfg, fixed_extension)
    if isinstance(res, InfeasibleReason):
        return res
    out = pushforward_q(res, build_q(spec))
    out.info["power_measure"] = res
    out.info["power_moments"] = gamma
    return out


@dataclass(frozen=True)
class RationalVerification:
    data_ok: bool
    poles_ok: bool
    densities_ok: bool
    residuals: tuple[tuple[str, float], ...]
    pole_distance: float

    @property
    def passed(self) -> bool:
        return self.data_ok and self.poles_ok and self.densities_ok

    @property
    def worst(self) -> tuple[str, float] | None:
        return max(self.residuals, key=lambda t: t[1], default=None)


def verify_rtmp(mu: AtomicMeasure, data: RationalMoments, spec: PoleSpec, tol: float = 1e-9,
                pole_margin: float | None = None) -> RationalVerification:
    data.check(spec)
    poles = spec.poles
    pd = min((poles.distance(float(x)) for x in mu.atoms), default=math.inf)
    margin = tol if pole_margin is None else max(tol, pole_margin)
    on_pole = pd <= margin or (mu.exact and any(x in poles.points for x in mu.atoms))
    resid = []
    if not on_pole:
        for b, datum in zip(basis_functions(spec), data.flat()):
            if mu.exact:
                val = sum((r * b(x) for x, r in zip(mu.atoms, mu.densities)), Fraction(0))
                err = float(abs(val - datum))
            else:
                val = math.fsum(float(r) * float(b(float(x))) for x, r in zip(mu.atoms, mu.densities))
                err = abs(val - float(datum))
            resid.append((b.label, err / (1 + abs(float(datum)))))
    return RationalVerification(
        data_ok=not on_pole and all(e <= tol for _, e in resid),
        poles_ok=not on_pole,
        densities_ok=all(float(r) > 0 for r in mu.densities),
        residuals=tuple(resid),
        pole_distance=pd,
    )
