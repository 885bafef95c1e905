"""Exact univariate polynomials over Q, real roots and Vandermonde densities.

Rationals are :class:`fractions.Fraction`. A :class:`Poly` stores ascending
coefficients with no trailing zeros; the zero polynomial has no coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

from . import linalg


def to_rat(value) -> Fraction:
    """Parse an int, Fraction, exact decimal string or ``"p/q"`` string into a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as a rational")


class Poly:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [to_rat(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def const(cls, c) -> Poly:
        return cls([c])

    @classmethod
    def x(cls) -> Poly:
        return cls([0, 1])

    @classmethod
    def monomial(cls, n: int, c=1) -> Poly:
        return cls([0] * n + [c])

    @classmethod
    def from_roots(cls, roots: Iterable) -> Poly:
        p = cls([1])
        for r in roots:
            p = p * cls([-to_rat(r), 1])
        return p

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def padded(self, n: int) -> list[Fraction]:
        return [self.coeff(i) for i in range(n)]

    def monic(self) -> Poly:
        if self.is_zero():
            return self
        lc = self.lc
        return Poly(c / lc for c in self.coeffs)

    def derivative(self) -> Poly:
        return Poly(i * c for i, c in enumerate(self.coeffs) if i > 0)

    def __call__(self, x):
        acc = 0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + (c if not isinstance(x, float) else float(c))
        return acc

    def eval_float(self, x: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc

    def __add__(self, other) -> Poly:
        other = _coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(self.coeff(i) + other.coeff(i) for i in range(n))

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly(-c for c in self.coeffs)

    def __sub__(self, other) -> Poly:
        return self + (-_coerce(other))

    def __rsub__(self, other) -> Poly:
        return _coerce(other) - self

    def __mul__(self, other) -> Poly:
        other = _coerce(other)
        if self.is_zero() or other.is_zero():
            return Poly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> Poly:
        out = Poly([1])
        for _ in range(n):
            out = out * self
        return out

    def __divmod__(self, other: Poly) -> tuple[Poly, Poly]:
        other = _coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        quot = [Fraction(0)] * max(0, len(rem) - dq)
        lc = other.lc
        for i in range(len(rem) - 1, dq - 1, -1):
            c = rem[i] / lc
            if c:
                quot[i - dq] = c
                for j, b in enumerate(other.coeffs):
                    rem[i - dq + j] -= c * b
        return Poly(quot), Poly(rem[:dq] if dq > 0 else [])

    def __floordiv__(self, other: Poly) -> Poly:
        return divmod(self, other)[0]

    def __mod__(self, other: Poly) -> Poly:
        return divmod(self, other)[1]

    def __eq__(self, other) -> bool:
        try:
            return self.coeffs == _coerce(other).coeffs
        except TypeError:
            return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"Poly({format_poly(self)})"

    def __str__(self) -> str:
        return format_poly(self)


def _coerce(p) -> Poly:
    if isinstance(p, Poly):
        return p
    return Poly([p])


def format_poly(p: Poly, var: str = "x") -> str:
    if p.is_zero():
        return "0"
    terms = []
    for i in range(p.degree, -1, -1):
        c = p.coeffs[i]
        if c == 0:
            continue
        mag = abs(c)
        if i == 0:
            body = str(mag)
        else:
            mono = var if i == 1 else f"{var}^{i}"
            body = mono if mag == 1 else f"{mag}*{mono}"
        sign = "-" if c < 0 else "+"
        terms.append((sign, body))
    first_sign, first_body = terms[0]
    out = ("-" if first_sign == "-" else "") + first_body
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


def poly_eval(p: Poly, x) -> Fraction:
    return p(to_rat(x))


def poly_mul(p: Poly, q: Poly) -> Poly:
    return p * q


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd (exact Euclid)."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def squarefree_decomposition(p: Poly) -> list[tuple[Poly, int]]:
    """Yun's algorithm: ``p = lc * prod a_i^i`` with each ``a_i`` squarefree and coprime."""
    if p.degree <= 0:
        return []
    out = []
    dp = p.derivative()
    a0 = poly_gcd(p, dp)
    b = p // a0
    c = dp // a0
    d = c - b.derivative()
    i = 1
    while b.degree > 0:
        a = poly_gcd(b, d)
        if a.degree > 0:
            out.append((a, i))
        b = b // a
        c = d // a
        d = c - b.derivative()
        i += 1
    return out


@dataclass(frozen=True)
class RootSet:
    roots: tuple[tuple[float, int], ...]
    residual_bound: float

    @property
    def locations(self) -> list[float]:
        return [r for r, _ in self.roots]


class RootFindingError(RuntimeError):
    pass


def _newton_polish(p: Poly, dp: Poly, x: float, steps: int = 2) -> float:
    # Exact rational evaluation at the float iterate is the extended-precision step.
    for _ in range(steps):
        fx = Fraction(x)
        num = p(fx)
        den = dp(fx)
        if den == 0:
            break
        nxt = float(fx - num / den)
        if not np.isfinite(nxt) or abs(nxt - x) > 1e-6 * (1 + abs(x)):
            break
        x = nxt
    return x


def _squarefree_real_roots(a: Poly, tol: float) -> list[float]:
    if a.degree <= 0:
        return []
    if a.degree == 1:
        return [float(-a.coeffs[0] / a.coeffs[1])]
    m = a.monic()
    cs = np.array([float(c) for c in m.coeffs])
    try:
        comp = np.polynomial.polynomial.polycompanion(cs)
        eig = np.linalg.eigvals(comp)
    except np.linalg.LinAlgError as exc:
        raise RootFindingError(f"companion eigenvalues did not converge for degree {a.degree}") from exc
    if not np.all(np.isfinite(eig)):
        raise RootFindingError(f"non-finite companion eigenvalues for degree {a.degree}")
    scale = max(1.0, float(np.max(np.abs(eig))))
    da = m.derivative()
    out = []
    for z in eig:
        if abs(z.imag) > max(tol * scale, 1e-7 * (1 + abs(z))):
            continue
        out.append(_newton_polish(m, da, float(z.real)))
    return out


def real_roots(p: Poly, tol: float = 1e-8) -> RootSet:
    """All real roots of ``p`` with multiplicities.

    Multiplicities come from an exact square-free decomposition; each squarefree
    factor is solved through its companion matrix and polished by Newton steps
    evaluated exactly. Roots closer than ``tol*(1+|r|)`` are merged.
    """
    if p.is_zero():
        raise ValueError("real_roots of the zero polynomial")
    found: list[tuple[float, int]] = []
    for factor, mult in squarefree_decomposition(p):
        for r in _squarefree_real_roots(factor, tol):
            found.append((r, mult))
    found.sort()
    merged: list[list] = []
    for r, m in found:
        if merged and abs(r - merged[-1][0]) <= tol * (1 + abs(r)):
            merged[-1][1] += m
        else:
            merged.append([r, m])
    norm = float(max(abs(c) for c in p.coeffs))
    resid = 0.0
    for r, _ in merged:
        val = abs(float(p(Fraction(r))))
        resid = max(resid, val / (norm * max(1.0, abs(r)) ** p.degree))
    return RootSet(tuple((float(r), int(m)) for r, m in merged), resid)


class VandermondeError(ArithmeticError):
    pass


def vandermonde_solve(nodes: Sequence, rhs: Sequence) -> list:
    """Densities ``rho`` with ``sum_j rho_j x_j^i = rhs_i`` for ``i < len(nodes)``.

    All-rational nodes are solved exactly; otherwise the Bjorck-Pereyra
    recurrence runs in double precision.
    """
    n = len(nodes)
    if len(rhs) < n:
        raise ValueError("need at least as many moments as nodes")
    if n == 0:
        return []
    if all(isinstance(x, (int, Fraction)) for x in nodes):
        xs = [Fraction(x) for x in nodes]
        if len(set(xs)) < n:
            raise VandermondeError("coincident nodes")
        v = [[x ** i for x in xs] for i in range(n)]
        return linalg.solve(v, [to_rat(b) for b in rhs[:n]])
    x = [float(v) for v in nodes]
    scale = max(1.0, max(abs(v) for v in x))
    for i in range(n):
        for j in range(i + 1, n):
            if abs(x[i] - x[j]) <= 1e-14 * scale:
                raise VandermondeError(f"nodes {x[i]!r} and {x[j]!r} coincide")
    b = [float(v) for v in rhs[:n]]
    for k in range(n - 1):
        for i in range(n - 1, k, -1):
            b[i] -= x[k] * b[i - 1]
    for k in range(n - 2, -1, -1):
        for i in range(k + 1, n):
            b[i] /= x[i] - x[i - k - 1]
        for i in range(k, n - 1):
            b[i] -= b[i + 1]
    return b
