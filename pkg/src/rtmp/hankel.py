"""Moment sequences, (localizing) Hankel matrices and exact psd reports."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import linalg
from .polyalg import Poly, to_rat


@dataclass(frozen=True)
class MomentSequence:
    """Power moments ``values[i] = L(x^i)`` for ``i = 0..degree``."""

    values: tuple[Fraction, ...]

    def __init__(self, values: Iterable):
        vals = tuple(to_rat(v) for v in values)
        if not vals:
            raise ValueError("a moment sequence needs at least gamma_0")
        object.__setattr__(self, "values", vals)

    @property
    def degree(self) -> int:
        return len(self.values) - 1

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def extend(self, *more) -> MomentSequence:
        return MomentSequence(self.values + tuple(to_rat(v) for v in more))

    def truncate(self, degree: int) -> MomentSequence:
        return MomentSequence(self.values[: degree + 1])

    def scale(self, c) -> MomentSequence:
        c = to_rat(c)
        return MomentSequence(c * v for v in self.values)

    def as_floats(self) -> list[float]:
        return [float(v) for v in self.values]


def moments_of(atoms: Sequence, densities: Sequence, degree: int) -> MomentSequence:
    """Power moments of ``sum rho_j delta_{x_j}`` up to ``degree``; exact on rational input."""
    xs = [to_rat(x) for x in atoms]
    rs = [to_rat(r) for r in densities]
    return MomentSequence(sum((r * x ** i for x, r in zip(xs, rs)), Fraction(0)) for i in range(degree + 1))


@dataclass(frozen=True)
class HankelMatrix:
    entries: tuple[tuple[Fraction, ...], ...]
    source: MomentSequence
    localizer: Poly = field(default_factory=lambda: Poly([1]))

    @property
    def side(self) -> int:
        return len(self.entries)

    def rows(self) -> list[list[Fraction]]:
        return [list(r) for r in self.entries]

    def as_array(self) -> np.ndarray:
        return np.array([[float(v) for v in r] for r in self.entries], dtype=float).reshape(self.side, self.side)


@dataclass(frozen=True)
class PsdReport:
    """Exact classification; ``kernel_vectors`` are in echelon form with distinct last-nonzero indices."""

    status: str
    rank: int
    kernel_vectors: tuple[tuple[Fraction, ...], ...]
    min_eigenvalue_estimate: float
    eigenvalue_estimates: tuple[float, ...] = ()
    first_singular_level: int | None = None

    @property
    def kernel_basis(self) -> list[Poly]:
        return [Poly(v) for v in self.kernel_vectors]

    @property
    def is_psd(self) -> bool:
        return self.status != "indefinite"


@dataclass(frozen=True)
class GeneratingPoly:
    p: Poly
    first_singular_level: int


class NotPsdError(ValueError):
    pass


def riesz(gamma: MomentSequence, f: Poly) -> Fraction:
    if f.degree > gamma.degree:
        raise ValueError(f"deg f = {f.degree} exceeds moment degree {gamma.degree}")
    return sum((c * g for c, g in zip(f.coeffs, gamma.values)), Fraction(0))


def localize(gamma: MomentSequence, f: Poly) -> MomentSequence:
    """``f . gamma`` with entries ``L_gamma(f x^i)``, ``i = 0..degree - deg f``."""
    if f.is_zero():
        raise ValueError("cannot localize by the zero polynomial")
    d = f.degree
    if d > gamma.degree:
        raise ValueError(f"deg f = {d} exceeds moment degree {gamma.degree}")
    vals = gamma.values
    return MomentSequence(
        sum((c * vals[i + j] for j, c in enumerate(f.coeffs)), Fraction(0)) for i in range(gamma.degree - d + 1)
    )


def build_hankel(gamma: MomentSequence, level: int | None = None, localizer: Poly | None = None) -> HankelMatrix:
    """Hankel matrix ``(gamma_{i+j})_{i,j<=level}``; odd-length input drops its last moment."""
    if level is None:
        level = gamma.degree // 2
    if 2 * level > gamma.degree:
        raise ValueError(f"level {level} needs degree {2 * level}, have {gamma.degree}")
    v = gamma.values
    entries = tuple(tuple(v[i + j] for j in range(level + 1)) for i in range(level + 1))
    return HankelMatrix(entries, gamma, localizer if localizer is not None else Poly([1]))


def localizing_matrix(gamma: MomentSequence, f: Poly) -> HankelMatrix | None:
    """``H_{f,gamma}``; ``None`` when it would be empty (deg f exceeds the degree budget)."""
    if f.degree > gamma.degree:
        return None
    loc = localize(gamma, f)
    return build_hankel(loc, localizer=f)


def _echelon_kernel(vectors: list[list[Fraction]]) -> list[tuple[Fraction, ...]]:
    # reduce so that last-nonzero indices (polynomial degrees) are distinct, then make monic
    vecs = [list(v) for v in vectors]
    out = []
    while vecs:
        degs = [max(i for i, c in enumerate(v) if c != 0) for v in vecs]
        top = max(degs)
        idx = [i for i, d in enumerate(degs) if d == top]
        piv = vecs[idx[0]]
        for i in idx[1:]:
            f = vecs[i][top] / piv[top]
            vecs[i] = [a - f * b for a, b in zip(vecs[i], piv)]
        rest = [v for i, v in enumerate(vecs) if i != idx[0] and any(c != 0 for c in v)]
        out.append(piv)
        vecs = rest
    # reduce higher vectors by lower ones to keep them canonical
    out.sort(key=lambda v: max(i for i, c in enumerate(v) if c != 0))
    canon: list[list[Fraction]] = []
    for v in out:
        d = max(i for i, c in enumerate(v) if c != 0)
        v = [c / v[d] for c in v]
        for w in canon:
            dw = max(i for i, c in enumerate(w) if c != 0)
            if v[dw] != 0:
                f = v[dw]
                v = [a - f * b for a, b in zip(v, w)]
        canon.append(v)
    return [tuple(v) for v in canon]


def symmetric_psd_report(rows: list[list[Fraction]]) -> PsdReport:
    """Exact psd report for any symmetric rational matrix."""
    n = len(rows)
    if n == 0:
        return PsdReport("positive_definite", 0, (), float("inf"))
    status, rank, first_zero = linalg.ldl_classify(rows)
    kernel = linalg.nullspace(rows) if rank < n or status == "indefinite" else []
    kernel = _echelon_kernel(kernel) if kernel else []
    eig = np.linalg.eigvalsh(linalg.to_float(rows))
    eig_desc = tuple(float(e) for e in sorted(eig, reverse=True))
    return PsdReport(status, rank if status != "indefinite" else len(rows) - len(kernel), tuple(kernel),
                     float(eig.min()), eig_desc, first_zero if status == "psd_singular" else None)


def psd_status(h: HankelMatrix) -> PsdReport:
    return symmetric_psd_report(h.rows())


def generating_polynomial(gamma: MomentSequence) -> GeneratingPoly | None:
    """Monic kernel element at the smallest singular level, or ``None`` if positive definite."""
    h = build_hankel(gamma)
    status, _, level = linalg.ldl_classify(h.rows())
    if status == "indefinite":
        raise NotPsdError("Hankel matrix is not positive semidefinite")
    if status == "positive_definite":
        return None
    if level == 0:
        return GeneratingPoly(Poly([1]), 0)
    v = gamma.values
    sub = [[v[i + j] for j in range(level)] for i in range(level)]
    a = linalg.solve(sub, [v[level + i] for i in range(level)])
    p = Poly([-c for c in a] + [1])
    return GeneratingPoly(p, level)


def is_column_relation(h: HankelMatrix, p: Poly) -> bool:
    if p.degree >= h.side:
        return False
    vec = p.padded(h.side)
    return all(x == 0 for x in linalg.matvec(h.rows(), vec))


def flat_extension_check(gamma: MomentSequence) -> bool:
    """Whether ``x^{k - deg p} p`` is a column relation of the full Hankel matrix.

    A positive definite Hankel matrix always admits a flat extension, so the
    answer is then ``True``.
    """
    gp = generating_polynomial(gamma)
    if gp is None:
        return True
    h = build_hankel(gamma)
    k = h.side - 1
    shifted = Poly.monomial(k - gp.p.degree) * gp.p
    return is_column_relation(h, shifted)
