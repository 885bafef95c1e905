"""Strong Hamburger problem and the truncated moment problem on the unit circle."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Iterable, Mapping

from .hankel import MomentSequence, PsdReport, build_hankel, generating_polynomial, symmetric_psd_report
from .kset import ClosedSet
from .polyalg import to_rat
from .rational import PoleSpec, RationalMoments, power_to_rational, solve_rtmp
from .solver import (
    AtomicMeasure,
    InfeasibleReason,
    SolverConfig,
    _exact_or_float_roots,
    _measure_on,
)
from . import linalg


def strong_hamburger_spec(k: int, k1: int) -> PoleSpec:
    if not 1 <= k1 <= k:
        raise ValueError("need 1 <= k1 <= k")
    return PoleSpec(k - k1, [(0, k1)])


def strong_hamburger_solve(data: RationalMoments, spec: PoleSpec, cfg: SolverConfig | None = None
                           ) -> AtomicMeasure | InfeasibleReason:
    """Measure on the line for data ``L(f / x^{2 k1})``, avoiding 0."""
    if spec.complex_poles or len(spec.real_poles) != 1 or spec.real_poles[0][0] != 0:
        raise ValueError("strong Hamburger data needs exactly one real pole, at 0")
    return solve_rtmp(data, spec, ClosedSet.real_line(), cfg)


# ---------------------------------------------------------------- bivariate data


@dataclass(frozen=True)
class BivariateSequence:
    k: int
    beta: Mapping[tuple[int, int], Fraction] = field(compare=False)

    def __init__(self, k: int, beta: Mapping | Iterable):
        items = beta.items() if isinstance(beta, Mapping) else ((tuple(t[:2]), t[2]) for t in beta)
        vals = {(int(i), int(j)): to_rat(v) for (i, j), v in items}
        missing = [(i, j) for i, j in _indices(2 * k) if (i, j) not in vals]
        if missing:
            raise ValueError(f"bivariate sequence is missing indices, e.g. {missing[0]}")
        extra = [ij for ij in vals if ij[0] < 0 or ij[1] < 0 or sum(ij) > 2 * k]
        if extra:
            raise ValueError(f"index {extra[0]} out of range for degree {2 * k}")
        object.__setattr__(self, "k", int(k))
        object.__setattr__(self, "beta", vals)

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        return self.beta[ij]

    def __eq__(self, other) -> bool:
        return isinstance(other, BivariateSequence) and self.k == other.k and self.beta == other.beta

    def __add__(self, other: BivariateSequence) -> BivariateSequence:
        return BivariateSequence(self.k, {ij: v + other.beta[ij] for ij, v in self.beta.items()})

    def riesz(self, poly: Mapping[tuple[int, int], Fraction]) -> Fraction:
        return sum((c * self.beta[ij] for ij, c in poly.items()), Fraction(0))

    @classmethod
    def of_measure(cls, k: int, points: Iterable, densities: Iterable) -> BivariateSequence:
        pts = [(to_rat(x), to_rat(y)) for x, y in points]
        rs = [to_rat(r) for r in densities]
        return cls(k, {(i, j): sum((r * x ** i * y ** j for (x, y), r in zip(pts, rs)), Fraction(0))
                       for i, j in _indices(2 * k)})


def _indices(d: int) -> list[tuple[int, int]]:
    # graded lexicographic, x before y
    return [(t - j, j) for t in range(d + 1) for j in range(t + 1)]


def bivariate_moment_matrix(beta: BivariateSequence) -> list[list[Fraction]]:
    mons = _indices(beta.k)
    return [[beta[(a + c, b + d)] for c, d in mons] for a, b in mons]


def bivariate_square_positive(beta: BivariateSequence) -> PsdReport:
    return symmetric_psd_report(bivariate_moment_matrix(beta))


def circle_relations_check(beta: BivariateSequence) -> bool:
    return all(beta[(i + 2, j)] + beta[(i, j + 2)] == beta[(i, j)] for i, j in _indices(2 * beta.k - 2))


# ---------------------------------------------------------------- parametrization


def circle_point(t) -> tuple:
    """``((t^2 - 1) / (t^2 + 1), 2 t / (t^2 + 1))``; exact on rational input."""
    d = t * t + 1
    return (t * t - 1) / d, 2 * t / d


def circle_spec(k: int) -> PoleSpec:
    return PoleSpec(0, [], [(1, 2 * k)])


def _binomial_poly(sign: int, a: int, b: int) -> dict[tuple[int, int], Fraction]:
    # (1 + sign*x)^a * y^b
    return {(c, b): Fraction(comb(a, c) * sign ** c) for c in range(a + 1)}


def circle_univariate_moments(beta: BivariateSequence) -> MomentSequence:
    """``L(t^i) = L(t^i / (t^2 + 1)^{2k})`` for ``i = 0..4k``."""
    k = beta.k
    scale = Fraction(1, 2 ** (2 * k))
    out = []
    for i in range(4 * k + 1):
        poly = _binomial_poly(-1, 2 * k - i, i) if i <= 2 * k else _binomial_poly(1, i - 2 * k, 4 * k - i)
        out.append(scale * beta.riesz(poly))
    return MomentSequence(out)


def circle_to_univariate(beta: BivariateSequence) -> RationalMoments:
    if not circle_relations_check(beta):
        raise ValueError("beta does not satisfy the circle relations")
    return power_to_rational(circle_univariate_moments(beta), circle_spec(beta.k))


@dataclass(frozen=True)
class CircleMeasure:
    atoms: tuple[tuple, ...]
    densities: tuple
    exact: bool = False
    info: dict = field(default_factory=dict, compare=False, repr=False)

    def __len__(self) -> int:
        return len(self.atoms)

    def moment(self, i: int, j: int):
        if self.exact:
            return sum((r * x ** i * y ** j for (x, y), r in zip(self.atoms, self.densities)), Fraction(0))
        return math.fsum(float(r) * float(x) ** i * float(y) ** j for (x, y), r in zip(self.atoms, self.densities))


def _univariate_measure(L: MomentSequence, cfg: SolverConfig) -> AtomicMeasure | InfeasibleReason:
    """Measure matching ``L`` up to degree ``4k - 1``; the top moment is left as a deficit."""
    h = build_hankel(L).rows()
    if linalg.ldl_classify(h)[0] == "indefinite":
        return InfeasibleReason("positivity_violated", "univariate Hankel matrix is not psd")
    m = len(h) - 1
    lead = [row[:m] for row in h[:m]]
    if linalg.ldl_classify(lead)[0] == "positive_definite":
        # flat completion: smallest top moment keeping the Hankel matrix psd
        v = [row[m] for row in h[:m]]
        top = linalg.dot(v, linalg.solve(lead, v))
        L = MomentSequence(list(L.values[:-1]) + [top])
    gp = generating_polynomial(L)
    roots = _exact_or_float_roots(gp.p, cfg.tol)
    if roots is None:
        return InfeasibleReason("verification_failed", f"generating polynomial {gp.p} lacks simple real roots")
    if not roots:
        return AtomicMeasure((), (), True)
    return _measure_on(sorted(roots, key=float), L, gp.p)


def circle_solve(beta: BivariateSequence, cfg: SolverConfig | None = None) -> CircleMeasure | InfeasibleReason:
    """Representing measure on ``x^2 + y^2 = 1`` for ``beta`` (``k >= 2``)."""
    cfg = cfg or SolverConfig()
    if beta.k < 2:
        raise ValueError("circle problem needs k >= 2")
    rep = bivariate_square_positive(beta)
    if not rep.is_psd:
        return InfeasibleReason("positivity_violated", "bivariate moment matrix is not psd", rep)
    if not circle_relations_check(beta):
        return InfeasibleReason("circle_relations_failed", "beta_{i+2,j} + beta_{i,j+2} != beta_{i,j} for some i+j <= 2k-2")
    L = circle_univariate_moments(beta)
    nu = _univariate_measure(L, cfg)
    if isinstance(nu, InfeasibleReason):
        return nu
    k = beta.k
    top = L.degree
    if nu.exact:
        delta = L[top] - sum((r * t ** top for t, r in zip(nu.atoms, nu.densities)), Fraction(0))
    else:
        delta = float(L[top]) - math.fsum(float(r) * float(t) ** top for t, r in zip(nu.atoms, nu.densities))
    scale = 1 + abs(float(L[top]))
    if float(delta) < -cfg.tol * scale:
        raise ArithmeticError(f"negative deficit {float(delta):.3g} in the top moment")
    atoms, dens = [], []
    for t, r in zip(nu.atoms, nu.densities):
        if nu.exact:
            atoms.append(circle_point(t))
            dens.append(r * (t * t + 1) ** (2 * k))
        else:
            t = float(t)
            atoms.append(circle_point(t))
            dens.append(float(r) * (t * t + 1) ** (2 * k))
    if float(delta) > cfg.tol * scale:
        atoms.append((Fraction(1), Fraction(0)) if nu.exact else (1.0, 0.0))
        dens.append(delta)
    out = CircleMeasure(tuple(atoms), tuple(dens), nu.exact, {"univariate": nu, "delta": delta})
    check = circle_verify(out, beta, max(cfg.tol, 1e-12))
    if not check.passed:
        return InfeasibleReason("verification_failed", check.summary(), out)
    return out


@dataclass(frozen=True)
class CircleVerification:
    moments_ok: bool
    on_circle: bool
    densities_ok: bool
    residuals: tuple[tuple[tuple[int, int], float], ...]

    @property
    def passed(self) -> bool:
        return self.moments_ok and self.on_circle and self.densities_ok

    def summary(self) -> str:
        worst = max(self.residuals, key=lambda t: t[1], default=None)
        return (f"moments_ok={self.moments_ok} on_circle={self.on_circle} densities_ok={self.densities_ok}"
                + (f" worst {worst[0]} residual {worst[1]:.3g}" if worst else ""))


def circle_verify(mu: CircleMeasure, beta: BivariateSequence, tol: float = 1e-9) -> CircleVerification:
    resid = []
    for ij in _indices(2 * beta.k):
        val = mu.moment(*ij)
        resid.append((ij, float(abs(val - beta[ij])) / (1 + abs(float(beta[ij])))))
    on = all(abs(float(x) ** 2 + float(y) ** 2 - 1) <= tol for x, y in mu.atoms)
    return CircleVerification(all(r <= tol for _, r in resid), on, all(float(r) > 0 for r in mu.densities),
                              tuple(resid))
