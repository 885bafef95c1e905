"""Truncated K-moment problem with pole avoidance.

Entry points: :func:`positivity_certificate`, :func:`extension_region`,
:func:`solve_nonsingular`, :func:`solve_singular`, :func:`solve`,
:func:`prescribed_atom_quadrature` and :func:`verify_measure`.

All feasibility algebra runs over the rationals. Atoms and densities are
floats unless every atom happens to be rational, in which case the measure
is exact.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from . import linalg
from .hankel import (
    MomentSequence,
    NotPsdError,
    PsdReport,
    build_hankel,
    generating_polynomial,
    localize,
    localizing_matrix,
    psd_status,
    riesz,
)
from .kset import ClosedSet, PiProduct, classify, natural_description, pi_products
from .polyalg import Poly, RootFindingError, VandermondeError, real_roots, to_rat, vandermonde_solve
from .semialg import Interval, solve_constraints

GOLDEN = (math.sqrt(5) - 1) / 2


class SolverError(RuntimeError):
    pass


class PreconditionError(ValueError):
    pass


class RetriesExhausted(SolverError):
    def __init__(self, message: str, last_failure: str | None = None):
        super().__init__(message if last_failure is None else f"{message}; last failure: {last_failure}")
        self.last_failure = last_failure


@dataclass(frozen=True)
class PoleSet:
    points: tuple[Fraction, ...] = ()

    def __init__(self, points: Iterable = ()):
        pts = sorted(to_rat(p) for p in points)
        if len(set(pts)) != len(pts):
            raise ValueError("pole set contains duplicates")
        object.__setattr__(self, "points", tuple(pts))

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def distance(self, x: float) -> float:
        return min((abs(x - float(p)) for p in self.points), default=math.inf)

    def hits(self, f: Poly) -> list[Fraction]:
        """Poles that are exact zeros of ``f``."""
        return [p for p in self.points if f(p) == 0]


@dataclass(frozen=True)
class AtomicMeasure:
    atoms: tuple
    densities: tuple
    exact: bool = False
    info: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if len(self.atoms) != len(self.densities):
            raise ValueError("atoms and densities differ in length")

    def __len__(self) -> int:
        return len(self.atoms)

    @property
    def float_atoms(self) -> list[float]:
        return [float(a) for a in self.atoms]

    @property
    def float_densities(self) -> list[float]:
        return [float(r) for r in self.densities]

    def moment(self, f: Poly) -> float | Fraction:
        if self.exact:
            return sum((r * f(a) for a, r in zip(self.atoms, self.densities)), Fraction(0))
        return math.fsum(float(r) * f.eval_float(float(a)) for a, r in zip(self.atoms, self.densities))

    def power_moments(self, degree: int) -> list:
        if self.exact:
            return [sum((r * a ** i for a, r in zip(self.atoms, self.densities)), Fraction(0)) for i in range(degree + 1)]
        xs, rs = self.float_atoms, self.float_densities
        return [math.fsum(r * x ** i for x, r in zip(xs, rs)) for i in range(degree + 1)]

    def scaled(self, c) -> AtomicMeasure:
        return AtomicMeasure(self.atoms, tuple(r * c for r in self.densities), self.exact, dict(self.info))


@dataclass(frozen=True)
class InfeasibleReason:
    kind: str  # positivity_violated | pole_hit | unbounded_kernel_condition_failed | verification_failed | ...
    detail: str
    witness: object = field(default=None, compare=False)


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-9
    density_floor: float = 1e-10
    max_retries: int = 64
    max_extension_steps: int | None = None
    rng_seed: int = 0
    pole_margin: float = 1e-6

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_retries < 1:
            raise ValueError("max_retries must be at least 1")


# ---------------------------------------------------------------- positivity


@dataclass(frozen=True)
class PositivityCertificate:
    per_product: dict = field(compare=False)
    verdict: str  # strictly_positive | positive_singular | violated
    witness: PiProduct | None

    @property
    def products(self) -> list[PiProduct]:
        return list(self.per_product)

    def report(self, f: Poly) -> PsdReport:
        for prod, rep in self.per_product.items():
            if prod.f == f:
                return rep
        raise KeyError(f)


def positivity_certificate(gamma: MomentSequence, K: ClosedSet) -> PositivityCertificate:
    if gamma.degree % 2:
        raise ValueError("positivity certificate needs an even-degree moment sequence")
    prods = pi_products(natural_description(K), gamma.degree)
    reports: dict[PiProduct, PsdReport] = {}
    for prod in prods:
        reports[prod] = psd_status(localizing_matrix(gamma, prod.f))
    bad = next((p for p in prods if reports[p].status == "indefinite"), None)
    if bad is not None:
        return PositivityCertificate(reports, "violated", bad)
    singular = next((p for p in prods if reports[p].status == "psd_singular"), None)
    if singular is not None:
        return PositivityCertificate(reports, "positive_singular", singular)
    return PositivityCertificate(reports, "strictly_positive", None)


# ---------------------------------------------------------------- extension region


@dataclass(frozen=True)
class ExtensionRegion:
    """Feasible ``(x, y) = (gamma_{2k+1}, gamma_{2k+2})`` for one extension step.

    ``x_interval`` is the open interval cut out by the odd products, ``y_lower``
    and ``y_upper`` hold the exact quadratic bound on ``y`` for each even product.
    """

    gamma: MomentSequence
    x_interval: tuple
    y_lower: tuple[tuple[PiProduct, Poly], ...]
    y_upper: tuple[tuple[PiProduct, Poly], ...]
    x_bounds: tuple[tuple[PiProduct, str, Fraction], ...] = ()

    def x_admissible(self, x: Fraction) -> bool:
        lo, hi = self.x_interval
        return lo < x < hi

    def lower_at(self, x: Fraction) -> tuple[Fraction, PiProduct]:
        """Largest lower bound and the lowest-order product attaining it."""
        best, arg = None, None
        for prod, q in self.y_lower:
            v = q(x)
            if best is None or v > best:
                best, arg = v, prod
        return best, arg

    def upper_at(self, x: Fraction) -> Fraction | None:
        return min((q(x) for _, q in self.y_upper), default=None)

    def feasible_constraints(self) -> list[tuple[Poly, str]]:
        cons: list[tuple[Poly, str]] = []
        lo, hi = self.x_interval
        if lo != -math.inf:
            cons.append((Poly([-lo, 1]), ">"))
        if hi != math.inf:
            cons.append((Poly([hi, -1]), ">"))
        for _, u in self.y_upper:
            for _, l in self.y_lower:
                cons.append((u - l, ">="))
        return cons

    def feasible_x(self) -> list[Interval]:
        return solve_constraints(self.feasible_constraints() or [(Poly([1]), ">=")])

    def binding_set(self, product: PiProduct) -> list[Interval]:
        """``{x feasible : product's lower bound is >= every other lower bound}``."""
        mine = next(q for p, q in self.y_lower if p == product)
        cons = self.feasible_constraints()
        cons += [(mine - q, ">=") for p, q in self.y_lower if p != product]
        return solve_constraints(cons or [(Poly([1]), ">=")])


def _schur_data(h_rows: list[list[Fraction]], const: list[Fraction], lin: list[Fraction]) -> tuple[Fraction, Fraction, Fraction]:
    # v(x) = const + lin*x ; returns coefficients of v^T H^{-1} v in 1, x, x^2
    if not h_rows:
        return Fraction(0), Fraction(0), Fraction(0)
    w = linalg.solve(h_rows, const)
    u = linalg.solve(h_rows, lin)
    return linalg.dot(const, w), 2 * linalg.dot(const, u), linalg.dot(lin, u)


def extension_region(gamma: MomentSequence, K: ClosedSet) -> ExtensionRegion:
    if gamma.degree % 2:
        raise ValueError("extension region needs an even-degree moment sequence")
    n = gamma.degree
    g = gamma.values
    lo, hi = -math.inf, math.inf
    x_bounds = []
    lower, upper = [], []
    try:
        for prod in pi_products(natural_description(K), n + 2):
            f = prod.f
            d = f.degree
            lc = f.lc
            if d % 2:
                if d > n + 1:
                    continue
                m = (n + 1 - d) // 2  # side of the old localizing matrix
                fg = localize(gamma, f).values if d <= n else ()
                rows = [[fg[i + j] for j in range(m)] for i in range(m)]
                border = [fg[m + i] for i in range(m)]
                s = linalg.dot(border, linalg.solve(rows, border)) if m else Fraction(0)
                c = sum((f.coeff(j) * g[2 * m + j] for j in range(d)), Fraction(0))
                t = (s - c) / lc
                if lc > 0:
                    x_bounds.append((prod, ">", t))
                    lo = max(lo, t)
                else:
                    x_bounds.append((prod, "<", t))
                    hi = min(hi, t)
                continue
            m = (n + 2 - d) // 2
            fg = localize(gamma, f).values if d <= n else ()
            rows = [[fg[i + j] for j in range(m)] for i in range(m)]
            # border entries are f*gamma~ at indices m..2m-1; only the last involves x
            const = [fg[m + i] if m + i < len(fg) else Fraction(0) for i in range(m)]
            lin = [Fraction(0)] * m
            if m:
                j0 = 2 * m - 1
                const[-1] = sum((f.coeff(j) * g[j0 + j] for j in range(d)), Fraction(0))
                lin[-1] = lc
            s0, s1, s2 = _schur_data(rows, const, lin)
            c = sum((f.coeff(j) * g[2 * m + j] for j in range(d - 1)), Fraction(0))
            bound = Poly([(s0 - c) / lc, (s1 - f.coeff(d - 1)) / lc, s2 / lc])
            (lower if lc > 0 else upper).append((prod, bound))
    except linalg.SingularMatrixError:
        raise PreconditionError("extension region needs a strictly positive functional") from None
    if not lo < hi:
        raise SolverError("empty extension interval; input is not strictly positive")
    return ExtensionRegion(gamma, (lo, hi), tuple(lower), tuple(upper), tuple(x_bounds))


# ---------------------------------------------------------------- verification


@dataclass(frozen=True)
class VerificationReport:
    moments_ok: bool
    support_ok: bool
    poles_ok: bool
    densities_ok: bool
    moment_residuals: tuple[float, ...]
    worst_moment: int | None
    support_distance: float
    pole_distance: float
    min_density: float

    @property
    def passed(self) -> bool:
        return self.moments_ok and self.support_ok and self.poles_ok and self.densities_ok

    def failures(self) -> list[str]:
        out = []
        if not self.moments_ok:
            out.append(f"moment {self.worst_moment} residual {max(self.moment_residuals):.3g}")
        if not self.support_ok:
            out.append(f"atom outside K by {self.support_distance:.3g}")
        if not self.poles_ok:
            out.append(f"atom within {self.pole_distance:.3g} of a pole")
        if not self.densities_ok:
            out.append(f"density {self.min_density:.3g} below floor")
        return out


def _distance_to(K: ClosedSet, x: float) -> float:
    best = math.inf
    for lo, hi in K.intervals:
        if lo <= x <= hi:
            return 0.0
        best = min(best, abs(x - float(lo)) if x < lo else abs(x - float(hi)))
    return best


def verify_measure(
    mu: AtomicMeasure,
    gamma: MomentSequence,
    K: ClosedSet,
    poles: PoleSet = PoleSet(),
    tol: float = 1e-9,
    density_floor: float = 0.0,
    pole_margin: float | None = None,
) -> VerificationReport:
    moms = mu.power_moments(gamma.degree)
    resid = tuple(float(abs(m - g)) / (1 + abs(float(g))) for m, g in zip(moms, gamma.values))
    worst = max(range(len(resid)), key=resid.__getitem__) if resid else None
    xs = mu.float_atoms
    sup = max((_distance_to(K, x) for x in xs), default=0.0)
    margin = tol if pole_margin is None else max(tol, pole_margin)
    pd = min((poles.distance(x) for x in xs), default=math.inf)
    exact_hit = mu.exact and any(a in poles.points for a in mu.atoms)
    mind = min(mu.float_densities, default=math.inf)
    return VerificationReport(
        moments_ok=all(r <= tol for r in resid),
        support_ok=sup <= tol,
        poles_ok=not exact_hit and pd > margin,
        densities_ok=mind > density_floor,
        moment_residuals=resid,
        worst_moment=worst,
        support_distance=sup,
        pole_distance=pd,
        min_density=mind,
    )


# ---------------------------------------------------------------- shared helpers


def _check_poles_vs_isolated(K: ClosedSet, poles: PoleSet) -> None:
    iso = set(K.isolated_points())
    bad = [p for p in poles if p in iso]
    if bad:
        raise PreconditionError(f"poles {', '.join(map(str, bad))} are isolated points of K")


def _exact_or_float_roots(p: Poly, tol: float) -> list | None:
    """Distinct real roots of ``p``; rational roots are returned exactly. ``None`` if not all simple and real."""
    if p.degree <= 0:
        return []
    try:
        rs = real_roots(p, tol=1e-10)
    except RootFindingError:
        return None
    if len(rs.roots) != p.degree or any(m != 1 for _, m in rs.roots):
        return None
    out = []
    for r, _ in rs.roots:
        cand = Fraction(r).limit_denominator(10 ** 6)
        out.append(cand if p(cand) == 0 else r)
    return out


def _merge_atoms(exact: Sequence[Fraction], approx: Sequence) -> list:
    atoms = list(exact)
    for r in approx:
        if any(abs(float(r) - float(a)) <= 1e-12 * (1 + abs(float(a))) for a in atoms):
            continue
        atoms.append(r)
    return sorted(atoms, key=float)


def _refine_root(p: Poly, r: float, bits: int = 160) -> Fraction:
    """Exact Newton steps from a double-precision root, rounded to ``bits`` binary digits."""
    dp = p.derivative()
    x = Fraction(r)
    scale = 2 ** (bits - max(0, math.frexp(r)[1]))
    for _ in range(4):
        d = dp(x)
        if d == 0:
            break
        step = p(x) / d
        if abs(step) > 1e-6 * (1 + abs(r)):
            return Fraction(r)  # not converging to this root; keep the double
        x = Fraction(round((x - step) * scale), scale)
        if step == 0 or abs(step) * scale < 1:
            break
    return x


def _measure_on(atoms: list, gamma: MomentSequence, poly: Poly | None = None) -> AtomicMeasure:
    # inexact atoms are refined against ``poly`` before the exact density solve; atom rounding near a
    # pole is otherwise amplified when the densities are pushed forward to rational data
    exact = all(isinstance(a, Fraction) for a in atoms)
    nodes = [a if isinstance(a, Fraction) else (_refine_root(poly, a) if poly is not None else Fraction(a))
             for a in atoms]
    dens = vandermonde_solve(nodes, gamma.values)
    if not exact:
        atoms = [float(a) for a in nodes]
        dens = [float(r) for r in dens]
    return AtomicMeasure(tuple(atoms), tuple(dens), exact)


# ---------------------------------------------------------------- singular case


def solve_singular(
    gamma: MomentSequence, K: ClosedSet, poles: PoleSet = PoleSet(), cfg: SolverConfig | None = None,
    certificate: PositivityCertificate | None = None,
) -> AtomicMeasure | InfeasibleReason:
    cfg = cfg or SolverConfig()
    _check_poles_vs_isolated(K, poles)
    cert = certificate or positivity_certificate(gamma, K)
    if cert.verdict == "violated":
        return InfeasibleReason("positivity_violated", f"H_f is indefinite for f = {cert.witness.f}", cert.witness)
    if cert.verdict != "positive_singular":
        raise PreconditionError("solve_singular needs a singular positive functional")
    f0 = cert.witness
    p = cert.per_product[f0].kernel_basis[0]
    fp = f0.f * p
    if not K.is_bounded:
        d = gamma.degree - (f0.f * p * p).degree
        if d < 0:
            return InfeasibleReason("unbounded_kernel_condition_failed", "deg f0 p^2 exceeds the moment degree", f0)
        val = riesz(gamma, f0.f * Poly.monomial(d) * p * p)
        if val != 0:
            return InfeasibleReason(
                "unbounded_kernel_condition_failed", f"L(f0 x^{d} p^2) = {val} is nonzero", (f0, p, d))
    # no measure at all beats a measure through a pole
    hit = poles.hits(fp)
    if hit:
        return InfeasibleReason("pole_hit", f"pole {hit[0]} is a zero of f0*p = {fp}", hit[0])
    roots = _exact_or_float_roots(p, cfg.tol)
    if roots is None:
        return InfeasibleReason("verification_failed", f"kernel polynomial {p} has non-real or repeated roots", p)
    atoms = _merge_atoms(list(f0.zeros), roots)
    try:
        mu = _measure_on(atoms, gamma, p)
    except (VandermondeError, linalg.SingularMatrixError) as exc:
        return InfeasibleReason("verification_failed", f"density solve failed: {exc}")
    mu.info.update(f0=f0.f, kernel_polynomial=p)
    rep = verify_measure(mu, gamma, K, poles, cfg.tol, cfg.density_floor)
    if not rep.passed:
        return InfeasibleReason("verification_failed", "; ".join(rep.failures()), mu)
    return mu


# ---------------------------------------------------------------- nonsingular case


def _rational_in(lo: float, hi: float, t: float) -> Fraction:
    x = lo + t * (hi - lo)
    q = Fraction(x).limit_denominator(10 ** 6)
    if lo < q < hi and abs(float(q) - x) <= 1e-3 * (hi - lo):
        return q
    return Fraction(x)


def _anchor(iv: Interval, hint: Fraction | None) -> Fraction:
    lo, hi = iv.bounds
    if hint is not None and lo < hint < hi:
        return hint
    if math.isinf(lo) and math.isinf(hi):
        return Fraction(iv.sample)
    if math.isinf(hi):
        return Fraction(lo + max(1.0, abs(lo))).limit_denominator(10 ** 6)
    if math.isinf(lo):
        return Fraction(hi - max(1.0, abs(hi))).limit_denominator(10 ** 6)
    return _rational_in(lo, hi, 0.5)


def _vertex(q: Poly) -> Fraction | None:
    if q.degree == 2 and q.coeff(2) > 0:
        return -q.coeff(1) / (2 * q.coeff(2))
    return None


def _samples(iv: Interval, anchor: Fraction, rng: random.Random) -> Iterator[Fraction]:
    lo, hi = iv.bounds
    yield anchor
    offset = rng.random()
    # with one finite end the usable x may sit extremely close to it; far points leave a remote atom
    # carrying a vanishing density, so every other sample halves the distance to that end
    end = lo if math.isinf(hi) and not math.isinf(lo) else hi if math.isinf(lo) and not math.isinf(hi) else None
    j = 1
    while True:
        if end is not None and j % 2 == 0:
            dist = max(1.0, abs(end)) * 2.0 ** -(j // 2) * (1 + ((offset + j * GOLDEN) % 1.0)) / 2
            x = end + dist if end == lo else end - dist
            if lo < x < hi:
                yield Fraction(x)
        elif math.isinf(lo) or math.isinf(hi):
            scale = max(1.0, abs(float(anchor)))
            step = scale * 2.0 ** ((j - 1) // 2 - 3) * (1 + ((offset + j * GOLDEN) % 1.0))
            x = float(anchor) + (step if j % 2 else -step)
            if lo < x < hi:
                yield Fraction(x).limit_denominator(10 ** 6)
        else:
            yield _rational_in(lo, hi, (offset + j * GOLDEN) % 1.0)
        j += 1


@dataclass
class _Attempt:
    measure: AtomicMeasure | None
    failure: str


def _try_point(region: ExtensionRegion, x: Fraction, K: ClosedSet, poles: PoleSet, target: MomentSequence,
               cfg: SolverConfig) -> _Attempt:
    if not region.x_admissible(x):
        return _Attempt(None, f"x = {x} outside the odd-product interval")
    y, prod = region.lower_at(x)
    if y is None:
        return _Attempt(None, "no even product bounds the next moment")
    up = region.upper_at(x)
    if up is not None and y > up:
        return _Attempt(None, f"x = {x}: lower bound exceeds upper bound")
    hit = poles.hits(prod.f)
    if hit:
        return _Attempt(None, f"binding product {prod.f} vanishes at pole {hit[0]}")
    ext = region.gamma.extend(x, y)
    fg = localize(ext, prod.f)
    try:
        gp = generating_polynomial(fg)
    except NotPsdError:
        return _Attempt(None, "localized extension is not psd")
    if gp is None:
        return _Attempt(None, "localized extension stayed positive definite")
    p = gp.p
    if poles.hits(p):
        return _Attempt(None, f"generating polynomial {p} vanishes at a pole")
    roots = _exact_or_float_roots(p, cfg.tol)
    if roots is None:
        return _Attempt(None, f"generating polynomial {p} has non-real or repeated roots")
    atoms = _merge_atoms(list(prod.zeros), roots)
    try:
        mu = _measure_on(atoms, ext, p)
    except (VandermondeError, linalg.SingularMatrixError) as exc:
        return _Attempt(None, f"density solve failed: {exc}")
    rep = verify_measure(mu, target, K, poles, cfg.tol, cfg.density_floor, cfg.pole_margin)
    if not rep.passed:
        return _Attempt(None, "; ".join(rep.failures()))
    mu.info.update(binding_product=prod.f, generating_polynomial=p, extension=(x, y))
    return _Attempt(mu, "")


def _search(region: ExtensionRegion, K: ClosedSet, poles: PoleSet, target: MomentSequence, cfg: SolverConfig,
            rng: random.Random) -> tuple[AtomicMeasure | None, str, int]:
    streams = []
    for prod, q in region.y_lower:
        if poles.hits(prod.f):
            continue
        for iv in region.binding_set(prod):
            if iv.is_point:
                continue
            streams.append(_samples(iv, _anchor(iv, _vertex(q)), rng))
    if not streams:
        return None, "no pole-free product binds anywhere in the feasible region", 0
    last = ""
    tried = 0
    seen: set[Fraction] = set()
    stalls = 0
    while tried < cfg.max_retries and stalls < 4 * cfg.max_retries:
        for s in streams:
            x = next(s)
            if x in seen:
                stalls += 1
                continue
            seen.add(x)
            tried += 1
            att = _try_point(region, x, K, poles, target, cfg)
            if att.measure is not None:
                att.measure.info["tries"] = tried
                return att.measure, "", tried
            last = att.failure
            if tried >= cfg.max_retries:
                break
    return None, last, tried


def _round_up(v: Fraction) -> Fraction:
    # a nearby value with a small denominator keeps later exact arithmetic cheap
    r = v.limit_denominator(1000)
    return r if r > v else r + Fraction(1, 1000)


def _extension_step(region: ExtensionRegion) -> tuple[Fraction, Fraction]:
    feas = region.feasible_x()
    if not feas:
        raise SolverError("extension region is empty")
    hint = _vertex(region.y_lower[0][1]) if region.y_lower else None
    if hint is not None:
        hint = hint.limit_denominator(1000)
    iv = next((iv for iv in feas if not iv.is_point and hint is not None and iv.bounds[0] < hint < iv.bounds[1]),
              next((iv for iv in feas if not iv.is_point), feas[0]))
    x = _anchor(iv, hint)
    low, _ = region.lower_at(x)
    up = region.upper_at(x)
    if up is not None:
        y = (low + up) / 2 if low is not None else up - 1
    else:
        y = _round_up(low + max(Fraction(1), abs(low)))
    return x, y


def shrink_away_from_poles(gamma: MomentSequence, K: ClosedSet, poles: PoleSet, margin: float = 1e-6) -> ClosedSet:
    """A subset of ``K`` whose boundary avoids ``poles`` and on which ``gamma`` stays strictly positive.

    Boundary points of ``K`` that are poles are moved inward by a step that is
    shrunk until strict positivity holds again.
    """
    hits = set(poles.points) & set(K.boundary_points())
    if not hits:
        return K
    widths = [hi - lo for lo, hi in K.intervals if (lo in hits or hi in hits) and hi - lo != math.inf]
    eps = min(widths, default=Fraction(1)) / 4
    eps = min(eps, Fraction(1, 4))
    while eps > margin:
        ivs = [(lo + eps if lo in hits else lo, hi - eps if hi in hits else hi) for lo, hi in K.intervals]
        shrunk = ClosedSet(ivs)
        if positivity_certificate(gamma, shrunk).verdict == "strictly_positive":
            return shrunk
        eps /= 4
    raise SolverError("could not move the boundary of K off the poles while keeping strict positivity")


def solve_nonsingular(
    gamma: MomentSequence, K: ClosedSet, poles: PoleSet = PoleSet(), cfg: SolverConfig | None = None,
    fixed_extension: Sequence | None = None,
) -> AtomicMeasure:
    """Construct a representing measure for a strictly positive functional.

    When poles sit on the boundary of ``K`` the search runs on a slightly
    smaller set (see :func:`shrink_away_from_poles`), so every localizing
    product is nonzero at the poles. ``fixed_extension`` lists moments
    ``gamma_{2k+1}, gamma_{2k+2}, ...`` (an even number) appended first.
    """
    cfg = cfg or SolverConfig()
    _check_poles_vs_isolated(K, poles)
    cert = positivity_certificate(gamma, K)
    if cert.verdict != "strictly_positive":
        raise PreconditionError(f"solve_nonsingular needs a strictly positive functional, got {cert.verdict}")
    mass = gamma[0]
    if mass != 1:
        # search on the unit-mass functional so that c*gamma gets the same atoms; the floor then acts
        # relative to the total mass, and the absolute floor is re-checked on the rescaled measure
        try:
            unit = _solve_strict(gamma.scale(1 / mass), K, poles, cfg,
                                 [to_rat(v) / mass for v in fixed_extension or ()])
        except RetriesExhausted:
            unit = None
        if unit is not None:
            mu = unit.scaled(mass)
            if verify_measure(mu, gamma, K, poles, cfg.tol, cfg.density_floor, cfg.pole_margin).passed:
                return mu
    return _solve_strict(gamma, K, poles, cfg, fixed_extension)


def _solve_strict(gamma: MomentSequence, K: ClosedSet, poles: PoleSet, cfg: SolverConfig,
                  fixed_extension: Sequence | None) -> AtomicMeasure:
    steps =cfg.max_extension_steps if cfg.max_extension_steps is not None else classify(K).l1 + 3
    rng = random.Random(cfg.rng_seed)
    fixed = [to_rat(v) for v in (fixed_extension or ())]
    if len(fixed) % 2:
        raise ValueError("fixed extension must supply moments in pairs")
    current = gamma
    trace: list[tuple[Fraction, Fraction]] = []
    regions: list[ExtensionRegion] = []
    while fixed:
        x, y = fixed.pop(0), fixed.pop(0)
        if positivity_certificate(current.extend(x, y), K).verdict != "strictly_positive":
            raise PreconditionError(f"fixed extension ({x}, {y}) does not keep the functional strictly positive")
        regions.append(extension_region(current, K))
        current = current.extend(x, y)
        trace.append((x, y))
    work = shrink_away_from_poles(current, K, poles, cfg.pole_margin)
    failure = ""
    total = 0
    for step in range(steps + 1):
        region = extension_region(current, work)
        regions.append(region)
        mu, failure, tried = _search(region, K, poles, gamma, cfg, rng)
        total += tried
        if mu is not None:
            mu.info.update(extension_trace=tuple(trace), regions=tuple(regions), total_tries=total, working_set=work,
                           atom_bound=classify(K).atom_bound(gamma.degree // 2))
            return mu
        if step == steps:
            break
        x, y = _extension_step(region)
        current = current.extend(x, y)
        trace.append((x, y))
    raise RetriesExhausted(f"no measure after {steps} extension steps and {total} tries", failure)


# ---------------------------------------------------------------- dispatch


def solve(gamma: MomentSequence, K: ClosedSet, poles: PoleSet = PoleSet(), cfg: SolverConfig | None = None,
          fixed_extension: Sequence | None = None) -> AtomicMeasure | InfeasibleReason:
    cfg = cfg or SolverConfig()
    cert = positivity_certificate(gamma, K)
    if cert.verdict == "violated":
        return InfeasibleReason("positivity_violated", f"H_f is indefinite for f = {cert.witness.f}", cert.witness)
    if cert.verdict == "positive_singular":
        return solve_singular(gamma, K, poles, cfg, certificate=cert)
    return solve_nonsingular(gamma, K, poles, cfg, fixed_extension)


# ---------------------------------------------------------------- prescribed atom


def prescribed_atom_quadrature(gamma: MomentSequence, x1, tol: float = 1e-9) -> AtomicMeasure | None:
    """The ``(k+1)``-atomic measure with ``x1`` as an atom, or ``None`` if there is none.

    Raises :class:`SolverError` if such a measure exists but fails numerical verification.
    """
    if gamma.degree % 2:
        raise ValueError("prescribed-atom quadrature needs an even-degree moment sequence")
    h = build_hankel(gamma)
    if linalg.ldl_classify(h.rows())[0] != "positive_definite":
        raise PreconditionError("the Hankel matrix must be positive definite")
    x1 = to_rat(x1) if not isinstance(x1, float) or x1.is_integer() else Fraction(x1)
    k = gamma.degree // 2
    g = gamma.values
    h0 = [[g[i + j] for j in range(k)] for i in range(k)]
    hx = [[g[i + j + 1] for j in range(k)] for i in range(k)]
    hxx = [[g[i + j + 2] for j in range(k)] for i in range(k)]
    a = [[x1 * h0[i][j] - hx[i][j] for j in range(k)] for i in range(k)]
    b = [[x1 * hx[i][j] - hxx[i][j] for j in range(k)] for i in range(k)]
    da = linalg.det(a)
    if da == 0:
        return None
    # det(x A - B) = det(A) * det(x I - A^{-1} B)
    ainv_b = linalg.transpose([linalg.solve(a, col) for col in linalg.transpose(b)])
    gpoly = Poly(linalg.charpoly(ainv_b)) * da
    roots = _exact_or_float_roots(gpoly, tol)
    if roots is None:
        raise SolverError(f"det G(x1, x) = {gpoly} does not have {k} simple real roots")
    atoms = _merge_atoms([x1], roots)
    if len(atoms) != k + 1:
        raise SolverError("prescribed atom coincides with a root of det G")
    mu = _measure_on(atoms, gamma, gpoly)
    mu.info.update(g=gpoly)
    rep = verify_measure(mu, gamma, ClosedSet.real_line(), PoleSet(), tol)
    if not rep.passed:
        raise SolverError("prescribed-atom measure failed verification: " + "; ".join(rep.failures()))
    return mu
