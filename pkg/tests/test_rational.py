import random
import zlib
from fractions import Fraction as F

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from rtmp.hankel import MomentSequence, moments_of
from rtmp.kset import ClosedSet
from rtmp.polyalg import Poly
from rtmp.rational import (
    AtomOnPoleError,
    PoleSpec,
    RationalMoments,
    basis_functions,
    build_q,
    partial_fractions,
    power_to_rational,
    pullback_q,
    pushforward_q,
    rational_moments_of,
    rational_to_power,
    solve_rtmp,
    verify_rtmp,
)
from rtmp.solver import AtomicMeasure, InfeasibleReason, verify_measure

from oracles import X, rational_basis, rational_data, worst_relative_residual

EX1_SPEC = PoleSpec(0, [(0, 1), (1, 1)])
EX1_DATA = RationalMoments(["1/48"], [["1/24", "5/12"], ["-1/24", "5/12"]])
EX2_SPEC = PoleSpec(0, [(0, 1), (1, 1), (2, 1)])
EX2_DATA = RationalMoments(["1539/128"], [["-255/64", "235/32"], ["3/64", "313/96"], ["253/64", "713/96"]])
EX2_K = ClosedSet([("-inf", 0), (1, 2), (3, "inf")])


def test_pole_spec_validation():
    assert EX2_SPEC.k == 3
    assert EX2_SPEC.shape() == (1, (2, 2, 2), ())
    with pytest.raises(ValueError):
        PoleSpec(0, [(1, 1), (1, 2)])
    with pytest.raises(ValueError):
        PoleSpec(0, [], [(0, 1)])
    with pytest.raises(ValueError):
        PoleSpec(0, [(1, 0)])
    with pytest.raises(ValueError):
        PoleSpec(-1)


def test_rational_moments_shape_check():
    with pytest.raises(ValueError):
        RationalMoments(["1"], [["1"]]).check(EX1_SPEC)
    assert RationalMoments.from_flat(EX1_DATA.flat(), EX1_SPEC) == EX1_DATA


def test_build_q_examples():
    assert build_q(EX1_SPEC) == Poly.from_roots([0, 0, 1, 1])
    assert build_q(EX2_SPEC) == Poly.from_roots([0, 0, 1, 1, 2, 2])
    assert build_q(PoleSpec(0, [], [(1, 2)])) == Poly([1, 0, 2, 0, 1])
    assert build_q(PoleSpec(2)) == Poly([1])


def test_partial_fractions_examples():
    pf = partial_fractions(Poly([1]), EX1_SPEC)
    assert pf.a == (0,) and pf.b == ((2, 1), (-2, 1))
    pf = partial_fractions(Poly([0, 1]), EX1_SPEC)
    assert pf.a == (0,) and pf.b == ((1, 0), (-1, 1))
    pf = partial_fractions(build_q(EX1_SPEC), EX1_SPEC)
    assert pf.a == (1,) and pf.b == ((0, 0), (0, 0))
    with pytest.raises(ValueError):
        partial_fractions(Poly.monomial(5), EX1_SPEC)


def test_partial_fractions_match_sympy_apart():
    spec = PoleSpec(1, [(F(-1, 2), 2)], [(3, 1)])
    f = Poly([5, -1, 0, F(2, 3), 1, 0, -4, 1])
    pf = partial_fractions(f, spec)
    basis = rational_basis(1, [(F(-1, 2), 2)], [(3, 1)])
    fx = sum(sp.Rational(c) * X ** i for i, c in enumerate(f.coeffs))
    qx = sum(sp.Rational(c) * X ** i for i, c in enumerate(build_q(spec).coeffs))
    combo = sum(sp.Rational(c) * b for c, b in zip(pf.flat(), basis))
    assert sp.cancel(combo - fx / qx) == 0
    assert sp.apart(fx / qx, X) == sp.apart(combo, X)


def test_rational_to_power_examples():
    gamma = rational_to_power(EX1_DATA, EX1_SPEC)
    assert gamma.values == (1, F(1, 2), F(5, 12), F(3, 8), F(17, 48))
    # mass of the example: 2/24 + 5/12 + 2/24 + 5/12
    assert 2 * F(1, 24) + F(5, 12) + 2 * F(1, 24) + F(5, 12) == gamma[0]
    zero = RationalMoments.from_flat([0] * 5, EX1_SPEC)
    assert rational_to_power(zero, EX1_SPEC).values == (0,) * 5
    assert power_to_rational(gamma, EX1_SPEC) == EX1_DATA


def test_example_two_conversion():
    gamma = rational_to_power(EX2_DATA, EX2_SPEC)
    assert gamma.values == tuple(F(v) for v in ["1", "13/12", "23/8", "307/48", "555/32", "9043/192", "17203/128"])


def test_pushforward_examples():
    mu = AtomicMeasure((0, F(1, 2), 1), (F(1, 3),) * 3, True)
    with pytest.raises(AtomOnPoleError):
        pushforward_q(mu, build_q(EX1_SPEC))
    two = pushforward_q(AtomicMeasure((2,), (1,), True), Poly([0, 0, 1]))
    assert two.atoms == (2,) and two.densities == (4,)
    nu = AtomicMeasure((F(-1, 3), F(5, 2)), (F(2), F(1, 7)), True)
    q = build_q(EX2_SPEC)
    assert pullback_q(pushforward_q(nu, q), q) == nu
    with pytest.raises(AtomOnPoleError):
        pullback_q(AtomicMeasure((1.0,), (1.0,)), q)


def test_solve_rtmp_examples():
    hit = solve_rtmp(EX1_DATA, EX1_SPEC, ClosedSet([(0, 1)]))
    assert isinstance(hit, InfeasibleReason) and hit.kind == "pole_hit"
    mu = solve_rtmp(EX2_DATA, EX2_SPEC, EX2_K)
    assert isinstance(mu, AtomicMeasure) and len(mu) == 5
    assert verify_rtmp(mu, EX2_DATA, EX2_SPEC, 1e-8).passed
    assert min(abs(a - p) for a in mu.float_atoms for p in (0, 1, 2)) > 1e-6
    assert worst_relative_residual(mu.atoms, mu.densities, EX2_DATA.flat(), 0, [(0, 1), (1, 1), (2, 1)], []) <= 1e-8
    power = mu.info["power_measure"]
    assert verify_measure(power, rational_to_power(EX2_DATA, EX2_SPEC), EX2_K, tol=1e-9).passed


def test_solve_rtmp_without_poles():
    spec = PoleSpec(2)
    data = RationalMoments.from_flat(moments_of([2], [1], 4).values, spec)
    mu = solve_rtmp(data, spec, ClosedSet.real_line())
    assert mu.atoms == (2,) and mu.densities == (1,)


def test_verify_rtmp_examples():
    bad = AtomicMeasure((F(1, 2),), (F(1, 16),), True)
    assert not verify_rtmp(bad, EX1_DATA, EX1_SPEC).data_ok
    on = AtomicMeasure((0, F(1, 2), 1), (F(1, 3),) * 3, True)
    rep = verify_rtmp(on, EX1_DATA, EX1_SPEC)
    assert not rep.poles_ok and not rep.passed
    # with no poles the check coincides with the power-moment check
    spec = PoleSpec(2)
    gamma = moments_of([-1, F(1, 3), 4], [1, 2, F(1, 2)], 4)
    mu = AtomicMeasure((-1.0, 1 / 3, 4.0), (1.0, 2.0, 0.5))
    data = RationalMoments.from_flat(gamma.values, spec)
    assert verify_rtmp(mu, data, spec, 1e-12).passed == verify_measure(mu, gamma, ClosedSet.real_line(), tol=1e-12).passed


def test_basis_labels():
    labels = [b.label for b in basis_functions(PoleSpec(1, [(2, 1)], [(3, 1)]))]
    assert labels == ["x^0", "x^1", "x^2", "(x-2)^-1", "(x-2)^-2", "(x^2+3)^-1", "x(x^2+3)^-1"]


# ---------------------------------------------------------------- properties

poles_real = st.lists(st.tuples(st.fractions(min_value=-3, max_value=3, max_denominator=4), st.integers(1, 2)),
                      max_size=2, unique_by=lambda t: t[0])
poles_complex = st.lists(st.tuples(st.fractions(min_value=F(1, 4), max_value=4, max_denominator=4), st.integers(1, 2)),
                         max_size=1)
specs = st.builds(PoleSpec, st.integers(0, 1), poles_real, poles_complex)


@settings(max_examples=50, deadline=None)
@given(specs, st.data())
def test_partial_fraction_recombination(spec, data):
    n = 2 * spec.k + 1
    coeffs = data.draw(st.lists(st.fractions(min_value=-9, max_value=9, max_denominator=9), max_size=n))
    f = Poly(coeffs)
    assert partial_fractions(f, spec).recombine() == f


@settings(max_examples=50, deadline=None)
@given(specs, st.data())
def test_conversion_linearity(spec, data):
    n = 2 * spec.k + 1
    vals = st.lists(st.fractions(min_value=-9, max_value=9, max_denominator=9), min_size=n, max_size=n)
    a = RationalMoments.from_flat(data.draw(vals), spec)
    b = RationalMoments.from_flat(data.draw(vals), spec)
    c = data.draw(st.fractions(min_value=-5, max_value=5, max_denominator=5))
    lhs = rational_to_power(a + b.scale(c), spec)
    rhs = [x + c * y for x, y in zip(rational_to_power(a, spec).values, rational_to_power(b, spec).values)]
    assert list(lhs.values) == rhs


@settings(max_examples=50, deadline=None)
@given(specs, st.lists(st.fractions(min_value=-4, max_value=4, max_denominator=5), min_size=1, max_size=4, unique=True))
def test_bijection_property(spec, atoms):
    atoms = [a for a in atoms if a not in spec.poles.points]
    if not atoms:
        return
    mu = AtomicMeasure(tuple(atoms), tuple(F(i + 1, 3) for i in range(len(atoms))), True)
    gamma = MomentSequence(mu.power_moments(2 * spec.k))
    pushed = pushforward_q(mu, build_q(spec))
    assert rational_moments_of(pushed, spec) == power_to_rational(gamma, spec)
    reals = [(lam, m) for lam, m in spec.real_poles]
    cplx = [(eta, m) for eta, m in spec.complex_poles]
    assert rational_moments_of(pushed, spec).flat() == rational_data(pushed.atoms, pushed.densities, spec.k0, reals, cplx)


KS = [ClosedSet([(-4, 4)]), ClosedSet.real_line(), ClosedSet([(-3, 0), (1, 3)]), ClosedSet([(-1, "inf")])]


def test_end_to_end_oracle():
    for seed in range(100):
        rng = random.Random(zlib.crc32(f"rational-{seed}".encode()))
        K = KS[seed % len(KS)]
        real = [(F(rng.randint(-8, 8), 4), rng.randint(1, 2)) for _ in range(rng.randint(0, 2))]
        real = list({lam: (lam, m) for lam, m in real if lam not in K.isolated_points()}.values())
        cplx = [(F(rng.randint(1, 8), 4), 1)] if rng.random() < 0.4 else []
        k0 = rng.randint(0, 1)
        spec = PoleSpec(k0, real, cplx)
        atoms = set()
        while len(atoms) < rng.randint(1, spec.k + 2):
            a = F(rng.randint(-12, 12), 3)
            if K.contains(a) and a not in spec.poles.points:
                atoms.add(a)
        atoms = sorted(atoms)
        dens = [F(rng.randint(1, 9), rng.randint(1, 3)) for _ in atoms]
        flat = rational_data(atoms, dens, k0, real, cplx)
        data = RationalMoments.from_flat(flat, spec)
        mu = solve_rtmp(data, spec, K)
        assert isinstance(mu, AtomicMeasure), (seed, mu)
        assert verify_rtmp(mu, data, spec, 1e-8).passed, seed
        assert all(K.contains(a, 1e-8) for a in mu.float_atoms)
