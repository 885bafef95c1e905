from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rtmp.polyalg import (
    Poly,
    VandermondeError,
    poly_eval,
    poly_gcd,
    poly_mul,
    real_roots,
    squarefree_decomposition,
    vandermonde_solve,
)

from oracles import high_precision_roots

rats = st.fractions(min_value=-20, max_value=20, max_denominator=12)
polys = st.lists(rats, min_size=0, max_size=6).map(Poly)


def test_poly_normalizes_trailing_zeros():
    p = Poly([1, 2, 0, 0])
    assert p.coeffs == (1, 2)
    assert p.degree == 1 and p.lc == 2
    assert Poly([0, 0]).is_zero()


def test_poly_eval_examples():
    assert poly_eval(Poly([F(-1, 2), 1]), F(1, 2)) == 0
    assert poly_eval(Poly([0, 0, 1, -2, 1]), 2) == 4
    assert poly_eval(Poly.from_roots([0, 1, 2, 3]), 4) == 24


def test_poly_mul_examples():
    f1 = Poly.from_roots([0, 1])
    f2 = Poly.from_roots([2, 3])
    assert poly_mul(f1, f2) == Poly([0, -6, 11, -6, 1])
    p = Poly([3, F(1, 2), -7])
    assert poly_mul(Poly([1]), p) == p
    assert poly_mul(Poly([-1, 1]), Poly([1, 1])) == Poly([-1, 0, 1])


def test_divmod_and_gcd():
    a = Poly.from_roots([1, 2, 2])
    b = Poly.from_roots([2, 5])
    q, r = divmod(a, b)
    assert q * b + r == a and r.degree < b.degree
    assert poly_gcd(a, b) == Poly([-2, 1])
    with pytest.raises(ZeroDivisionError):
        divmod(a, Poly())


def test_format():
    assert str(Poly([0, -6, 11, -6, 1])) == "x^4 - 6*x^3 + 11*x^2 - 6*x"
    assert str(Poly([F(-1, 2), 1])) == "x - 1/2"
    assert str(Poly()) == "0"


def test_squarefree_decomposition_multiplicities():
    p = Poly.from_roots([1, 1, 1, F(1, 3), 4, 4])
    parts = squarefree_decomposition(p)
    assert {m: f for f, m in parts} == {1: Poly([F(-1, 3), 1]), 2: Poly([-4, 1]), 3: Poly([-1, 1])}


def test_real_roots_examples():
    assert real_roots(Poly([F(-1, 2), 1])).roots == ((0.5, 1),)
    assert real_roots(Poly([1, 0, 1])).roots == ()
    rs = real_roots(Poly([0, 2, -3, 1]))
    assert [m for _, m in rs.roots] == [1, 1, 1]
    assert rs.locations == pytest.approx([0, 1, 2], abs=1e-12)


def test_real_roots_multiplicity_and_zero_poly():
    rs = real_roots(Poly.from_roots([2, 2, -1]) * Poly([1, 0, 1]))
    assert [m for _, m in rs.roots] == [1, 2]
    assert rs.locations == pytest.approx([-1, 2], abs=1e-12)
    with pytest.raises(ValueError):
        real_roots(Poly())


def test_real_roots_against_high_precision():
    p = Poly.from_roots([F(-7, 3), F(1, 9), F(5, 2), 11]) * Poly([3, 1, 1])
    assert real_roots(p).locations == pytest.approx(high_precision_roots(p.coeffs), rel=1e-13)


def test_vandermonde_examples():
    assert vandermonde_solve([0, F(1, 2), 1], [1, F(1, 2), F(5, 12)]) == [F(1, 3)] * 3
    assert vandermonde_solve([F(7, 3)], [F(5)]) == [5]
    assert vandermonde_solve([2, F(-1, 2)], [2, 0]) == [F(2, 5), F(8, 5)]


def test_vandermonde_float_path_and_errors():
    rho = vandermonde_solve([0.0, 0.5, 1.0], [1, F(1, 2), F(5, 12)])
    assert rho == pytest.approx([1 / 3] * 3, abs=1e-14)
    with pytest.raises(VandermondeError):
        vandermonde_solve([1, 1], [1, 1])
    with pytest.raises(VandermondeError):
        vandermonde_solve([1.0, 1.0], [1, 1])
    with pytest.raises(ValueError):
        vandermonde_solve([1, 2], [1])


@given(polys, polys, polys)
def test_mul_commutative_associative(a, b, c):
    assert poly_mul(a, b) == poly_mul(b, a)
    assert poly_mul(poly_mul(a, b), c) == poly_mul(a, poly_mul(b, c))


@given(polys, polys, rats)
def test_eval_is_ring_homomorphism(a, b, x):
    assert poly_eval(a * b, x) == poly_eval(a, x) * poly_eval(b, x)
    assert poly_eval(a + b, x) == poly_eval(a, x) + poly_eval(b, x)


@settings(max_examples=60, deadline=None)
@given(st.lists(rats, min_size=1, max_size=6), st.lists(rats, min_size=0, max_size=4))
def test_real_roots_residual_bound(roots, extra):
    p = Poly.from_roots(roots) * (Poly(extra) if any(extra) else Poly([1]))
    rs = real_roots(p)
    assert sum(m for _, m in rs.roots) <= p.degree
    norm = float(max(abs(c) for c in p.coeffs))
    for r, _ in rs.roots:
        bound = rs.residual_bound * norm * max(1.0, abs(r)) ** p.degree
        assert abs(float(poly_eval(p, F(r)))) <= bound * (1 + 1e-12) + 1e-300


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-600, 600), min_size=1, max_size=6, unique=True),
       st.lists(st.fractions(min_value=F(1, 10), max_value=10, max_denominator=10), min_size=6, max_size=6))
def test_vandermonde_reproduces_power_sums(grid, weights):
    nodes = [g / 100 for g in grid]
    rhs = [sum(F(w) * F(x) ** i for x, w in zip(nodes, weights)) for i in range(len(nodes))]
    rho = vandermonde_solve(nodes, rhs)
    for i, b in enumerate(rhs):
        got = sum(r * x ** i for x, r in zip(nodes, rho))
        assert abs(got - float(b)) <= 1e-9 * (1 + abs(float(b)))
