import random
import zlib
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rtmp.hankel import MomentSequence, build_hankel, localizing_matrix, moments_of, psd_status
from rtmp.kset import ClosedSet, natural_description, pi_products
from rtmp.polyalg import Poly
from rtmp.solver import (
    AtomicMeasure,
    InfeasibleReason,
    PoleSet,
    PreconditionError,
    SolverConfig,
    extension_region,
    positivity_certificate,
    prescribed_atom_quadrature,
    shrink_away_from_poles,
    solve,
    solve_nonsingular,
    solve_singular,
    verify_measure,
)

from oracles import brute_moments, hankel_eigenvalues

UNIT = ClosedSet([(0, 1)])
EX1 = MomentSequence([1, F(1, 2), F(5, 12), F(3, 8), F(17, 48)])
EX2 = MomentSequence(["1", "13/12", "23/8", "307/48", "555/32", "9043/192", "17203/128"])
EX2_K = ClosedSet([("-inf", 0), (1, 2), (3, "inf")])
LINE = ClosedSet.real_line()

FAMILY = [
    UNIT,
    ClosedSet([(-1, 0), (1, 2)]),
    ClosedSet([(0, "inf")]),
    LINE,
    EX2_K,
]


def _atoms(mu):
    return sorted(float(a) for a in mu.atoms)


def test_solver_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(tol=0)
    with pytest.raises(ValueError):
        SolverConfig(max_retries=0)


def test_pole_set():
    ps = PoleSet([1, F(1, 2)])
    assert ps.points == (F(1, 2), 1) and len(ps) == 2
    with pytest.raises(ValueError):
        PoleSet([1, 1])
    assert ps.distance(0.75) == 0.25
    assert ps.hits(Poly.from_roots([1, 3])) == [1]


def test_certificate_example_one():
    cert = positivity_certificate(EX1, UNIT)
    assert cert.verdict == "positive_singular"
    assert cert.witness.f == Poly([0, 1, -1])
    assert cert.report(Poly([0, 1, -1])).kernel_basis == [Poly([F(-1, 2), 1])]
    assert all(cert.report(f).status == "positive_definite" for f in (Poly([1]), Poly([0, 1]), Poly([1, -1])))


def test_certificate_example_two_all_definite():
    cert = positivity_certificate(EX2, EX2_K)
    assert cert.verdict == "strictly_positive" and cert.witness is None
    assert len(cert.products) == 4
    assert all(rep.status == "positive_definite" for rep in cert.per_product.values())
    assert cert.report(Poly([1])).eigenvalue_estimates == pytest.approx(hankel_eigenvalues(EX2.values))


def test_certificate_violated_witness():
    cert = positivity_certificate(MomentSequence([1, 5, 25, 125, 625]), UNIT)
    assert cert.verdict == "violated" and cert.witness.f == Poly([1, -1])
    with pytest.raises(ValueError):
        positivity_certificate(MomentSequence([1, 0, 1, 0]), UNIT)


def test_extension_region_line():
    region = extension_region(MomentSequence([1, 0, 1]), LINE)
    assert region.x_interval == (float("-inf"), float("inf"))
    assert [q for _, q in region.y_lower] == [Poly([1, 0, 1])]
    assert region.y_upper == ()


def test_extension_region_odd_products_give_half_lines():
    gamma = moments_of([F(1, 4), F(3, 4)], [1, 1], 2)
    region = extension_region(gamma, UNIT)
    lo, hi = region.x_interval
    # x must sit strictly between the bounds forced by x and 1 - x
    assert lo < float(sum(F(a) ** 3 for a in (F(1, 4), F(3, 4)))) < hi
    assert len(region.y_lower) == 1 and len(region.y_upper) == 1


def test_extension_region_rejects_singular_input():
    with pytest.raises(PreconditionError):
        extension_region(MomentSequence([1, 0, 0, 0, 0]), LINE)


def test_solve_singular_example_one():
    mu = solve_singular(EX1, UNIT)
    assert mu.exact and mu.atoms == (0, F(1, 2), 1) and mu.densities == (F(1, 3),) * 3
    hit = solve_singular(EX1, UNIT, PoleSet([0, 1]))
    assert hit.kind == "pole_hit"


def test_solve_singular_kernel_condition():
    bad = solve_singular(MomentSequence([1, 0, 0, 0, 0, 0, 1]), LINE)
    assert isinstance(bad, InfeasibleReason) and bad.kind == "unbounded_kernel_condition_failed"
    f0, p, d = bad.witness
    assert (f0.f, p, d) == (Poly([1]), Poly([0, 1]), 4)


def test_solve_singular_preconditions():
    with pytest.raises(PreconditionError):
        solve_singular(EX2, EX2_K)
    with pytest.raises(PreconditionError):
        solve_singular(EX1, ClosedSet([(0, 0), (1, 2)]), PoleSet([0]))


def test_solve_nonsingular_lebesgue_avoiding_midpoint():
    gamma = MomentSequence([1, F(1, 2), F(1, 3), F(1, 4), F(1, 5)])
    mu = solve_nonsingular(gamma, UNIT, PoleSet([F(1, 2)]))
    assert 1 <= len(mu) <= 4
    assert all(abs(a - 0.5) > 1e-6 for a in _atoms(mu))
    assert verify_measure(mu, gamma, UNIT, PoleSet([F(1, 2)]), 1e-9).passed


def test_solve_on_line_even_moments():
    gamma = MomentSequence([1, 0, 1, 0, 1])
    mu = solve(gamma, LINE)
    assert isinstance(mu, AtomicMeasure) and len(mu) <= 3
    assert verify_measure(mu, gamma, LINE, tol=1e-9).passed


def test_solve_nonsingular_example_two_with_poles():
    mu = solve_nonsingular(EX2, EX2_K, PoleSet([0, 1, 2]))
    assert len(mu) == 5
    assert verify_measure(mu, EX2, EX2_K, PoleSet([0, 1, 2]), 1e-9, pole_margin=1e-6).passed


def test_solve_nonsingular_rejects_bad_fixed_extension():
    with pytest.raises(PreconditionError):
        solve_nonsingular(EX2, EX2_K, fixed_extension=[0, 0])
    with pytest.raises(ValueError):
        solve_nonsingular(EX2, EX2_K, fixed_extension=[370])


def test_shrink_away_from_poles():
    assert shrink_away_from_poles(EX2, EX2_K, PoleSet()) == EX2_K
    shrunk = shrink_away_from_poles(EX2, EX2_K, PoleSet([0, 1, 2]))
    assert not set(shrunk.boundary_points()) & {0, 1, 2}
    assert all(EX2_K.contains(p) for lo, hi in shrunk.intervals for p in (lo, hi) if abs(p) != float("inf"))
    assert positivity_certificate(EX2, shrunk).verdict == "strictly_positive"


def test_prescribed_atom_examples():
    gamma = MomentSequence([2, 0, 2])
    assert prescribed_atom_quadrature(gamma, 0) is None
    mu = prescribed_atom_quadrature(gamma, 2)
    assert mu.atoms == (F(-1, 2), 2) and mu.densities == (F(8, 5), F(2, 5))
    assert mu.info["g"] == Poly([2, 4])


def test_prescribed_atom_recovers_generating_measure():
    atoms, dens = [F(-1), F(1, 3), F(2)], [F(1, 2), 1, F(1, 4)]
    gamma = moments_of(atoms, dens, 4)
    mu = prescribed_atom_quadrature(gamma, F(1, 3))
    assert list(mu.atoms) == atoms and list(mu.densities) == dens
    with pytest.raises(PreconditionError):
        prescribed_atom_quadrature(moments_of([0, 1], [1, 1], 4), 3)


def test_verify_measure_examples():
    mu = AtomicMeasure((0, F(1, 2), 1), (F(1, 3),) * 3, True)
    assert verify_measure(mu, EX1, UNIT).passed
    rep = verify_measure(mu, EX1, UNIT, PoleSet([0, 1]))
    assert rep.moments_ok and not rep.poles_ok and not rep.passed
    assert verify_measure(AtomicMeasure((0,), (1,), True), MomentSequence([1, 0, 0]), LINE).passed
    rep = verify_measure(AtomicMeasure((0,), (1,), True), MomentSequence([1, 1, 1]), LINE)
    assert not rep.moments_ok and rep.worst_moment == 1
    rep = verify_measure(AtomicMeasure((2.0,), (1.0,)), MomentSequence([1, 2, 4]), UNIT)
    assert rep.moments_ok and not rep.support_ok and rep.support_distance == 1.0


# ---------------------------------------------------------------- properties


def _instance(seed):
    rng = random.Random(zlib.crc32(f"solver-{seed}".encode()))
    K = FAMILY[seed % len(FAMILY)]
    k = rng.randint(1, 3)
    pts = set()
    while len(pts) < rng.randint(1, 5):
        d = rng.randint(1, 4)
        x = F(rng.randint(-4 * d, 5 * d), d)
        if K.contains(x):
            pts.add(x)
    atoms = sorted(pts)
    poles = [F(2 * rng.randint(-8, 10) + 1, 4) for _ in range(rng.randint(0, 2))]
    poles = [p for p in set(poles) if p not in pts and p not in K.isolated_points()]
    dens = [F(rng.randint(1, 9), rng.randint(1, 4)) for _ in atoms]
    return MomentSequence(brute_moments(atoms, dens, 2 * k)), K, PoleSet(poles)


def test_soundness_oracle():
    for seed in range(200):
        gamma, K, poles = _instance(seed)
        cert = positivity_certificate(gamma, K)
        assert cert.verdict != "violated", seed
        mu = solve(gamma, K, poles)
        if isinstance(mu, InfeasibleReason):
            # a singular functional's measure is unique; only its pole hits may be reported
            assert mu.kind == "pole_hit" and cert.verdict == "positive_singular", (seed, mu)
            assert isinstance(solve(gamma, K), AtomicMeasure)
            continue
        assert verify_measure(mu, gamma, K, poles, 1e-8).passed, seed


def test_strictness_equivalence():
    for seed in range(60):
        gamma, K, _ = _instance(seed)
        cert = positivity_certificate(gamma, K)
        every = all(psd_status(localizing_matrix(gamma, p.f)).status == "positive_definite"
                    for p in pi_products(natural_description(K), gamma.degree))
        assert (cert.verdict == "strictly_positive") == every


def test_singular_uniqueness():
    for seed in range(80):
        gamma, K, _ = _instance(seed)
        if positivity_certificate(gamma, K).verdict != "positive_singular":
            continue
        a = solve(gamma, K)
        b = solve(gamma, K, cfg=SolverConfig(rng_seed=seed + 1))
        assert _atoms(a) == pytest.approx(_atoms(b), abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.fractions(min_value=F(1, 50), max_value=5, max_denominator=50))
def test_extension_region_correctness(seed, delta):
    gamma, K, _ = _instance(seed)
    if positivity_certificate(gamma, K).verdict != "strictly_positive":
        return
    region = extension_region(gamma, K)
    for iv in region.feasible_x():
        lo, hi = iv.bounds
        x = F((max(lo, -50) + min(hi, 50)) / 2).limit_denominator(1000) if lo < hi else None
        if x is None or not region.x_admissible(x):
            continue
        low, _ = region.lower_at(x)
        up = region.upper_at(x)
        if up is not None and up - low <= 2 * delta:
            continue
        inside = gamma.extend(x, low + delta)
        assert positivity_certificate(inside, K).verdict != "violated"
        outside = gamma.extend(x, low - delta)
        assert positivity_certificate(outside, K).verdict == "violated"


def test_prescribed_atom_consistency():
    rng = random.Random(5)
    for _ in range(40):
        atoms = sorted({F(rng.randint(-20, 20), rng.randint(1, 4)) for _ in range(3)})
        if len(atoms) < 3:
            continue
        gamma = moments_of(atoms, [F(rng.randint(1, 5)) for _ in atoms], 4)
        x1 = F(rng.randint(-30, 30), rng.randint(1, 5))
        mu = prescribed_atom_quadrature(gamma, x1)
        if mu is None:
            continue
        assert x1 in [F(a) if isinstance(a, F) else a for a in mu.atoms] or min(abs(float(a) - float(x1)) for a in mu.atoms) < 1e-12
        assert verify_measure(mu, gamma, LINE, tol=1e-9).passed


@pytest.mark.parametrize("c", [F(3), F(2, 7), F(1000)])
def test_scaling_equivariance(c):
    for seed in range(30):
        gamma, K, poles = _instance(seed)
        a = solve(gamma, K, poles)
        b = solve(gamma.scale(c), K, poles)
        if isinstance(a, InfeasibleReason):
            assert isinstance(b, InfeasibleReason) and a.kind == b.kind
            continue
        assert _atoms(a) == pytest.approx(_atoms(b), abs=1e-9)
        assert [float(r) * float(c) for r in a.densities] == pytest.approx([float(r) for r in b.densities], rel=1e-9)
