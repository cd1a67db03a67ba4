import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ellstat.ecfp import (
    ORACLE_LIMIT,
    Curve,
    CurveModP,
    add,
    block_invariants,
    brute_force_census,
    count_points_naive,
    group_order,
    group_structure,
    isomorphism_classes,
    j_invariant,
    local_invariants,
    local_invariants_mod_p,
    point_order,
    random_point,
    reduce_mod_p,
    scalar_mul,
)
from ellstat.modmath import primes
from oracles import affine_points, exhaustive_structure, long_model_count

A = Curve(0, 0, 0, -1, 0)
E = Curve(0, 0, 0, 6, -2)
F = Curve(0, 0, 1, -1, 0)


# --- curves and reduction ----------------------------------------------------

def test_singular_curve_rejected():
    with pytest.raises(ValueError):
        Curve(0, 0, 0, 0, 0)


def test_reduce_mod_p_examples():
    assert A.discriminant % 2 == 0
    assert reduce_mod_p(F, 37) is None
    c = reduce_mod_p(E, 5)
    assert (c.A, c.B) == (1, 3)
    with pytest.raises(ValueError):
        reduce_mod_p(E, 3)


def test_reduction_preserves_point_count():
    for curve in (E, F, Curve(1, -1, 1, -2, 3)):
        for p in primes(5, 200):
            c = reduce_mod_p(curve, p)
            if c is not None:
                assert count_points_naive(c) == long_model_count(curve.coefficients, p)


def test_j_invariants():
    assert A.j_rational() == 1728
    assert E.j_rational() == 1536 == 2**9 * 3
    assert F.j_rational() == Fraction(110592, 37)
    for curve in (A, E, F):
        j = curve.j_rational()
        for p in primes(5, 300):
            c = reduce_mod_p(curve, p)
            if c is not None:
                assert j_invariant(c) == j.numerator * pow(j.denominator, -1, p) % p


# --- group law -------------------------------------------------------------

def test_group_law_examples():
    c = CurveModP(5, 4, 0)  # y^2 = x^3 - x
    assert add((0, 0), None, c) == (0, 0)
    assert add((0, 0), (1, 0), c) == (4, 0)
    for P in affine_points(5, 4, 0):
        assert scalar_mul(8, P, c) is None
        assert scalar_mul(0, P, c) is None


def test_point_order_examples():
    c = CurveModP(5, 4, 0)
    assert point_order(None, c, 8) == 1
    assert point_order((0, 0), c, 8) == 2
    assert point_order((3, 2), c, 8) == 4
    with pytest.raises(ValueError):
        point_order((3, 2), c, 2)


@given(st.sampled_from(primes(5, 60)), st.integers(0, 10**6), st.integers(0, 10**6), st.data())
def test_group_axioms(p, a, b, data):
    A_, B_ = a % p, b % p
    if (4 * A_**3 + 27 * B_ * B_) % p == 0:
        return
    c = CurveModP(p, A_, B_)
    pts = affine_points(p, A_, B_)
    P, Q, R = (data.draw(st.sampled_from(pts)) for _ in range(3))
    assert c.contains(add(P, Q, c))
    assert add(P, Q, c) == add(Q, P, c)
    assert add(add(P, Q, c), R, c) == add(P, add(Q, R, c), c)
    k = data.draw(st.integers(-50, 50))
    m = data.draw(st.integers(-50, 50))
    assert add(scalar_mul(k, P, c), scalar_mul(m, P, c), c) == scalar_mul(k + m, P, c)


def test_random_point_determinism():
    c = reduce_mod_p(A, 17)
    assert random_point(c, 1234) == random_point(c, 1234)
    for s in range(20):
        P = random_point(c, s)
        assert c.contains(P)
        assert scalar_mul(16, P, c) is None


# --- point counting and structure -----------------------------------------

def test_group_order_examples():
    assert group_order(reduce_mod_p(A, 5)) == 8
    assert group_order(reduce_mod_p(A, 17)) == 16
    assert group_order(reduce_mod_p(A, 7)) == 8


def test_group_structure_examples():
    assert group_structure(reduce_mod_p(A, 17), 0) == (4, 1)
    assert group_structure(reduce_mod_p(A, 5), 0) == (2, 2)
    assert group_structure(reduce_mod_p(A, 7), 0) == (2, 2)


@pytest.mark.parametrize("p", primes(1000, 1400)[:25])
def test_bsgs_matches_naive(p):
    rng = random.Random(p)
    for _ in range(6):
        a, b = rng.randrange(p), rng.randrange(p)
        if (4 * a**3 + 27 * b * b) % p == 0:
            continue
        c = CurveModP(p, a, b)
        n = count_points_naive(c)
        assert group_order(c, rng, method="bsgs") == n
        assert n + count_points_naive(c.twist()) == 2 * p + 2


def test_structure_matches_exhaustive_all_curves_small_p():
    for p in primes(5, 50):
        for a in range(p):
            for b in range(p):
                if (4 * a**3 + 27 * b * b) % p == 0:
                    continue
                n, d1, d2 = exhaustive_structure(p, a, b)
                rec = local_invariants_mod_p(CurveModP(p, a, b), p, 7)
                assert (rec.n, rec.d1, rec.d2) == (n, d1, d2), (p, a, b)


def test_local_invariants_examples():
    r = local_invariants(A, 17)
    assert (r.a, r.n, r.d1, r.d2, r.supersingular) == (2, 16, 4, 1, False)
    r = local_invariants(A, 7)
    assert (r.a, r.n, r.d1, r.d2, r.supersingular) == (0, 8, 2, 2, True)
    r = local_invariants(A, 2)
    assert r.status == "bad" and r.d1 == 0


def test_small_characteristic():
    assert not local_invariants(E, 3).good  # 3 divides the discriminant of E
    r = local_invariants(F, 3)
    assert r.good and r.n == long_model_count(F.coefficients, 3)
    r = local_invariants(F, 2)
    assert r.good and r.n == long_model_count(F.coefficients, 2) and r.d1 == 1


# --- kernel against independent paths ------------------------------------------

def test_kernel_matches_exhaustive_oracle():
    ps = np.array(primes(5, 160), dtype=np.int64)
    rng = random.Random(5)
    curves = [A, E, F] + [Curve(0, 0, 0, rng.randint(-50, 50), rng.randint(-50, 50)) for _ in range(6)]
    for curve in curves:
        block = block_invariants(curve, ps, seed=3)
        for i, p in enumerate(ps.tolist()):
            c = reduce_mod_p(curve, p)
            if c is None:
                assert not block.good[i] and block.d1[i] == 0
                continue
            assert (int(block.n[i]), int(block.d1[i])) == exhaustive_structure(p, c.A, c.B)[:2]


def test_kernel_matches_python_path_large_p():
    ps = np.array(primes(10**6, 10**6 + 3000), dtype=np.int64)
    for curve in (E, F, A):
        block = block_invariants(curve, ps, seed=11)
        for i, p in enumerate(ps.tolist()):
            rec = local_invariants(curve, p, seed=99)
            assert block.record(i) == rec


def test_block_without_d1():
    ps = np.array(primes(2, 500), dtype=np.int64)
    b = block_invariants(E, ps, need_d1=False)
    full = block_invariants(E, ps)
    assert (b.n == full.n).all()
    assert (b.d1[b.good] == -1).all()
    with pytest.raises(ValueError):
        b.record(5)


def test_seed_independence_of_results():
    ps = np.array(primes(5, 20000), dtype=np.int64)
    b1 = block_invariants(F, ps, seed=1)
    b2 = block_invariants(F, ps, seed=2**63 + 5)
    assert (b1.n == b2.n).all() and (b1.d1 == b2.d1).all()


# --- census oracle --------------------------------------------------------

def test_brute_force_census_examples():
    cen5 = brute_force_census(5)
    assert any((e.n, e.d1, e.d2) == (8, 2, 2) for e in cen5)
    for p in primes(5, 60):
        for e in brute_force_census(p):
            assert e.n == e.d1**2 * e.d2
    with pytest.raises(ValueError):
        brute_force_census(ORACLE_LIMIT + 2)


def test_census_classes_match_direct_grouping():
    p = 13
    pairs = [(a, b) for a in range(p) for b in range(p) if (4 * a**3 + 27 * b * b) % p]
    classes = {}
    for a, b in pairs:
        key = min(
            (u**4 * a % p, u**6 * b % p) for u in range(1, p)
        )
        classes.setdefault(key, []).append((a, b))
    assert len(brute_force_census(p)) == len(classes)
    assert sum(o for _, o in isomorphism_classes(p)) == len(pairs)


def test_census_total_weight():
    # sum over classes of 2/#Aut equals 2p
    for p in primes(5, 100):
        assert sum(e.weight for e in brute_force_census(p)) == 2 * p
