import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ellstat.census import (
    brute_force_d1_closure,
    brute_force_mass,
    census_averages,
    class_number,
    cusp_count,
    d1_exists_congruence,
    d1_exists_modular,
    d1_set,
    divisor_density,
    form_class_data,
    hurwitz_class_number,
    hurwitz_weight,
    is_small,
    large_d1_mass,
    modular_witnesses,
    odd_criterion_traces,
    schoof_mass,
    supersingular_d1_bound,
)
from ellstat.constants import linnik_constant
from ellstat.ecfp import Curve, local_invariants
from ellstat.modmath import divisors, prime_pi, primes
from oracles import reduced_forms, sieve

A = Curve(0, 0, 0, -1, 0)
PRIMES = primes(5, 3000)


# --- the two existence criteria --------------------------------------------------

def test_congruence_examples():
    assert d1_exists_congruence(241, 15) == 17
    assert d1_exists_congruence(17, 4) == 2
    assert d1_exists_congruence(7, 4) is None


def test_modular_examples():
    assert d1_exists_modular(241, 15)
    assert d1_exists_modular(13, 3)
    assert 5 in modular_witnesses(13, 3)
    assert not d1_exists_modular(7, 5)  # 5 does not divide 6
    # 3 does divide 7 - 1: y^2 = x^3 + 2 over F_7 has group (Z/3)^2
    assert d1_exists_modular(7, 3) and d1_exists_congruence(7, 3) == -1
    assert 3 in brute_force_d1_closure(7)


def test_witness_distinctness_241_15():
    # 8 satisfies 15^2 | 8^2 - 4*241 but is not a trace with 15 | d1;
    # the congruence criterion finds 17 instead, and both criteria agree.
    assert (8 * 8 - 4 * 241) % 225 == 0
    assert 8 in odd_criterion_traces(241, 15)
    assert 8 not in modular_witnesses(241, 15)
    assert (241 + 1 - 8) % 225 != 0
    a = d1_exists_congruence(241, 15)
    assert a == 17 and a != 8 and d1_exists_modular(241, 15)


@given(st.sampled_from(PRIMES), st.data())
def test_criteria_agree(p, data):
    d = data.draw(st.sampled_from([d for d in divisors(p - 1) if d <= math.isqrt(p) + 1]))
    a = d1_exists_congruence(p, d)
    assert (a is not None) == d1_exists_modular(p, d)
    if a is not None:
        assert a * a < 4 * p and (a - 2) % d == 0 and (p + 1 - a) % (d * d) == 0
        assert a in modular_witnesses(p, d)


@given(st.sampled_from(PRIMES), st.data())
def test_odd_part_condition_is_necessary(p, data):
    """Every modular witness satisfies e^2 | a^2 - 4p for the odd part e."""
    d = data.draw(st.sampled_from(divisors(p - 1)))
    e = d
    while e % 2 == 0:
        e //= 2
    for a in modular_witnesses(p, d):
        assert (a * a - 4 * p) % (e * e) == 0


def test_odd_part_condition_alone_is_not_sufficient():
    # 225 | a^2 - 4*571 has solutions with |a| < 2 sqrt(571), yet no curve
    # over F_571 has 15 | d1: that would need 225 | 572 - a.
    assert odd_criterion_traces(571, 15)
    assert not d1_exists_modular(571, 15)
    assert all((572 - a) % 225 for a in range(-47, 48))


# --- D1(p) ------------------------------------------------------------------------------

def test_d1_set_examples():
    assert set(d1_set(5).members) == {1, 2}
    assert set(d1_set(17).members) == {1, 2, 4}
    rec = d1_set(13)
    assert set(rec.members) == {1, 2, 3, 4}
    assert rec.members[3] == -4 and rec.members[4] == -2


def test_d1_set_matches_brute_force_small():
    for p in primes(5, 120):
        assert set(d1_set(p).members) == brute_force_d1_closure(p)


def test_small_large_split():
    for p in PRIMES[:200]:
        rec = d1_set(p)
        assert rec.small_count + rec.large_count == len(rec.members)
        assert rec.small_count == sum(1 for d in rec.members if d**4 < 16 * p)
        for d in divisors(p - 1):
            if d**4 < 16 * p:
                assert d in rec.members
    assert is_small(17, 4) and not is_small(17, 5)


def test_supersingular_bound():
    assert supersingular_d1_bound(7) == 2
    assert local_invariants(A, 7).d1 == 2
    assert local_invariants(A, 11).d1 <= supersingular_d1_bound(11)
    with pytest.raises(ValueError):
        supersingular_d1_bound(3)


# --- class numbers -----------------------------------------------------------

def test_hurwitz_weight_examples():
    assert hurwitz_weight(-3) == Fraction(1, 3)
    assert hurwitz_weight(-4) == Fraction(1, 2)
    assert hurwitz_weight(-15) == 2
    for bad in (-1, -2, 0, 5):
        with pytest.raises(ValueError):
            hurwitz_weight(bad)


def test_class_numbers_match_form_enumeration():
    for N in range(3, 600):
        D = -N
        if D % 4 in (0, 1):
            h = len(reduced_forms(D))
            assert class_number(D) == h
            data = form_class_data(D)
            assert data.h == h >= 1


def test_hurwitz_class_number_values():
    assert hurwitz_class_number(-3) == Fraction(1, 3)
    assert hurwitz_class_number(-12) == Fraction(4, 3)
    assert hurwitz_class_number(-16) == Fraction(3, 2)
    assert hurwitz_class_number(-23) == 3


@given(st.sampled_from(PRIMES))
def test_kronecker_hurwitz_relation(p):
    """sum over |a| < 2 sqrt(p) of H(a^2 - 4p) equals 2p."""
    r = math.isqrt(4 * p - 1)
    assert sum(hurwitz_class_number(a * a - 4 * p) for a in range(-r, r + 1)) == 2 * p


# --- weighted counts ------------------------------------------------------

def test_schoof_mass_examples():
    assert schoof_mass(13, 3) == Fraction(5, 6)
    assert brute_force_mass(13, 3)[0] == Fraction(5, 6)
    assert schoof_mass(7, 5) == 0
    assert schoof_mass(7, 3) == brute_force_mass(7, 3)[0] == Fraction(1, 3)
    with pytest.raises(ValueError):
        schoof_mass(13, 4)


def test_schoof_mass_matches_weighted_census():
    for p in primes(5, 110):
        for d in divisors(p - 1):
            if d % 2:
                mass, raw = brute_force_mass(p, d)
                assert schoof_mass(p, d) == mass
                assert raw >= (1 if mass else 0)


def test_schoof_mass_total():
    for p in primes(5, 200):
        assert schoof_mass(p, 1) == 2 * p


# --- averages ----------------------------------------------------------------

def test_census_averages_partition_and_oracle():
    total, small, large = census_averages(100)
    assert total == small + large
    assert total == sum(len(brute_force_d1_closure(p)) for p in primes(5, 100))
    for X in (1000, 5000):
        t, s, l = census_averages(X)
        assert t == s + l == sum(len(d1_set(p).members) for p in primes(5, X))


def test_divisor_density_kernel():
    half = Fraction(1, 2)
    assert divisor_density(13, half) - divisor_density(12, half) == 3


def test_divisor_density_full_range():
    X = 20000
    ref = sum(len(divisors(p - 1)) for p in sieve(X))
    # p = 2 contributes nothing: its only divisor 1 is not < 1^alpha
    assert divisor_density(X, Fraction(3, 2)) == ref - 1
    assert divisor_density(X, 2) == ref - 1
    # at alpha = 1 the strict inequality d < n also drops d = n
    assert divisor_density(X, 1) == ref - prime_pi(X)


def test_divisor_density_symmetry():
    # d < sqrt(n) pairs with n/d > sqrt(n)
    X = 20000
    ref = sum(len(divisors(p - 1)) for p in sieve(X))
    squares = sum(1 for p in sieve(X) if math.isqrt(p - 1) ** 2 == p - 1)
    assert 2 * divisor_density(X, Fraction(1, 2)) + squares == ref


def test_divisor_density_asymptotic():
    X = 10**6
    c = float(linnik_constant().value)
    ratio = divisor_density(X, Fraction(1, 2)) / (0.5 * c * X)
    assert 0.85 <= ratio <= 1.15


def test_cusp_counts():
    assert [cusp_count(d) for d in (2, 3, 5)] == [3, 4, 12]


def test_large_d1_mass():
    brute = Fraction(0)
    for p in primes(5, 50):
        for d in divisors(p - 1):
            if d % 2 and d**4 >= 16 * p:
                brute += brute_force_mass(p, d)[0]
    assert large_d1_mass(50) == brute
    values = [large_d1_mass(X) for X in (50, 200, 1000)]
    assert values == sorted(values)
    v = large_d1_mass(10**4)
    print(f"large_d1_mass(10^4) = {float(v):.1f}; 10 X^(5/4) = {10 * 1e4**1.25:.0f}")
