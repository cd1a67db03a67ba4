"""The local census: which d occur as d1(E) over F_p, the two existence
criteria, Hurwitz class numbers and Schoof's weighted count, plus the
averaged sums over primes.

D1(p) is the set of d = d1(E) for E/F_p.  It is closed under divisors, so
d is in D1(p) exactly when some curve has d | d1(E), i.e. when some trace a
with a^2 < 4p satisfies a = 2 mod d and p + 1 - a = 0 mod d^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .ecfp import brute_force_census
from .modmath import divisors, iter_primes, phi_plus, psi


def _check_prime_ge5(p: int) -> None:
    if p < 5:
        raise ValueError("p must be a prime >= 5")


def _odd_part(d: int) -> int:
    while d % 2 == 0:
        d //= 2
    return d


def d1_exists_congruence(p: int, d: int) -> int | None:
    """Smallest a with a^2 < 4p, a = 2 mod d and d^2 | p + 1 - a, if any.

    Such a lie in the single class a = p + 1 mod d^2 (given p = 1 mod d).
    """
    _check_prime_ge5(p)
    if d < 1:
        raise ValueError("d must be >= 1")
    if (p - 1) % d:
        return None
    bound = math.isqrt(4 * p - 1)
    dd = d * d
    a = -bound + ((p + 1 + bound) % dd)
    return a if a <= bound else None


def _solvable(p: int, a: int, d: int) -> bool:
    """x^2 - a x + p = 0 mod d^2 for some x = 1 mod d or some x = -1 mod d."""
    dd = d * d
    for eps in (1, -1):
        x = eps % d if d > 1 else 0
        while x < dd:
            if (x * x - a * x + p) % dd == 0:
                return True
            x += d
    return False


def modular_witnesses(p: int, d: int) -> list[int]:
    """All traces a (a^2 < 4p) for which the quadratic system is solvable."""
    _check_prime_ge5(p)
    if (p - 1) % d:
        return []
    e = _odd_part(d)
    bound = math.isqrt(4 * p - 1)
    out = []
    for a in range(-bound, bound + 1):
        if (a * a - 4 * p) % (e * e):
            continue  # local condition at the odd primes
        if _solvable(p, a, d):
            out.append(a)
    return out


def d1_exists_modular(p: int, d: int) -> bool:
    """Existence through x^2 - a x + p = 0 mod d^2 with x = +-1 mod d."""
    return bool(modular_witnesses(p, d))


def odd_criterion_traces(p: int, d: int) -> list[int]:
    """Traces with e^2 | a^2 - 4p, e the odd part of d."""
    e = _odd_part(d)
    bound = math.isqrt(4 * p - 1)
    return [a for a in range(-bound, bound + 1) if (a * a - 4 * p) % (e * e) == 0]


# --------------------------------------------------------------------------
# D1(p)
# --------------------------------------------------------------------------

def is_small(p: int, d: int) -> bool:
    """d < 2 p^(1/4), as the exact test d^4 < 16p."""
    return d**4 < 16 * p


@dataclass(frozen=True)
class CensusRecord:
    p: int
    divisor_pool: tuple[int, ...]
    members: dict[int, int]  # d -> witness trace a

    @property
    def small_count(self) -> int:
        return sum(1 for d in self.members if is_small(self.p, d))

    @property
    def large_count(self) -> int:
        return len(self.members) - self.small_count

    def check(self) -> None:
        p, mem = self.p, self.members
        if 1 not in mem or 2 not in mem:
            raise AssertionError(f"D1({p}) misses 1 or 2")
        for d in mem:
            if any(e not in mem for e in divisors(d)):
                raise AssertionError(f"D1({p}) not closed under divisors at {d}")
        for d in self.divisor_pool:
            if is_small(p, d) and d not in mem:
                raise AssertionError(f"small divisor {d} of p-1 missing from D1({p})")


def d1_set(p: int) -> CensusRecord:
    _check_prime_ge5(p)
    bound = math.isqrt(p) + 1
    pool = tuple(d for d in divisors(p - 1) if d <= bound)
    members = {}
    for d in pool:
        a = d1_exists_congruence(p, d)
        if a is not None:
            members[d] = a
    rec = CensusRecord(p, pool, members)
    rec.check()
    return rec


def brute_force_d1_closure(p: int) -> set[int]:
    """{d : d | d1(E) for some E/F_p}, by exhaustive enumeration."""
    out = set()
    for e in brute_force_census(p):
        out.update(divisors(e.d1))
    return out


# --------------------------------------------------------------------------
# class numbers
# --------------------------------------------------------------------------

def _check_disc(D: int) -> None:
    if D >= 0 or D % 4 not in (0, 1):
        raise ValueError(f"{D} is not a negative discriminant")


@lru_cache(maxsize=1 << 16)
def class_number(D: int) -> int:
    """Number of primitive reduced forms (a, b, c) of discriminant D < 0."""
    _check_disc(D)
    h = 0
    a = 1
    while 3 * a * a <= -D:
        for b in range(-a + 1, a + 1):
            if (b - D) % 2:
                continue
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            if math.gcd(math.gcd(a, b), c) == 1:
                h += 1
        a += 1
    return h


@dataclass(frozen=True)
class FormClassData:
    D: int
    h: int
    H: Fraction


def form_class_data(D: int) -> FormClassData:
    h = class_number(D)
    units = {-3: 3, -4: 2}.get(D, 1)
    return FormClassData(D, h, Fraction(h, units))


def hurwitz_weight(D: int) -> Fraction:
    """h(D) divided by half the number of units: 1/3 at -3, 1/2 at -4.

    This counts primitive forms only; schoof_mass needs the full sum
    over orders, see hurwitz_class_number.
    """
    return form_class_data(D).H


@lru_cache(maxsize=1 << 16)
def hurwitz_class_number(D: int) -> Fraction:
    """Hurwitz class number: sum of hurwitz_weight(D/f^2) over the orders
    containing the one of discriminant D."""
    _check_disc(D)
    total = Fraction(0)
    for f in range(1, math.isqrt(-D) + 1):
        if D % (f * f) == 0 and (D // (f * f)) % 4 in (0, 1):
            total += hurwitz_weight(D // (f * f))
    return total


def schoof_mass(p: int, d: int) -> Fraction:
    """Automorphism-weighted number of classes E/F_p with d | d1(E), d odd.

    Sum of H((a^2 - 4p)/d^2) over a^2 < 4p, a = p + 1 mod d^2; each class
    counts 2/#Aut(E).
    """
    _check_prime_ge5(p)
    if d % 2 == 0:
        raise ValueError("d must be odd")
    if (p - 1) % d:
        return Fraction(0)
    bound = math.isqrt(4 * p - 1)
    dd = d * d
    a = -bound + ((p + 1 + bound) % dd)
    total = Fraction(0)
    while a <= bound:
        total += hurwitz_class_number((a * a - 4 * p) // dd)
        a += dd
    return total


def brute_force_mass(p: int, d: int) -> tuple[Fraction, int]:
    """(weighted mass, raw class count) of classes with d | d1, by enumeration."""
    mass, raw = Fraction(0), 0
    for e in brute_force_census(p):
        if e.d1 % d == 0:
            mass += e.weight
            raw += 1
    return mass, raw


# --------------------------------------------------------------------------
# averages over primes
# --------------------------------------------------------------------------

def census_averages(X: int) -> tuple[int, int, int]:
    """(sum |D1(p)|, sum |D_s(p)|, sum |D_l(p)|) over primes 5 <= p <= X."""
    if X < 5:
        raise ValueError("X must be >= 5")
    total = small = 0
    for p in iter_primes(5, X):
        bound = math.isqrt(p) + 1
        for d in divisors(p - 1):
            if d > bound:
                break
            if d1_exists_congruence(p, d) is not None:
                total += 1
                small += is_small(p, d)
    return total, small, total - small


def divisor_density(X: int, alpha: Fraction) -> int:
    """sum over primes p <= X of #{d | p - 1 : d < (p - 1)^alpha}."""
    alpha = Fraction(alpha)
    if not 0 < alpha <= 2:
        raise ValueError("alpha must lie in (0, 2]")
    if X < 5:
        raise ValueError("X must be >= 5")
    r, q = alpha.numerator, alpha.denominator
    total = 0
    for p in iter_primes(2, X):
        n = p - 1
        nr = n**r
        total += sum(1 for d in divisors(n) if d**q < nr)
    return total


def cusp_count(d: int) -> int:
    """Number of cusps of X(d): phi_plus(d) * psi(d)."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return phi_plus(d) * psi(d)


def large_d1_mass(X: int) -> Fraction:
    """sum over p <= X and odd d | p - 1 with d^4 >= 16p of schoof_mass(p, d)."""
    if X < 5:
        raise ValueError("X must be >= 5")
    total = Fraction(0)
    for p in iter_primes(5, X):
        for d in divisors(p - 1):
            if d % 2 and not is_small(p, d):
                total += schoof_mass(p, d)
    return total


def supersingular_d1_bound(p: int) -> int:
    """Upper bound for d1 of a supersingular curve over F_p, p >= 5."""
    _check_prime_ge5(p)
    return 2


__all__ = [
    "CensusRecord",
    "brute_force_d1_closure",
    "brute_force_mass",
    "census_averages",
    "class_number",
    "cusp_count",
    "d1_exists_congruence",
    "d1_exists_modular",
    "d1_set",
    "divisor_density",
    "FormClassData",
    "form_class_data",
    "hurwitz_class_number",
    "hurwitz_weight",
    "is_small",
    "large_d1_mass",
    "modular_witnesses",
    "odd_criterion_traces",
    "schoof_mass",
    "supersingular_d1_bound",
]
