"""Exact integer and modular arithmetic used throughout the package.

Everything here is a pure function of its arguments.  Moduli are expected to
stay below 2**62; Python integers make the double-width products exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

MAX_MODULUS = 1 << 62

# Deterministic Miller-Rabin witnesses, valid for every n < 2**64.
_MR_BASES = (2, 325, 9375, 28178, 450775, 9780504, 1795265022)
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)

DEFAULT_SEGMENT = 1 << 20


def is_prime(n: int) -> bool:
    """Deterministic primality test for 0 <= n < 2**64."""
    if n < 2:
        return False
    for q in _SMALL_PRIMES:
        if n % q == 0:
            return n == q
    if n < 53 * 53:
        return True
    d = n - 1
    s = 0
    while not d & 1:
        d >>= 1
        s += 1
    for a in _MR_BASES:
        a %= n
        if a == 0:
            continue
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


# --------------------------------------------------------------------------
# prime streaming
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PrimeRange:
    """Inclusive range [lo, hi] of candidate primes."""

    lo: int
    hi: int

    def __post_init__(self):
        if self.lo < 0 or self.hi < self.lo:
            raise ValueError(f"invalid prime range [{self.lo}, {self.hi}]")

    def __iter__(self) -> Iterator[int]:
        return iter_primes(self.lo, self.hi)


@lru_cache(maxsize=8)
def _base_primes(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for q in range(2, math.isqrt(limit) + 1):
        if sieve[q]:
            sieve[q * q :: q] = False
    return np.flatnonzero(sieve).astype(np.int64)


def prime_segments(lo: int, hi: int, segment: int = DEFAULT_SEGMENT) -> Iterator[np.ndarray]:
    """Yield ascending int64 arrays of the primes in [lo, hi], one per segment.

    ``segment`` is the number of odd residues sieved at a time.
    """
    if hi < 2 or hi < lo:
        return
    lo = max(lo, 2)
    if lo == 2:
        yield np.array([2], dtype=np.int64)
        lo = 3
    if lo % 2 == 0:
        lo += 1
    base = _base_primes(math.isqrt(hi) + 1)[1:]  # odd base primes
    span = 2 * segment
    start = lo
    while start <= hi:
        stop = min(start + span, hi + 1)  # exclusive
        size = (stop - start + 1) // 2  # odd numbers start, start+2, ...
        mask = np.ones(size, dtype=bool)
        for q in base:
            q = int(q)
            qq = q * q
            if qq >= stop:
                break
            first = max(qq, (start + q - 1) // q * q)
            if first % 2 == 0:
                first += q
            mask[(first - start) // 2 :: q] = False
        if start == 1:
            mask[0] = False
        found = start + 2 * np.flatnonzero(mask).astype(np.int64)
        if found.size:
            yield found
        start = stop if stop % 2 else stop + 1


def iter_primes(lo: int, hi: int, segment: int = DEFAULT_SEGMENT) -> Iterator[int]:
    for block in prime_segments(lo, hi, segment):
        yield from block.tolist()


def primes(lo: int, hi: int | None = None, segment: int = DEFAULT_SEGMENT) -> list[int]:
    """All primes in [lo, hi] ascending (``primes(n)`` means [2, n])."""
    if hi is None:
        lo, hi = 2, lo
    return list(iter_primes(lo, hi, segment))


def prime_pi(x: int) -> int:
    return sum(int(b.size) for b in prime_segments(2, x))


# --------------------------------------------------------------------------
# factorization
# --------------------------------------------------------------------------

def _pollard_brent(n: int) -> int:
    if n % 2 == 0:
        return 2
    for c in range(1, 200):
        y, r, q, g = 2, 1, 1, 1
        x = ys = 2
        m = 128
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"pollard rho failed on {n}")


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of |n| as {prime: exponent}; factorize(1) == {}."""
    n = abs(n)
    if n == 0:
        raise ValueError("cannot factor 0")
    out: dict[int, int] = {}
    for q in (2, 3, 5):
        while n % q == 0:
            out[q] = out.get(q, 0) + 1
            n //= q
    q, step = 7, 4
    while q * q <= n and q < 5000:
        while n % q == 0:
            out[q] = out.get(q, 0) + 1
            n //= q
        q += step
        step = 6 - step
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        r = math.isqrt(m)
        if r * r == m:
            stack += [r, r]
            continue
        f = _pollard_brent(m)
        stack += [f, m // f]
    return dict(sorted(out.items()))


def divisors(n: int) -> list[int]:
    """Divisors of n >= 1 in ascending order."""
    if n < 1:
        raise ValueError("divisors need n >= 1")
    divs = [1]
    for q, e in factorize(n).items():
        divs = [d * q**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def valuation(n: int, q: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    while n % q == 0:
        n //= q
        v += 1
    return v


# --------------------------------------------------------------------------
# multiplicative functions
# --------------------------------------------------------------------------

def euler_phi(d: int) -> int:
    if d < 1:
        raise ValueError("phi needs d >= 1")
    out = d
    for q in factorize(d):
        out = out // q * (q - 1)
    return out


def psi(d: int) -> int:
    """Dedekind psi: d * prod_{q | d} (1 + 1/q)."""
    if d < 1:
        raise ValueError("psi needs d >= 1")
    out = d
    for q in factorize(d):
        out = out // q * (q + 1)
    return out


def gl2_order(d: int) -> int:
    """Order of GL(2, Z/dZ), equal to d * psi(d) * phi(d)**2."""
    ph = euler_phi(d)
    return d * psi(d) * ph * ph


def phi_plus(d: int) -> int:
    """Number of even Dirichlet characters modulo d."""
    ph = euler_phi(d)
    return ph if d <= 2 else ph // 2


# --------------------------------------------------------------------------
# quadratic characters
# --------------------------------------------------------------------------

def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n)."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            result = -result
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) >> 1, p) == 1 else -1


def is_fundamental_discriminant(D: int) -> bool:
    if D in (0, 1):
        return False
    if D % 4 == 1:
        return squarefree_part(D) == D
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and squarefree_part(m) == m
    return False


@dataclass(frozen=True)
class QuadChar:
    """Kronecker character of the imaginary quadratic field of discriminant D."""

    D: int

    def __post_init__(self):
        if self.D >= 0 or not is_fundamental_discriminant(self.D):
            raise ValueError(f"{self.D} is not a negative fundamental discriminant")

    def __call__(self, n: int) -> int:
        return kronecker(self.D, n)


def ideal_norm_count(chi: QuadChar, n: int) -> int:
    """r_K(n): number of integral ideals of norm n, as sum_{d | n} chi(d)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return sum(chi(d) for d in divisors(n))


def squarefree_part(n: int) -> int:
    """Signed squarefree kernel: n = squarefree_part(n) * k**2."""
    if n == 0:
        raise ValueError("squarefree part of 0")
    out = -1 if n < 0 else 1
    for q, e in factorize(n).items():
        if e % 2:
            out *= q
    return out


def quad_field_conductor(delta: int) -> int:
    """|disc Q(sqrt(delta))|; returns 1 when delta is a perfect square."""
    s = squarefree_part(delta)
    if s == 1:
        return 1
    return abs(s) if s % 4 == 1 else 4 * abs(s)


# --------------------------------------------------------------------------
# modular square roots
# --------------------------------------------------------------------------

@lru_cache(maxsize=4096)
def _nonresidue(p: int) -> int:
    z = 2
    while pow(z, (p - 1) >> 1, p) != p - 1:
        z += 1
    return z


def sqrt_mod(a: int, p: int) -> int | None:
    """Square root of a modulo the odd prime p, normalized to [0, (p-1)/2].

    Returns None when a is a non-residue.
    """
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) >> 1, p) != 1:
        return None
    if p % 4 == 3:
        r = pow(a, (p + 1) >> 2, p)
    elif p % 8 == 5:
        v = pow(2 * a, (p - 5) >> 3, p)
        i = 2 * a * v * v % p
        r = a * v * (i - 1) % p
    else:
        q, s = p - 1, 0
        while q % 2 == 0:
            q >>= 1
            s += 1
        z = _nonresidue(p)
        m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) >> 1, p)
        while t != 1:
            i, t2 = 0, t
            while t2 != 1:
                t2 = t2 * t2 % p
                i += 1
            b = pow(c, 1 << (m - i - 1), p)
            m, c = i, b * b % p
            t, r = t * c % p, r * b % p
    return min(r, p - r)


def crt(residues: list[int], moduli: list[int]) -> tuple[int, int]:
    """Combine pairwise coprime congruences; returns (x, M) with 0 <= x < M."""
    x, M = 0, 1
    for r, m in zip(residues, moduli):
        inv = pow(M, -1, m)
        x = x + M * ((r - x) * inv % m)
        M *= m
    return x % M, M
