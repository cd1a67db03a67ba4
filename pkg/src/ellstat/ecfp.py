"""Elliptic curves over prime fields: reduction, group law, point counting and
the group-structure invariants d1, d2 with E(F_p) = Z/d1 + Z/(d1*d2).

Points are ``None`` (the identity) or affine ``(x, y)`` tuples.  The hot
loops work on bare ints (coefficient ``A`` and modulus ``p``) rather than on
objects; the ``CurveModP`` wrappers below are thin.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .modmath import divisors, factorize, is_prime, legendre, sqrt_mod, valuation

try:
    from . import _kernels
except ImportError:  # pragma: no cover - numba missing
    _kernels = None

Point = Union[None, tuple]
Seed = Union[int, random.Random, None]

NAIVE_COUNT_LIMIT = 1000
EXACT_FALLBACK_LIMIT = 100_000
ORACLE_LIMIT = 250
MAX_SYLOW_SAMPLES = 200

_GOLDEN = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1


class CertificationError(ArithmeticError):
    """A computed invariant failed its arithmetic certificate."""


class BadReduction(ValueError):
    pass


# --------------------------------------------------------------------------
# curves
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Curve:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 with integer coefficients."""

    a1: int
    a2: int
    a3: int
    a4: int
    a6: int

    def __post_init__(self):
        if self.discriminant == 0:
            raise ValueError(f"singular curve {self.coefficients}")

    @property
    def coefficients(self) -> tuple[int, int, int, int, int]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @property
    def b2(self) -> int:
        return self.a1 * self.a1 + 4 * self.a2

    @property
    def b4(self) -> int:
        return 2 * self.a4 + self.a1 * self.a3

    @property
    def b6(self) -> int:
        return self.a3 * self.a3 + 4 * self.a6

    @property
    def b8(self) -> int:
        a1, a2, a3, a4, a6 = self.coefficients
        return a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4

    @property
    def c4(self) -> int:
        return self.b2**2 - 24 * self.b4

    @property
    def c6(self) -> int:
        b2, b4 = self.b2, self.b4
        return -(b2**3) + 36 * b2 * b4 - 216 * self.b6

    @property
    def discriminant(self) -> int:
        b2, b4, b6, b8 = self.b2, self.b4, self.b6, self.b8
        return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    def j_rational(self) -> Fraction:
        return Fraction(self.c4**3, self.discriminant)

    def __str__(self) -> str:
        return "[" + ",".join(map(str, self.coefficients)) + "]"


@dataclass(frozen=True)
class CurveModP:
    """Short Weierstrass model y^2 = x^3 + A x + B over F_p, p >= 5."""

    p: int
    A: int
    B: int

    def __post_init__(self):
        if (4 * self.A**3 + 27 * self.B**2) % self.p == 0:
            raise ValueError(f"singular model {self}")

    def contains(self, P: Point) -> bool:
        if P is None:
            return True
        x, y = P
        p = self.p
        return (y * y - (x * x * x + self.A * x + self.B)) % p == 0

    def twist(self, g: int | None = None) -> "CurveModP":
        """Quadratic twist by a non-residue (the smallest one by default)."""
        p = self.p
        if g is None:
            g = 2
            while legendre(g, p) != -1:
                g += 1
        return CurveModP(p, self.A * g * g % p, self.B * g * g * g % p)


def reduce_mod_p(curve: Curve, p: int) -> CurveModP | None:
    """Short model of ``curve`` over F_p, or None at primes of bad reduction."""
    if p < 5:
        raise ValueError("reduction implemented for p >= 5 only")
    if curve.discriminant % p == 0:
        return None
    A = -curve.c4 * pow(48, -1, p) % p
    B = -curve.c6 * pow(864, -1, p) % p
    return CurveModP(p, A, B)


def j_invariant(c: CurveModP) -> int:
    p, A, B = c.p, c.A, c.B
    a3 = 4 * A * A * A
    return 1728 * a3 * pow(a3 + 27 * B * B, -1, p) % p


# --------------------------------------------------------------------------
# group law (bare-int kernels)
# --------------------------------------------------------------------------

def _add(P, Q, A, p):
    if P is None:
        return Q
    if Q is None:
        return P
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return None
        lam = (3 * x1 * x1 + A) * pow(2 * y1, -1, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    return (x3, (lam * (x1 - x3) - y1) % p)


def _dbl(P, A, p):
    if P is None:
        return None
    x1, y1 = P
    if y1 == 0:
        return None
    lam = (3 * x1 * x1 + A) * pow(2 * y1, -1, p) % p
    x3 = (lam * lam - 2 * x1) % p
    return (x3, (lam * (x1 - x3) - y1) % p)


def _neg(P, p):
    if P is None:
        return None
    return (P[0], -P[1] % p)


def _jdbl(X, Y, Z, A, p):
    if Z == 0 or Y == 0:
        return 0, 1, 0
    YY = Y * Y % p
    S = 4 * X * YY % p
    ZZ = Z * Z % p
    M = (3 * X * X + A * ZZ * ZZ) % p
    X3 = (M * M - 2 * S) % p
    return X3, (M * (S - X3) - 8 * YY * YY) % p, 2 * Y * Z % p


def _jadd_affine(X1, Y1, Z1, x2, y2, A, p):
    """Jacobian (X1:Y1:Z1) plus affine (x2, y2)."""
    if Z1 == 0:
        return x2, y2, 1
    Z1Z1 = Z1 * Z1 % p
    H = (x2 * Z1Z1 - X1) % p
    r = (y2 * Z1 * Z1Z1 - Y1) % p
    if H == 0:
        if r == 0:
            return _jdbl(X1, Y1, Z1, A, p)
        return 0, 1, 0
    HH = H * H % p
    HHH = H * HH % p
    V = X1 * HH % p
    X3 = (r * r - HHH - 2 * V) % p
    return X3, (r * (V - X3) - Y1 * HHH) % p, Z1 * H % p


def _to_affine(X, Y, Z, p):
    if Z == 0:
        return None
    zi = pow(Z, -1, p)
    zi2 = zi * zi % p
    return (X * zi2 % p, Y * zi2 * zi % p)


def _batch_affine(pts, p):
    """Normalize many Jacobian points with a single inversion."""
    prefix = []
    acc = 1
    for _, _, Z in pts:
        prefix.append(acc)
        if Z:
            acc = acc * Z % p
    inv = pow(acc, -1, p)
    out = [None] * len(pts)
    for i in range(len(pts) - 1, -1, -1):
        X, Y, Z = pts[i]
        if Z:
            zi = inv * prefix[i] % p
            inv = inv * Z % p
            zi2 = zi * zi % p
            out[i] = (X * zi2 % p, Y * zi2 * zi % p)
    return out


def _mul(k, P, A, p):
    if P is None or k == 0:
        return None
    if k < 0:
        k, P = -k, _neg(P, p)
    x, y = P
    X, Y, Z = 0, 1, 0
    for bit in bin(k)[2:]:
        X, Y, Z = _jdbl(X, Y, Z, A, p)
        if bit == "1":
            X, Y, Z = _jadd_affine(X, Y, Z, x, y, A, p)
    return _to_affine(X, Y, Z, p)


def add(P: Point, Q: Point, c: CurveModP) -> Point:
    return _add(P, Q, c.A, c.p)


def neg(P: Point, c: CurveModP) -> Point:
    return _neg(P, c.p)


def scalar_mul(k: int, P: Point, c: CurveModP) -> Point:
    return _mul(k, P, c.A, c.p)


# --------------------------------------------------------------------------
# sampling
# --------------------------------------------------------------------------

def prime_rng(seed: int, p: int) -> random.Random:
    """Per-prime generator derived from a global seed; stable across runs."""
    z = (seed * _GOLDEN + p) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return random.Random(z ^ (z >> 31))


def _as_rng(seed: Seed) -> random.Random:
    if isinstance(seed, random.Random):
        return seed
    return random.Random(0 if seed is None else seed)


def _random_point(A, B, p, rng):
    while True:
        x = rng.randrange(p)
        f = (x * x * x + A * x + B) % p
        if f == 0:
            return (x, 0)
        y = sqrt_mod(f, p)
        if y is None:
            continue
        if rng.getrandbits(1):
            y = p - y
        return (x, y)


def random_point(c: CurveModP, seed: Seed = None) -> tuple[int, int]:
    """Affine point with x drawn uniformly until x^3 + Ax + B is a square."""
    return _random_point(c.A, c.B, c.p, _as_rng(seed))


# --------------------------------------------------------------------------
# orders
# --------------------------------------------------------------------------

def hasse_bounds(p: int) -> tuple[int, int]:
    r = math.isqrt(4 * p)
    return p + 1 - r, p + 1 + r


def _order_from_multiple(P, N, A, p):
    order = N
    for q, e in factorize(N).items():
        for _ in range(e):
            if _mul(order // q, P, A, p) is None:
                order //= q
            else:
                break
    return order


def point_order(P: Point, c: CurveModP, N: int) -> int:
    """Exact order of P given a multiple N of it."""
    if N < 1 or scalar_mul(N, P, c) is not None:
        raise ValueError("N is not a multiple of the order of P")
    if P is None:
        return 1
    return _order_from_multiple(P, N, c.A, c.p)


def _interval_matches(P, A, p, lo, hi):
    """All m in [lo, hi] with mP = O by baby-step giant-step.

    Returns ``(True, matches)``, or ``(False, multiple)`` when P turned out to
    have order at most twice the baby-step count; ``multiple`` is then a
    positive multiple of the order of P.
    """
    width = hi - lo
    s = math.isqrt(width // 2) + 1
    x, y = P
    jac = []
    J = (x, y, 1)
    for _ in range(s):
        jac.append(J)
        J = _jadd_affine(*J, x, y, A, p)
    table = {}
    for j, R in enumerate(_batch_affine(jac, p), 1):
        if R is None:
            return False, j
        hit = table.get(R[0])
        if hit is not None:
            i, yi = hit
            return False, (j - i if yi == R[1] else j + i)
        table[R[0]] = (j, R[1])
    stride = 2 * s + 1
    G = _mul(stride, P, A, p)
    centre = lo + s
    first = _mul(centre, P, A, p)
    steps = (hi - lo) // stride + 1
    if G is None:
        giants = [first] * steps
    else:
        gx, gy = G
        jac = []
        J = (0, 1, 0) if first is None else (first[0], first[1], 1)
        for _ in range(steps):
            jac.append(J)
            J = _jadd_affine(*J, gx, gy, A, p)
        giants = _batch_affine(jac, p)
    found = []
    for R in giants:
        if R is None:
            m = centre
        else:
            hit = table.get(R[0])
            if hit is None:
                m = None
            else:
                j, yj = hit
                m = centre - j if yj == R[1] else centre + j
        if m is not None and lo <= m <= hi:
            found.append(m)
        centre += stride
    return True, found


def count_points_naive(c: CurveModP) -> int:
    p, A, B = c.p, c.A, c.B
    half = (p - 1) >> 1
    total = p + 1
    for x in range(p):
        f = (x * x * x + A * x + B) % p
        if f:
            total += 1 if pow(f, half, p) == 1 else -1
    return total


def _nonresidue(p):
    g = 2
    while legendre(g, p) != -1:
        g += 1
    return g


def _order_bsgs(A, B, p, rng, max_rounds=64):
    lo, hi = hasse_bounds(p)
    g = _nonresidue(p)
    At, Bt = A * g * g % p, B * g * g * g % p
    tlo, thi = 2 * p + 2 - hi, 2 * p + 2 - lo
    L = Lt = 1
    for rnd in range(max_rounds):
        on_twist = rnd % 2 == 1
        a_, b_ = (At, Bt) if on_twist else (A, B)
        P = _random_point(a_, b_, p, rng)
        ok, res = _interval_matches(P, a_, p, *((tlo, thi) if on_twist else (lo, hi)))
        if ok and len(res) == 1 and not on_twist and L == 1:
            return res[0]
        if ok:
            if not res:
                raise CertificationError(f"no group order found in Hasse interval at p={p}")
            order = _order_from_multiple(P, res[0], a_, p)
        else:
            order = _order_from_multiple(P, res, a_, p)
        if on_twist:
            Lt = Lt * order // math.gcd(Lt, order)
        else:
            L = L * order // math.gcd(L, order)
        start = -(-lo // L) * L
        cands = [m for m in range(start, hi + 1, L) if (2 * p + 2 - m) % Lt == 0]
        if len(cands) == 1:
            return cands[0]
        if not cands:
            raise CertificationError(f"inconsistent orders at p={p}")
    return None


def group_order(c: CurveModP, seed: Seed = None, method: str = "auto") -> int:
    """|E(F_p)|.

    ``method`` is "naive" (character sum), "bsgs" (Mestre-style baby-step
    giant-step on the curve and its twist) or "auto" (naive below 1000).
    The BSGS result is checked against the twist: (2p + 2 - n) kills a point
    of the twist.
    """
    p, A, B = c.p, c.A, c.B
    if method == "naive" or (method == "auto" and p < NAIVE_COUNT_LIMIT):
        return count_points_naive(c)
    rng = _as_rng(seed)
    n = _order_bsgs(A, B, p, rng)
    if n is None:
        if p < EXACT_FALLBACK_LIMIT:
            return count_points_naive(c)
        raise CertificationError(f"point counting did not converge at p={p}")
    g = _nonresidue(p)
    At, Bt = A * g * g % p, B * g * g * g % p
    if _mul(2 * p + 2 - n, _random_point(At, Bt, p, rng), At, p) is not None:
        raise CertificationError(f"twist check failed at p={p}")
    return n


# --------------------------------------------------------------------------
# group structure
# --------------------------------------------------------------------------

def _log_order(R, ell, A, p, cap):
    k = 0
    while R is not None:
        R = _mul(ell, R, A, p)
        k += 1
        if k > cap:
            raise CertificationError("point order exceeds the Sylow bound")
    return k


class _Cyclic:
    """Discrete logs in the cyclic ell-group generated by P of order ell**e."""

    def __init__(self, P, ell, e, A, p):
        self.P, self.ell, self.e, self.A, self.p = P, ell, e, A, p
        P0 = _mul(ell ** (e - 1), P, A, p)
        table = {}
        T = None
        for digit in range(ell):
            table[T] = digit
            T = _add(T, P0, A, p)
        self.table = table

    def contains(self, R) -> bool:
        ell, e, A, p = self.ell, self.e, self.A, self.p
        x = 0
        for t in range(e):
            T = _mul(ell ** (e - 1 - t), _add(R, _mul(-x, self.P, A, p), A, p), A, p)
            digit = self.table.get(T)
            if digit is None:
                return False
            x += digit * ell**t
        return _mul(x, self.P, A, p) == R


def _sylow_rank_part(A, B, p, n, ell, v, rng):
    """Exponent i with the ell-Sylow subgroup = Z/ell^i + Z/ell^(v-i).

    Las Vegas: sampled points are projected to the Sylow subgroup; the answer
    is returned only once two of them provably generate all of it.
    """
    h = n // ell**v
    P, e, cyc, j = None, 0, None, 0
    for _ in range(MAX_SYLOW_SAMPLES):
        R = _mul(h, _random_point(A, B, p, rng), A, p)
        k = _log_order(R, ell, A, p, v)
        if k > e:
            old, old_e = P, e
            P, e, cyc = R, k, _Cyclic(R, ell, k, A, p)
            j = 0
            R, k = old, old_e
        if R is not None and k and cyc is not None:
            jj = 0
            while not cyc.contains(R):
                R = _mul(ell, R, A, p)
                jj += 1
            j = max(j, jj)
        if e + j == v:
            return v - e
        if e + j > v:
            raise CertificationError(f"Sylow subgroup larger than expected at p={p}")
    return None


def group_structure(c: CurveModP, seed: Seed = None, n: int | None = None) -> tuple[int, int]:
    """(d1, d2) with E(F_p) = Z/d1 + Z/(d1*d2)."""
    p, A, B = c.p, c.A, c.B
    rng = _as_rng(seed)
    if n is None:
        n = group_order(c, rng)
    a = p + 1 - n
    g = math.gcd(p - 1, a - 2)
    d1 = 1
    if g > 1:
        for ell, vg in factorize(g).items():
            v = valuation(n, ell)
            if min(vg, v // 2) == 0:
                continue
            i = _sylow_rank_part(A, B, p, n, ell, v, rng)
            if i is None:
                if p < EXACT_FALLBACK_LIMIT:
                    return structure_exhaustive(c)[1:]
                raise CertificationError(f"Sylow certification failed at p={p}, ell={ell}")
            d1 *= ell**i
    if n % (d1 * d1) or (p - 1) % d1 or (a - 2) % d1 or d1 > math.isqrt(p) + 1:
        raise CertificationError(f"d1={d1} violates the structure congruences at p={p}")
    return d1, n // (d1 * d1)


def enumerate_points(c: CurveModP) -> list[tuple[int, int]]:
    p, A, B = c.p, c.A, c.B
    roots: dict[int, list[int]] = {}
    for y in range(p):
        roots.setdefault(y * y % p, []).append(y)
    return [(x, y) for x in range(p) for y in roots.get((x * x * x + A * x + B) % p, ())]


def structure_exhaustive(c: CurveModP) -> tuple[int, int, int]:
    """(n, d1, d2) from the full point set: d1 is the largest d whose whole
    d-torsion (d**2 points) is rational."""
    pts = enumerate_points(c)
    n = len(pts) + 1
    A, p = c.A, c.p
    for d in reversed(divisors(n)):
        if d == 1 or n % (d * d):
            continue
        killed = 1 + sum(1 for P in pts if _mul(d, P, A, p) is None)
        if killed == d * d:
            return n, d, n // (d * d)
    return n, 1, n


# --------------------------------------------------------------------------
# per-prime record
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class LocalInvariants:
    p: int
    status: str  # "good" | "bad"
    a: int = 0
    n: int = 0
    d1: int = 0
    d2: int = 0
    supersingular: bool = False

    @property
    def good(self) -> bool:
        return self.status == "good"

    def check(self) -> None:
        """Raise CertificationError unless the structural invariants hold."""
        if not self.good:
            if self.d1 != 0:
                raise CertificationError(f"bad prime {self.p} with d1={self.d1}")
            return
        p, a, n, d1 = self.p, self.a, self.n, self.d1
        ok = (
            n == p + 1 - a
            and a * a <= 4 * p
            and n == d1 * d1 * self.d2
            and (p - 1) % d1 == 0
            and (a - 2) % d1 == 0
            and d1 <= math.isqrt(p) + 1
            and self.supersingular == (a % p == 0)
        )
        if not ok:
            raise CertificationError(f"invariants violated: {self}")


def local_invariants_mod_p(c: CurveModP | None, p: int, seed: Seed = None) -> LocalInvariants:
    if c is None:
        return LocalInvariants(p, "bad")
    rng = _as_rng(seed)
    n = group_order(c, rng)
    d1, d2 = group_structure(c, rng, n)
    a = c.p + 1 - n
    rec = LocalInvariants(p, "good", a, n, d1, d2, a == 0)
    rec.check()
    return rec


def _small_char_invariants(curve: Curve, p: int) -> LocalInvariants:
    """p = 2 or 3, by enumerating the long Weierstrass model.

    d1 divides p - 1, so it is 1 at p = 2; at p = 3 it is 2 exactly when the
    full 2-torsion (the points with 2y + a1 x + a3 = 0, plus O) is rational.
    """
    if curve.discriminant % p == 0:
        return LocalInvariants(p, "bad")
    a1, a2, a3, a4, a6 = curve.coefficients
    pts = [
        (x, y)
        for x in range(p)
        for y in range(p)
        if (y * y + a1 * x * y + a3 * y - x**3 - a2 * x * x - a4 * x - a6) % p == 0
    ]
    n = len(pts) + 1
    d1 = 1
    if p == 3:
        two_torsion = 1 + sum(1 for x, y in pts if (2 * y + a1 * x + a3) % p == 0)
        d1 = 2 if two_torsion == 4 else 1
    a = p + 1 - n
    rec = LocalInvariants(p, "good", a, n, d1, n // (d1 * d1), a % p == 0)
    rec.check()
    return rec


def local_invariants(curve: Curve, p: int, seed: int = 0) -> LocalInvariants:
    """All local data of ``curve`` at the prime p.

    Primes 2 and 3 are handled by enumeration on the long model; from 5 on
    the short model is used.  The random stream depends only on (seed, p),
    so results do not depend on how a scan is partitioned.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p < 5:
        return _small_char_invariants(curve, p)
    return local_invariants_mod_p(reduce_mod_p(curve, p), p, prime_rng(seed, p))


def order_at(curve: Curve, p: int, seed: int = 0) -> int | None:
    """n_p only (None at bad primes); skips the structure computation."""
    if p < 5:
        rec = local_invariants(curve, p, seed)
        return rec.n if rec.good else None
    c = reduce_mod_p(curve, p)
    if c is None:
        return None
    return group_order(c, prime_rng(seed, p))


# --------------------------------------------------------------------------
# blocks of primes
# --------------------------------------------------------------------------

@dataclass
class LocalBlock:
    """Invariants of one curve over an ascending array of primes.

    ``d1`` is 0 at bad primes and -1 where it was not requested; ``n`` is 0
    at bad primes.
    """

    p: np.ndarray
    n: np.ndarray
    d1: np.ndarray
    good: np.ndarray

    @property
    def a(self) -> np.ndarray:
        return np.where(self.good, self.p + 1 - self.n, 0)

    def __len__(self) -> int:
        return int(self.p.size)

    def record(self, i: int) -> LocalInvariants:
        p = int(self.p[i])
        if not self.good[i]:
            return LocalInvariants(p, "bad")
        n, d1 = int(self.n[i]), int(self.d1[i])
        a = p + 1 - n
        if d1 < 0:
            raise ValueError("block was computed without d1")
        return LocalInvariants(p, "good", a, n, d1, n // (d1 * d1), a % p == 0)

    def check(self) -> None:
        """Vectorized form of LocalInvariants.check over the whole block."""
        g = self.good
        p, n, d1 = self.p[g], self.n[g], self.d1[g]
        a = p + 1 - n
        bad = np.zeros(p.size, dtype=bool)
        bad |= a * a > 4 * p
        if (self.d1[~g] != 0).any():
            raise CertificationError("nonzero d1 at a bad prime")
        have = d1 > 0
        if (d1 == 0).any() or ((d1 < 0) & (self.d1[g] != -1)).any():
            raise CertificationError("invalid d1 value")
        dd = np.where(have, d1, 1)
        bad |= have & (n % (dd * dd) != 0)
        bad |= have & ((p - 1) % dd != 0)
        bad |= have & ((a - 2) % dd != 0)
        bad |= have & (dd > np.floor(np.sqrt(p.astype(np.float64))).astype(np.int64) + 1)
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            raise CertificationError(
                f"invariants violated at p={int(p[i])}: n={int(n[i])}, d1={int(d1[i])}"
            )


def _residues(c: int, ps: np.ndarray) -> np.ndarray:
    if abs(c) < (1 << 62):
        return np.mod(np.int64(c), ps)
    return np.array([c % int(p) for p in ps], dtype=np.int64)


def block_invariants(curve: Curve, ps, seed: int = 0, need_d1: bool = True) -> LocalBlock:
    """Invariants at every prime of ``ps`` (ascending, any primes).

    Uses the compiled kernel where available and falls back to the Python
    path for primes it leaves uncertified, for p < 5, and beyond its range.
    """
    ps = np.asarray(ps, dtype=np.int64)
    m = ps.size
    n = np.zeros(m, dtype=np.int64)
    d1 = np.zeros(m, dtype=np.int64)
    good = _residues(curve.discriminant, ps) != 0 if m else np.zeros(0, dtype=bool)
    fast = good & (ps >= 5)
    if _kernels is not None:
        fast &= ps < _kernels.KERNEL_P_LIMIT
    else:
        fast[:] = False
    idx = np.flatnonzero(fast)
    if idx.size:
        q = ps[idx]
        kn, kd = _kernels.batch_invariants(
            q, _residues(curve.c4, q), _residues(curve.c6, q), np.uint64(seed & _MASK64), need_d1
        )
        n[idx] = kn
        d1[idx] = kd if need_d1 else -1
        redo = idx[(kn < 0) | ((kd < 0) if need_d1 else False)]
    else:
        redo = np.zeros(0, dtype=np.int64)
    slow = np.union1d(np.flatnonzero(good & ~fast), redo).astype(np.int64)
    for i in slow.tolist():
        p = int(ps[i])
        if need_d1:
            rec = local_invariants(curve, p, seed)
            n[i], d1[i] = rec.n, rec.d1
        else:
            n[i] = order_at(curve, p, seed)
            d1[i] = -1
    if not need_d1:
        d1[~good] = 0
    block = LocalBlock(ps, n, d1, good)
    block.check()
    return block


# --------------------------------------------------------------------------
# brute-force census oracle
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CensusEntry:
    curve: CurveModP
    n: int
    d1: int
    d2: int
    weight: Fraction  # 2 / #Aut

    @property
    def a(self) -> int:
        return self.curve.p + 1 - self.n


def isomorphism_classes(p: int) -> list[tuple[CurveModP, int]]:
    """One representative per F_p-isomorphism class with its orbit size.

    (A, B) ~ (u^4 A, u^6 B); the orbit of (A, B) has (p - 1)/#Aut elements.
    """
    seen = bytearray(p * p)
    reps = []
    u2s = [u * u % p for u in range(1, p)]
    for A in range(p):
        for B in range(p):
            if seen[A * p + B] or (4 * A * A * A + 27 * B * B) % p == 0:
                continue
            orbit = set()
            for u2 in u2s:
                u4 = u2 * u2 % p
                key = (u4 * A % p) * p + u4 * u2 * B % p
                orbit.add(key)
            for key in orbit:
                seen[key] = 1
            reps.append((CurveModP(p, A, B), len(orbit)))
    return reps


def brute_force_census(p: int, limit: int = ORACLE_LIMIT) -> list[CensusEntry]:
    """Exhaustive invariants of every isomorphism class over F_p."""
    if p < 5 or not is_prime(p):
        raise ValueError(f"{p} is not a prime >= 5")
    if p > limit:
        raise ValueError(f"p={p} exceeds the oracle limit {limit}")
    out = []
    for c, orbit in isomorphism_classes(p):
        n, d1, d2 = structure_exhaustive(c)
        out.append(CensusEntry(c, n, d1, d2, Fraction(2 * orbit, p - 1)))
    return out
