"""Elliptic splitting statistics: S_E(X; d1), split counts pi_E(X; d, 1),
Serre-curve Galois orders and the outside-prime ledger.

A prime p splits totally in Q(E[d]) exactly when d | d1(p), so every count
here is read off the d1 values of a scan; no division field is built.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .ecfp import CertificationError, Curve, block_invariants, local_invariants
from .modmath import divisors, euler_phi, gl2_order, is_prime, prime_segments

CM_J_INVARIANTS = (0, 1728, -3375, 8000, -32768, 54000)
SMALL_PRIME_ARTIFACT = 100
DEFAULT_BLOCK = 1 << 18


@lru_cache(maxsize=None)
def _divisors(n: int) -> tuple[int, ...]:
    return tuple(divisors(n))


def serre_galois_order(d: int, m: int) -> int:
    """|G_d| for a Serre curve whose discriminant field has conductor m."""
    if d < 1 or m < 1:
        raise ValueError("d and m must be positive")
    g = gl2_order(d)
    return g // 2 if d % (2 * m) == 0 else g


def classify_outside(p: int, d1: int, m: int | None) -> str | None:
    """"outside" if p < |G_d1|, else "weak" if p < d1**4, else None.

    Without a conductor m (curve not known to be Serre) only the weak test
    is available.
    """
    if d1 < 1:
        raise ValueError("d1 must be >= 1")
    if m is not None and p < serre_galois_order(d1, m):
        return "outside"
    if p < d1**4:
        return "weak"
    return None


@dataclass
class SplitAccumulator:
    """Mergeable aggregate of a splitting scan over primes <= xmax."""

    xmax: int = 0
    s_sum: int = 0
    prime_count: int = 0
    per_d: dict[int, int] = field(default_factory=dict)
    outside: list[tuple[int, int, int, str]] = field(default_factory=list)
    bad_primes: list[int] = field(default_factory=list)

    @property
    def good_count(self) -> int:
        return self.per_d.get(1, 0)

    def add_block(self, curve: Curve, block, m: int | None, xmax: int) -> None:
        """Fold in a LocalBlock (d1 computed) covering primes up to xmax."""
        self.xmax = max(self.xmax, xmax)
        self.prime_count += len(block)
        good = block.good
        d1 = block.d1[good]
        self.s_sum += int(d1.sum())
        self.bad_primes += block.p[~good].tolist()
        values, counts = np.unique(d1, return_counts=True)
        for v, c in zip(values.tolist(), counts.tolist()):
            for d in _divisors(v):
                self.per_d[d] = self.per_d.get(d, 0) + c
        ps = block.p[good]
        a = ps + 1 - block.n[good]
        if ((a == 0) & (d1 > 2)).any():
            i = int(np.flatnonzero((a == 0) & (d1 > 2))[0])
            raise CertificationError(f"supersingular prime {int(ps[i])} with d1={int(d1[i])}")
        big = d1.astype(np.float64) ** 4 > ps
        for p, d in zip(ps[big].tolist(), d1[big].tolist()):
            cls = classify_outside(p, d, m)
            if cls is not None:
                g = serre_galois_order(d, m) if m is not None else 0
                self.outside.append((p, d, g, cls))
            if p >= 11 and 2 * d * d >= p and not cm_j_check(p, d, j_mod_p(curve, p)):
                raise CertificationError(f"d1={d} at p={p} without CM j-invariant")

    def merge(self, other: "SplitAccumulator") -> "SplitAccumulator":
        per_d = dict(self.per_d)
        for d, c in other.per_d.items():
            per_d[d] = per_d.get(d, 0) + c
        return SplitAccumulator(
            max(self.xmax, other.xmax),
            self.s_sum + other.s_sum,
            self.prime_count + other.prime_count,
            dict(sorted(per_d.items())),
            sorted(self.outside + other.outside),
            sorted(self.bad_primes + other.bad_primes),
        )

    def identity_holds(self) -> bool:
        """sum_d phi(d) * pi_E(X; d, 1) == S_E(X; d1)."""
        return sum(euler_phi(d) * c for d, c in self.per_d.items()) == self.s_sum

    def check(self) -> None:
        if not self.identity_holds():
            raise CertificationError("splitting identity failed")
        bound = math.isqrt(self.xmax) + 1
        if any(d > bound and c for d, c in self.per_d.items()):
            raise CertificationError("split count beyond the a priori d1 bound")
        for p, d, g, cls in self.outside:
            if p >= d**4:
                raise CertificationError(f"outside prime {p} fails the weak test")

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.s_sum, self.prime_count) if self.prime_count else Fraction(0)

    def outside_primes(self, kind: str = "outside", min_p: int = SMALL_PRIME_ARTIFACT):
        """Outside ledger rows of one class, skipping small-prime artifacts."""
        return [row for row in self.outside if row[3] == kind and row[0] >= min_p]

    def to_state(self) -> dict:
        return {
            "xmax": self.xmax,
            "s_sum": self.s_sum,
            "prime_count": self.prime_count,
            "per_d": [[d, c] for d, c in sorted(self.per_d.items())],
            "outside": [list(r) for r in self.outside],
            "bad_primes": list(self.bad_primes),
        }

    @classmethod
    def from_state(cls, state: dict) -> "SplitAccumulator":
        return cls(
            int(state["xmax"]),
            int(state["s_sum"]),
            int(state["prime_count"]),
            {int(d): int(c) for d, c in state["per_d"]},
            [(int(p), int(d), int(g), str(k)) for p, d, g, k in state["outside"]],
            [int(p) for p in state["bad_primes"]],
        )


def split_block(curve: Curve, lo: int, hi: int, m: int | None = None, seed: int = 0) -> SplitAccumulator:
    """Accumulator for the primes in [lo, hi]."""
    acc = SplitAccumulator(xmax=hi)
    for ps in prime_segments(lo, hi):
        acc.add_block(curve, block_invariants(curve, ps, seed), m, hi)
    acc.per_d = dict(sorted(acc.per_d.items()))
    return acc


def scan(curve: Curve, X: int, m: int | None = None, seed: int = 0) -> SplitAccumulator:
    """Splitting scan over all primes p <= X (2 and 3 included; d1 = 0 at bad primes)."""
    if X < 5:
        raise ValueError("X must be >= 5")
    acc = split_block(curve, 2, X, m, seed)
    acc.check()
    return acc


def pi_split(acc: SplitAccumulator, d: int) -> int:
    """pi_E(X; d, 1) = #{p <= X : d | d1(p)}."""
    return acc.per_d.get(d, 0)


def j_mod_p(curve: Curve, p: int) -> int:
    j = curve.j_rational()
    return j.numerator * pow(j.denominator, -1, p) % p


def cm_j_check(p: int, d1: int, j: int) -> bool:
    """Whether j is a class-number-one CM invariant mod p.

    Only meaningful when d1 >= sqrt(p/2), tested as 2*d1**2 >= p; calling it
    otherwise is an error.
    """
    if p < 11:
        raise ValueError("requires p >= 11")
    if 2 * d1 * d1 < p:
        raise ValueError(f"hypothesis 2*d1^2 >= p fails for p={p}, d1={d1}")
    return any((j - j0) % p == 0 for j0 in CM_J_INVARIANTS)


def extremal_d1_primes(X: int, seed: int = 0) -> list[tuple[int, int]]:
    """Primes p = 16k^2 + 1 <= X with d1 of y^2 = x^3 - x there (always 4k)."""
    A = Curve(0, 0, 0, -1, 0)
    out = []
    k = 1
    while 16 * k * k + 1 <= X:
        p = 16 * k * k + 1
        if is_prime(p):
            rec = local_invariants(A, p, seed)
            if rec.d1 != math.isqrt(p) or rec.n != rec.d1**2:
                raise CertificationError(f"extremal prime {p} has d1={rec.d1}")
            out.append((p, rec.d1))
        k += 1
    return out


def split_primes_table(acc: SplitAccumulator, m: int | None) -> list[tuple[int, int, Fraction, int | None]]:
    """Rows (d, count, N/count, |G_d|) for d >= 2 with a nonzero count.

    N is the number of primes of good reduction, i.e. the d=1 count.
    """
    rows = []
    for d, c in sorted(acc.per_d.items()):
        if d >= 2 and c:
            g = serre_galois_order(d, m) if m is not None else None
            rows.append((d, c, Fraction(acc.good_count, c), g))
    return rows


__all__ = [
    "CM_J_INVARIANTS",
    "SplitAccumulator",
    "classify_outside",
    "cm_j_check",
    "extremal_d1_primes",
    "j_mod_p",
    "pi_split",
    "scan",
    "serre_galois_order",
    "split_block",
    "split_primes_table",
]
