"""Elliptic twins: the multiplicities M(n) = #{p : n_p = n}, m(p) = M(n_p),
their moments, twin-value counts, the CM multiplicity diagnostic and the
CRT construction of a curve with many primes sharing one group order.

Bad primes take part with n_p = |E_p(F_p)| counted on the singular
reduction of the given model, i.e. p + 1 - a_p with a_p in {0, 1, -1}.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .ecfp import (
    CertificationError,
    Curve,
    CurveModP,
    block_invariants,
    count_points_naive,
    group_order,
    local_invariants,
)
from .modmath import QuadChar, crt, ideal_norm_count, is_prime, legendre, prime_segments, primes

GAUSSIAN = QuadChar(-4)
CONSTRUCT_EXHAUSTIVE_LIMIT = 2000


def upper(x: int) -> int:
    """floor(x^+) with x^+ = (sqrt(x) + 1)^2."""
    return x + 1 + math.isqrt(4 * x)


def hasse_window(n: int) -> tuple[int, int]:
    """Smallest and largest p >= 1 with (p + 1 - n)^2 <= 4p."""
    if n < 1:
        raise ValueError("n must be >= 1")
    r = math.isqrt(4 * n)
    lo = max(1, n - 1 - r)
    while (lo + 1 - n) ** 2 > 4 * lo:
        lo += 1
    while lo > 1 and (lo - n) ** 2 <= 4 * (lo - 1):
        lo -= 1
    hi = n - 1 + r + 2
    while (hi + 1 - n) ** 2 > 4 * hi:
        hi -= 1
    return lo, hi


def window_primes(n: int) -> list[int]:
    lo, hi = hasse_window(n)
    return [p for p in primes(lo, hi) if (p + 1 - n) ** 2 <= 4 * p]


def singular_point_count(curve: Curve, p: int) -> int:
    """|E_p(F_p)| at a prime of bad reduction, singular point included."""
    if curve.discriminant % p:
        raise ValueError(f"{p} is a prime of good reduction")
    if p < 5:
        a1, a2, a3, a4, a6 = curve.coefficients
        return 1 + sum(
            1
            for x in range(p)
            for y in range(p)
            if (y * y + a1 * x * y + a3 * y - x**3 - a2 * x * x - a4 * x - a6) % p == 0
        )
    if curve.c4 % p == 0:
        return p + 1  # additive: a cusp
    # nodal: split exactly when the tangent slopes are rational
    return p if legendre(-curve.c6, p) == 1 else p + 2


def n_at(curve: Curve, p: int, seed: int = 0) -> int:
    if curve.discriminant % p == 0:
        return singular_point_count(curve, p)
    return local_invariants(curve, p, seed).n


def _orders(curve: Curve, ps: np.ndarray, seed: int, include_bad: bool) -> tuple[np.ndarray, np.ndarray, list[int]]:
    b = block_invariants(curve, ps, seed, need_d1=False)
    n = b.n.copy()
    bad = b.p[~b.good].tolist()
    keep = b.good.copy()
    if include_bad:
        for i in np.flatnonzero(~b.good).tolist():
            n[i] = singular_point_count(curve, int(b.p[i]))
        keep[:] = True
    return b.p[keep], n[keep], bad


@dataclass
class TwinHistogram:
    """M(n) for every n <= value_bound, final (window-closed).

    Primes are scanned to floor((V^+)^+) so that M is also final on
    (V, V^+]; ``p``/``n`` keep every prime <= prime_bound = floor(V^+)
    with its group order, which is what m(p) for p <= V requires.
    """

    value_bound: int
    prime_bound: int
    counts: dict[int, int]
    p: np.ndarray
    n: np.ndarray
    bad_primes: list[int] = field(default_factory=list)

    def M(self, n: int) -> int:
        if n > self.prime_bound:
            raise ValueError(f"M({n}) is not closed in this scan")
        return self.counts.get(n, 0)

    def m(self) -> np.ndarray:
        """m(p) for the stored primes."""
        return np.array([self.counts.get(v, 0) for v in self.n.tolist()], dtype=np.int64)


def twin_scan(curve: Curve, V: int, seed: int = 0, include_bad: bool = True) -> TwinHistogram:
    if V < 5:
        raise ValueError("V must be >= 5")
    vplus = upper(V)
    top = upper(vplus)
    ps_all, ns_all, bad = [], [], []
    for seg in prime_segments(2, top):
        p, n, b = _orders(curve, seg, seed, include_bad)
        ps_all.append(p)
        ns_all.append(n)
        bad += b
    ps = np.concatenate(ps_all) if ps_all else np.zeros(0, np.int64)
    ns = np.concatenate(ns_all) if ns_all else np.zeros(0, np.int64)
    vals, cnts = np.unique(ns[ns <= vplus], return_counts=True)
    counts = dict(zip(vals.tolist(), cnts.tolist()))
    keep = ps <= vplus
    return TwinHistogram(V, vplus, counts, ps[keep], ns[keep], bad)


@dataclass(frozen=True)
class TwinReport:
    X: int
    S: dict[int, int]  # k -> sum_{n <= X} M(n)^k
    T: dict[int, int]  # k -> sum_{p <= X} m(p)^k
    S_prime: int
    jX: int
    JX: int
    multiplicity_census: dict[int, int]

    def ratio_li2(self) -> mpmath.mpf:
        return mpmath.mpf(self.S_prime) / li2(self.X)

    def ratio_li(self) -> mpmath.mpf:
        return mpmath.mpf(self.S_prime) / mpmath.li(self.X)


def report(h: TwinHistogram, K: int = 3) -> TwinReport:
    """Moments and twin counts for X = h.value_bound.

    S_k is computed both directly from M and through
    S_k = sum_{p <= X^+, n_p <= X} m(p)^(k-1); the two must agree.
    """
    X = h.value_bound
    Ms = [c for v, c in h.counts.items() if v <= X]
    S = {k: sum(c**k for c in Ms) for k in range(1, K + 1)}
    m = h.m()
    sel = h.n <= X
    for k in range(1, K + 1):
        via_primes = int(sum(int(v) ** (k - 1) for v in m[sel].tolist()))
        if via_primes != S[k]:
            raise CertificationError(f"moment identity fails at k={k}: {S[k]} != {via_primes}")
    small = h.p <= X
    T = {k: int(sum(int(v) ** k for v in m[small].tolist())) for k in range(0, K)}
    census = Counter(Ms)
    return TwinReport(
        X=X,
        S=S,
        T=T,
        S_prime=sum(c for c in Ms if c >= 2),
        jX=sum(1 for c in Ms if c >= 2),
        JX=int((m[small] >= 2).sum()),
        multiplicity_census=dict(sorted(census.items())),
    )


def li2(x) -> mpmath.mpf:
    """int_2^x dt / log(t)^2 = li(x) - li(2) - x/log x + 2/log 2."""
    x = mpmath.mpf(x)
    return mpmath.li(x) - mpmath.li(2) - x / mpmath.log(x) + 2 / mpmath.log(2)


@dataclass(frozen=True)
class WindowCount:
    n: int
    M: int
    window_lo: int
    window_hi: int
    primes: tuple[int, ...]


def multiplicity_at(curve: Curve, n: int, seed: int = 0, include_bad: bool = True) -> WindowCount:
    """M(n) by scanning only the Hasse window of n."""
    lo, hi = hasse_window(n)
    ps = np.array(window_primes(n), dtype=np.int64)
    p, ns, _ = _orders(curve, ps, seed, include_bad)
    hits = tuple(p[ns == n].tolist())
    return WindowCount(n, len(hits), lo, hi, hits)


@dataclass(frozen=True)
class CMDiagnostic:
    n: int
    M: int
    r: int
    bound_ok: bool  # M <= 1 + 2 r(n)
    half_r_bound_ok: bool  # M <= 1 + r(n)/2
    supersingular: int  # M_s(n): 1 when n - 1 is a prime = 3 mod 4

    @property
    def ratio(self) -> float:
        return self.M / (1 + 2 * self.r)


def cm_multiplicity_diagnostic(h: TwinHistogram) -> list[CMDiagnostic]:
    """Multiplicity bounds at every twin value n <= V of a j = 1728 curve."""
    out = []
    for n, c in sorted(h.counts.items()):
        if n > h.value_bound or c < 2:
            continue
        r = ideal_norm_count(GAUSSIAN, n)
        ms = 1 if n - 1 >= 3 and (n - 1) % 4 == 3 and is_prime(n - 1) else 0
        out.append(CMDiagnostic(n, c, r, c <= 1 + 2 * r, 2 * c <= 2 + r, ms))
    return out


def _find_model(p: int, n: int, rng: random.Random) -> tuple[int, int]:
    """Some (A, B) over F_p whose curve has exactly n points."""
    def order(A, B):
        c = CurveModP(p, A, B)
        return count_points_naive(c) if p < 1000 else group_order(c, rng)

    tries = 40 * (math.isqrt(p) + 10)
    for _ in range(tries):
        A, B = rng.randrange(p), rng.randrange(p)
        if (4 * A**3 + 27 * B * B) % p and order(A, B) == n:
            return A, B
    if p < CONSTRUCT_EXHAUSTIVE_LIMIT:
        for A in range(p):
            for B in range(p):
                if (4 * A**3 + 27 * B * B) % p and order(A, B) == n:
                    return A, B
    raise CertificationError(f"no curve over F_{p} with {n} points found")


def construct_max_twin_curve(n: int, seed: int = 0) -> tuple[Curve, int]:
    """A curve over Q with n_p = n at every window prime p >= 5 of n."""
    if not 5 <= n <= 10**4:
        raise ValueError("n must lie in [5, 10^4]")
    rng = random.Random(seed)
    window = [p for p in window_primes(n) if p >= 5]
    a4s, a6s = [], []
    for p in window:
        A, B = _find_model(p, n, rng)
        a4s.append(A)
        a6s.append(B)
    a4, M = crt(a4s, window)
    a6, _ = crt(a6s, window)
    if a4 > M // 2:
        a4 -= M
    if a6 > M // 2:
        a6 -= M
    curve = Curve(0, 0, 0, a4, a6)
    achieved = sum(1 for p in window if local_invariants(curve, p, seed).n == n)
    if achieved != len(window):
        raise CertificationError("constructed curve misses a window prime")
    return curve, achieved
