"""Closed-form constants: c0, the Serre-curve constants c'(E) and c(E), and
the Titchmarsh-divisor (Linnik) constant.

Euler products are truncated at a cutoff chosen from the requested
tolerance, and every value carries an explicit bound on the truncation
error.  Arithmetic is done in mpmath at ``PRECISION`` digits.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import mpmath

from .modmath import euler_phi, factorize, gl2_order, iter_primes

PRECISION = 40
MIN_TOLERANCE = 1e-12


@dataclass(frozen=True)
class EulerProductValue:
    value: mpmath.mpf
    tail_bound: mpmath.mpf
    cutoff_prime: int

    def __float__(self) -> float:
        return float(self.value)

    def decimal(self, places: int = 10) -> str:
        return mpmath.nstr(self.value, places + 1, strip_zeros=False)


@dataclass(frozen=True)
class MultiplicativeDescriptor:
    """A multiplicative g with sum_d g(d) absolutely convergent.

    ``local_factor(p)`` is g_p = sum_k g(p^k); ``decay`` and ``tail_constant``
    give |g_p - 1| <= tail_constant * p**(-decay) for every prime p.
    """

    value: Callable[[int], Fraction]
    local_factor: Callable[[int], Fraction]
    decay: int
    tail_constant: Fraction


def _check_tolerance(tol: float) -> None:
    if not tol >= MIN_TOLERANCE:
        raise ValueError(f"tolerance must be >= {MIN_TOLERANCE}")


def _tail(decay: int, C: Fraction, cutoff: int) -> mpmath.mpf:
    # sum_{n > P} C n^-s <= C P^(1-s) / (s - 1); relative error <= 2 * that
    t = mpmath.mpf(C.numerator) / C.denominator * mpmath.mpf(cutoff) ** (1 - decay) / (decay - 1)
    return 2 * t


def euler_product(desc: MultiplicativeDescriptor, tol: float, scale: float = 1.0) -> EulerProductValue:
    """prod_p g_p to absolute accuracy tol (``scale`` bounds the final prefactor)."""
    _check_tolerance(tol)
    if desc.decay <= 1:
        raise ValueError("local factors do not decay fast enough for convergence")
    with mpmath.workdps(PRECISION):
        cutoff = 100
        # crude upper bound for the product, used to turn relative into absolute error
        bound = mpmath.exp(2 * desc.tail_constant.numerator / mpmath.mpf(desc.tail_constant.denominator))
        while _tail(desc.decay, desc.tail_constant, cutoff) * bound * scale > tol:
            cutoff *= 2
        prod = mpmath.mpf(1)
        for p in iter_primes(2, cutoff):
            f = desc.local_factor(p)
            prod *= mpmath.mpf(f.numerator) / f.denominator
        tail = _tail(desc.decay, desc.tail_constant, cutoff) * prod
        return EulerProductValue(+prod, +tail, cutoff)


def _scaled(v: EulerProductValue, factor) -> EulerProductValue:
    with mpmath.workdps(PRECISION):
        return EulerProductValue(v.value * factor, v.tail_bound * abs(factor), v.cutoff_prime)


# --------------------------------------------------------------------------
# Serre-curve density g(d) = phi(d) / |GL(2, Z/d)|
# --------------------------------------------------------------------------

def _serre_local(p: int) -> Fraction:
    return Fraction(p**5 - p**3 + 1, (p * p - 1) * (p**3 - 1))


def serre_density() -> MultiplicativeDescriptor:
    """g(d) = phi(d)/|GL2(Z/d)|, with g_p = (p^5 - p^3 + 1)/((p^2 - 1)(p^3 - 1))."""
    return MultiplicativeDescriptor(
        value=lambda d: Fraction(euler_phi(d), gl2_order(d)),
        local_factor=_serre_local,
        decay=3,
        tail_constant=Fraction(1),
    )


def c0(tol: float = 1e-10) -> EulerProductValue:
    """zeta(2) zeta(3) prod_p (1 - p^-2 + p^-5).

    Evaluated as zeta(3) prod_p (1 + 1/(p^5 - p^3)), whose factors are
    1 + O(p^-5), so a small cutoff already meets tight tolerances.
    """
    desc = MultiplicativeDescriptor(
        value=lambda d: Fraction(0),
        local_factor=lambda p: 1 + Fraction(1, p**5 - p**3),
        decay=5,
        tail_constant=Fraction(1),
    )
    with mpmath.workdps(PRECISION):
        z3 = mpmath.zeta(3)
        return _scaled(euler_product(desc, tol, float(z3)), z3)


def serre_c_prime(m: int) -> Fraction:
    """c'(E) = 1 + (2m)^-3 prod_{p | 2m} (1 - p^-2 + p^-5)^-1, exactly."""
    if m < 1:
        raise ValueError("m must be >= 1")
    out = Fraction(1, (2 * m) ** 3)
    for p in factorize(2 * m):
        out /= 1 - Fraction(1, p * p) + Fraction(1, p**5)
    return 1 + out


def serre_constant(m: int, tol: float = 1e-10) -> tuple[Fraction, EulerProductValue]:
    """(c'(E), c(E) = c'(E) c0) for a Serre curve with discriminant conductor m."""
    cp = serre_c_prime(m)
    with mpmath.workdps(PRECISION):
        base = c0(tol / 2)
        factor = mpmath.mpf(cp.numerator) / cp.denominator
        return cp, _scaled(base, factor)


def twisted_multiplicative_sum(
    desc: MultiplicativeDescriptor, n: int, alpha: Fraction, kappa: int, tol: float = 1e-10
) -> EulerProductValue:
    """sum_d f(d) with f = alpha*g on multiples of n and f = g elsewhere.

    Requires g(nd) = d^-kappa g(n); the sum is then
    (1 + (alpha - 1) g(n) prod_{p | n} g_p^-1 (1 - p^-kappa)^-1) prod_p g_p.
    """
    alpha = Fraction(alpha)
    c = Fraction(1)
    if alpha != 1:
        t = desc.value(n)
        for p in factorize(n):
            t /= desc.local_factor(p) * (1 - Fraction(1, p**kappa))
        c += (alpha - 1) * t
    with mpmath.workdps(PRECISION):
        factor = mpmath.mpf(c.numerator) / c.denominator
        return _scaled(euler_product(desc, tol / 2, float(abs(factor))), factor)


def linnik_constant(tol: float = 1e-10) -> EulerProductValue:
    """prod_p (1 + 1/(p(p - 1))), evaluated as zeta(2) prod_p (1 + p^-3)."""
    desc = MultiplicativeDescriptor(
        value=lambda d: Fraction(0),
        local_factor=lambda p: 1 + Fraction(1, p**3),
        decay=3,
        tail_constant=Fraction(1),
    )
    with mpmath.workdps(PRECISION):
        z2 = mpmath.zeta(2)
        return _scaled(euler_product(desc, tol, float(z2)), z2)


def linnik_constant_zeta() -> mpmath.mpf:
    """zeta(2) zeta(3) / zeta(6)."""
    with mpmath.workdps(PRECISION):
        return mpmath.zeta(2) * mpmath.zeta(3) / mpmath.zeta(6)


def linnik_local_factor(p: int) -> Fraction:
    return 1 + Fraction(1, p * (p - 1))
