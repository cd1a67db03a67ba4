"""Compiled batch kernels for per-prime invariants (numba, int64 arithmetic).

Each prime is handled independently with its own splitmix64 stream seeded
from (seed, p).  Products of two residues stay below 2**62 for p < 2**31,
which is the hard limit of this path; larger primes go through the pure
Python code in ``ecfp``.  A kernel result of -1 means "not certified here"
and the caller falls back to the Python path for that prime.
"""

from __future__ import annotations

import numpy as np
from numba import njit

KERNEL_P_LIMIT = 1 << 31
_MAX_ROUNDS = 64
_MAX_SAMPLES = 200
_MAX_MATCHES = 64


@njit(cache=True)
def _next(state):
    state[0] += np.uint64(0x9E3779B97F4A7C15)
    z = state[0]
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def _below(state, n):
    return np.int64((_next(state) >> np.uint64(11)) % np.uint64(n))


@njit(cache=True)
def _powmod(b, e, p):
    r = 1
    b %= p
    while e > 0:
        if e & 1:
            r = r * b % p
        b = b * b % p
        e >>= 1
    return r


@njit(cache=True)
def _inv(a, p):
    t, nt, r, nr = 0, 1, p, a % p
    while nr != 0:
        q = r // nr
        t, nt = nt, t - q * nt
        r, nr = nr, r - q * nr
    return t % p


@njit(cache=True)
def _sqrt(a, p):
    # a is a nonzero quadratic residue
    if p % 4 == 3:
        return _powmod(a, (p + 1) >> 2, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q >>= 1
        s += 1
    z = 2
    while _powmod(z, (p - 1) >> 1, p) != p - 1:
        z += 1
    m, c, t, r = s, _powmod(z, q, p), _powmod(a, q, p), _powmod(a, (q + 1) >> 1, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = _powmod(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


# points: (x, y) with x = -1 for the identity


@njit(cache=True)
def _add(x1, y1, x2, y2, A, p):
    if x1 < 0:
        return x2, y2
    if x2 < 0:
        return x1, y1
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return -1, 0
        lam = (3 * x1 % p * x1 + A) % p * _inv(2 * y1, p) % p
    else:
        lam = (y2 - y1) % p * _inv((x2 - x1) % p, p) % p
    x3 = (lam * lam - x1 - x2) % p
    return x3, (lam * ((x1 - x3) % p) - y1) % p


@njit(cache=True)
def _mul(k, x, y, A, p):
    if x < 0 or k == 0:
        return -1, 0
    if k < 0:
        k = -k
        y = (p - y) % p
    rx, ry = -1, 0
    while k > 0:
        if k & 1:
            rx, ry = _add(rx, ry, x, y, A, p)
        k >>= 1
        if k > 0:
            x, y = _add(x, y, x, y, A, p)
    return rx, ry


@njit(cache=True)
def _random_point(A, B, p, state):
    while True:
        x = _below(state, p)
        f = ((x * x % p) * x + A * x + B) % p
        if f == 0:
            return x, 0
        if _powmod(f, (p - 1) >> 1, p) != 1:
            continue
        y = _sqrt(f, p)
        if _next(state) & np.uint64(1):
            y = p - y
        return x, y


@njit(cache=True)
def _factor(n, primes_out, exps_out):
    k = 0
    q = 2
    while q * q <= n:
        if n % q == 0:
            e = 0
            while n % q == 0:
                n //= q
                e += 1
            primes_out[k] = q
            exps_out[k] = e
            k += 1
        q += 1 if q == 2 else 2
    if n > 1:
        primes_out[k] = n
        exps_out[k] = 1
        k += 1
    return k


@njit(cache=True)
def _order_from_multiple(x, y, N, A, p):
    fp = np.empty(64, np.int64)
    fe = np.empty(64, np.int64)
    k = _factor(N, fp, fe)
    order = N
    for i in range(k):
        q = fp[i]
        for _ in range(fe[i]):
            tx, _ty = _mul(order // q, x, y, A, p)
            if tx < 0:
                order //= q
            else:
                break
    return order


@njit(cache=True)
def _isqrt(n):
    r = np.int64(np.sqrt(np.float64(n)))
    while r * r > n:
        r -= 1
    while (r + 1) * (r + 1) <= n:
        r += 1
    return r


@njit(cache=True)
def _interval(x, y, A, p, lo, hi, out):
    """BSGS for m in [lo, hi] with mP = O.

    Returns count >= 0 of matches written to ``out``, or -(multiple) - 1 when
    P has small order (``multiple`` a positive multiple of it).
    """
    s = _isqrt((hi - lo) // 2) + 1
    bx = np.empty(s, np.int64)
    by = np.empty(s, np.int64)
    rx, ry = x, y
    for j in range(s):
        if rx < 0:
            return -(j + 1) - 1
        bx[j] = rx
        by[j] = ry
        rx, ry = _add(rx, ry, x, y, A, p)
    order = np.argsort(bx)
    sx = bx[order]
    for t in range(s - 1):
        if sx[t] == sx[t + 1]:
            i = order[t] + 1
            j = order[t + 1] + 1
            if by[i - 1] == by[j - 1]:
                m = abs(j - i)
            else:
                m = i + j
            return -m - 1
    stride = 2 * s + 1
    gx, gy = _mul(stride, x, y, A, p)
    centre = lo + s
    rx, ry = _mul(centre, x, y, A, p)
    count = 0
    while centre - s <= hi:
        m = -1
        if rx < 0:
            m = centre
        else:
            t = np.searchsorted(sx, rx)
            if t < s and sx[t] == rx:
                j = order[t] + 1
                m = centre - j if by[j - 1] == ry else centre + j
        if m >= lo and m <= hi and count < out.shape[0]:
            out[count] = m
            count += 1
        centre += stride
        rx, ry = _add(rx, ry, gx, gy, A, p)
    return count


@njit(cache=True)
def _gcd(a, b):
    a, b = abs(a), abs(b)
    while b:
        a, b = b, a % b
    return a


@njit(cache=True)
def _group_order(A, B, p, g, state):
    r = _isqrt(4 * p)
    lo, hi = p + 1 - r, p + 1 + r
    At = A * g % p * g % p
    Bt = B * g % p * g % p * g % p
    tlo, thi = 2 * p + 2 - hi, 2 * p + 2 - lo
    L, Lt = 1, 1
    n = -1
    out = np.empty(_MAX_MATCHES, np.int64)
    for rnd in range(_MAX_ROUNDS):
        tw = rnd % 2 == 1
        a_ = At if tw else A
        b_ = Bt if tw else B
        x, y = _random_point(a_, b_, p, state)
        c = _interval(x, y, a_, p, tlo if tw else lo, thi if tw else hi, out)
        if c == 1 and not tw and L == 1:
            n = out[0]
            break
        if c == 0:
            return -1
        mult = out[0] if c > 0 else -(c + 1)
        order = _order_from_multiple(x, y, mult, a_, p)
        if tw:
            Lt = Lt // _gcd(Lt, order) * order
        else:
            L = L // _gcd(L, order) * order
        n = -1
        k = 0
        m = (lo + L - 1) // L * L
        while m <= hi:
            if (2 * p + 2 - m) % Lt == 0:
                n = m
                k += 1
            m += L
        if k == 1:
            break
        if k == 0:
            return -1
        n = -1
    if n < 0:
        return -1
    # twist law: (2p + 2 - n) kills a point of the twist
    x, y = _random_point(At, Bt, p, state)
    tx, _ty = _mul(2 * p + 2 - n, x, y, At, p)
    if tx >= 0:
        return -1
    return n


@njit(cache=True)
def _in_cyclic(rx, ry, px, py, ell, e, tx, ty, A, p):
    """R in <P>, P of order ell**e; (tx, ty) tabulate the multiples of ell**(e-1) P."""
    x = 0
    w = 1
    for t in range(e):
        k = 1
        for _ in range(e - 1 - t):
            k *= ell
        qx, qy = _mul(-x, px, py, A, p)
        sx, sy = _add(rx, ry, qx, qy, A, p)
        sx, sy = _mul(k, sx, sy, A, p)
        digit = -1
        for d in range(ell):
            if tx[d] == sx and (sx < 0 or ty[d] == sy):
                digit = d
                break
        if digit < 0:
            return False
        x += digit * w
        w *= ell
    cx, cy = _mul(x, px, py, A, p)
    return cx == rx and (cx < 0 or cy == ry)


@njit(cache=True)
def _tabulate(px, py, ell, e, A, p):
    k = 1
    for _ in range(e - 1):
        k *= ell
    ox, oy = _mul(k, px, py, A, p)
    tx = np.empty(ell, np.int64)
    ty = np.empty(ell, np.int64)
    cx, cy = -1, 0
    for d in range(ell):
        tx[d] = cx
        ty[d] = cy
        cx, cy = _add(cx, cy, ox, oy, A, p)
    return tx, ty


@njit(cache=True)
def _sylow(A, B, p, n, ell, v, state):
    h = n
    for _ in range(v):
        h //= ell
    px, py, e, j = -1, 0, 0, 0
    tx = np.empty(1, np.int64)
    ty = np.empty(1, np.int64)
    for _ in range(_MAX_SAMPLES):
        x, y = _random_point(A, B, p, state)
        rx, ry = _mul(h, x, y, A, p)
        k = 0
        qx, qy = rx, ry
        while qx >= 0:
            qx, qy = _mul(ell, qx, qy, A, p)
            k += 1
            if k > v:
                return -2
        if k > e:
            ox, oy, oe = px, py, e
            px, py, e = rx, ry, k
            tx, ty = _tabulate(px, py, ell, e, A, p)
            j = 0
            rx, ry, k = ox, oy, oe
        if rx >= 0 and k > 0 and e > 0:
            jj = 0
            while not _in_cyclic(rx, ry, px, py, ell, e, tx, ty, A, p):
                rx, ry = _mul(ell, rx, ry, A, p)
                jj += 1
            if jj > j:
                j = jj
        if e + j == v:
            return v - e
        if e + j > v:
            return -2
    return -1


@njit(cache=True)
def _d1(A, B, p, n, state):
    a = p + 1 - n
    G = _gcd(p - 1, a - 2)
    d1 = 1
    if G == 1:
        return 1
    fp = np.empty(64, np.int64)
    fe = np.empty(64, np.int64)
    k = _factor(G, fp, fe)
    for t in range(k):
        ell = fp[t]
        v = 0
        m = n
        while m % ell == 0:
            m //= ell
            v += 1
        cap = min(fe[t], v // 2)
        if cap == 0:
            continue
        i = _sylow(A, B, p, n, ell, v, state)
        if i < 0:
            return -1
        for _ in range(i):
            d1 *= ell
    return d1


@njit(cache=True)
def _nonresidue(p):
    g = 2
    while _powmod(g, (p - 1) >> 1, p) != p - 1:
        g += 1
    return g


@njit(cache=True)
def batch_invariants(ps, c4s, c6s, seed, need_d1):
    """n_p and d1 for primes of good reduction given c4, c6 reduced mod p.

    -1 marks a row left to the caller.
    """
    m = ps.shape[0]
    ns = np.empty(m, np.int64)
    d1s = np.empty(m, np.int64)
    state = np.empty(1, np.uint64)
    for i in range(m):
        p = ps[i]
        A = (p - c4s[i]) % p * _inv(48 % p, p) % p
        B = (p - c6s[i]) % p * _inv(864 % p, p) % p
        state[0] = np.uint64(seed) * np.uint64(0x9E3779B97F4A7C15) + np.uint64(p)
        n = _group_order(A, B, p, _nonresidue(p), state)
        ns[i] = n
        if n < 0 or not need_d1:
            d1s[i] = -1
        else:
            d1s[i] = _d1(A, B, p, n, state)
    return ns, d1s
