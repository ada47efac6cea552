"""Factoring primitives: progression trial division, Pollard rho (Brent),
Pollard p - 1 and a Montgomery-curve ECM.

None of these certify anything; they only return divisors.
"""

from __future__ import annotations

from itertools import count

from ..bigmath import gcd, mpz, small_primes
from ..errors import NoFactorFound
from ..prp import SMALL_THRESHOLD, deterministic_small_prime, is_probable_prime

__all__ = [
    "largest_prime_factor", "progression_sieve", "pollard_rho",
    "pollard_p_minus_1", "ecm", "ecm_curve",
]

_PRIME_CACHE: dict[int, list[int]] = {}


def _primes_upto(limit: int) -> list[int]:
    cached = _PRIME_CACHE.get(limit)
    if cached is None:
        cached = _PRIME_CACHE[limit] = small_primes(limit + 1)
    return cached


def largest_prime_factor(d: int) -> int:
    """Largest prime dividing d (1 for d == 1)."""
    best, f = 1, 2
    while f * f <= d:
        while d % f == 0:
            best, d = f, d // f
        f += 1 if f == 2 else 2
    return max(best, d) if d > 1 else best


def _is_small_prime(q: int) -> bool:
    if q < SMALL_THRESHOLD:
        return deterministic_small_prime(q)
    return is_probable_prime(q)


def progression_sieve(n: int, d: int, bound: int, batch: int = 256):
    """Divide out primes q <= bound with q == 1 (mod d), plus the largest
    prime factor of d.

    Returns ``(found, cofactor, exhausted)`` where ``found`` is a list of
    ``(q, e)`` in increasing q, and ``exhausted`` is True when the cofactor is
    1 or a probable prime below the square of the next candidate.
    """
    if n < 1 or d < 1:
        raise ValueError("progression_sieve needs n >= 1, d >= 1")
    found: dict[int, int] = {}
    m = n

    def strip(q: int) -> None:
        nonlocal m
        e = 0
        while m % q == 0:
            m //= q
            e += 1
        if e:
            found[q] = found.get(q, 0) + e

    if d > 1:
        ell = largest_prime_factor(d)
        if ell % d != 1 % d:
            strip(ell)
    if d == 1 or d == 2:
        if 2 <= bound:
            strip(2)
        start, step = 3, 2
    elif d % 2:
        start, step = 2 * d + 1, 2 * d
    else:
        start, step = d + 1, d

    exhausted = False
    q0 = start
    sqrt_checked = False
    while q0 <= bound and m > 1:
        if not sqrt_checked and q0 * q0 > m:
            # only a prime cofactor ends the scan early; a composite one has
            # factors off the progression, and progression primes may still divide it
            if is_probable_prime(m):
                exhausted = True
                break
            sqrt_checked = True
        hi = min(bound, q0 + step * (batch - 1))
        cands = range(q0, hi + 1, step)
        block = 1
        for q in cands:
            block *= q
        if gcd(block, m) > 1:
            for q in cands:
                if m % q == 0 and _is_small_prime(q):
                    strip(q)
                    sqrt_checked = False
        q0 = hi + step
    else:
        exhausted = m == 1 or (q0 * q0 > m and is_probable_prime(m))
    if exhausted and 1 < m <= bound and (m % d == 1 % d) and _is_small_prime(m):
        found[m] = found.get(m, 0) + 1
        m = 1
    return sorted(found.items()), m, exhausted


def pollard_rho(n: int, budget: int = 20_000_000, batch: int = 64) -> int:
    """Brent's variant of Pollard rho with f(x) = x^2 + c, c = 1, 2, 3, ...

    ``budget`` caps the total number of f evaluations across all seeds.
    """
    if n < 4:
        raise NoFactorFound(f"{n} is too small to split")
    if n % 2 == 0:
        return 2
    N = mpz(n)
    used = 0
    for c in count(1):
        y, r, q, g = mpz(2), 1, mpz(1), 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % N
            used += r
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(batch, r - k)):
                    y = (y * y + c) % N
                    q = q * abs(x - y) % N
                g = gcd(q, N)
                k += batch
            used += r
            r *= 2
            if g == 1 and used >= budget:
                raise NoFactorFound(f"rho budget {budget} exhausted")
        if g == N:
            # the batch overshot; walk it one step at a time
            g = 1
            while g == 1:
                ys = (ys * ys + c) % N
                g = gcd(abs(x - ys), N)
        if g != N:
            return int(g)
        if used >= budget:
            raise NoFactorFound(f"rho budget {budget} exhausted")


def _prime_powers(B1: int) -> list[int]:
    out = []
    for q in _primes_upto(B1):
        qk = q
        while qk * q <= B1:
            qk *= q
        out.append(qk)
    return out


def pollard_p_minus_1(n: int, B1: int = 100_000, B2: int | None = None,
                      bases=(2, 3, 5, 7)) -> int:
    """Pollard p - 1 with stage 2 up to ``B2`` (default 20 * B1).

    When the gcd collapses to n the base is replayed one prime at a time in
    descending order before moving to the next base.
    """
    if n < 4:
        raise NoFactorFound(f"{n} is too small to split")
    if n % 2 == 0:
        return 2
    if B2 is None:
        B2 = 20 * B1
    N = mpz(n)
    powers = _prime_powers(B1)
    for a0 in bases:
        if gcd(a0, n) != 1:
            g = gcd(a0, n)
            if g != n:
                return g
            continue
        a = mpz(a0)
        collided = False
        for i in range(0, len(powers), 128):
            for qk in powers[i:i + 128]:
                a = pow(a, qk, N)
            g = gcd(a - 1, N)
            if g == N:
                collided = True
                break
            if g > 1:
                return int(g)
        if collided:
            a = mpz(a0)
            for qk in reversed(powers):
                a = pow(a, qk, N)
                g = gcd(a - 1, N)
                if 1 < g < N:
                    return int(g)
                if g == N:
                    break
            continue
        g = _pm1_stage_two(N, a, B1, B2)
        if g:
            return g
    raise NoFactorFound(f"p - 1 with B1 = {B1} found nothing")


def _pm1_stage_two(N, a, B1: int, B2: int) -> int | None:
    if B2 <= B1:
        return None
    primes = [q for q in _primes_upto(B2) if q > B1]
    if not primes:
        return None
    gaps: dict[int, object] = {}
    x = pow(a, primes[0], N)
    acc = mpz(1)
    prev = primes[0]
    for i, q in enumerate(primes):
        if i:
            gap = q - prev
            step = gaps.get(gap)
            if step is None:
                step = gaps[gap] = pow(a, gap, N)
            x = x * step % N
            prev = q
        acc = acc * (x - 1) % N
        if i % 512 == 511:
            g = gcd(acc, N)
            if g == N:
                return None
            if g > 1:
                return int(g)
    g = gcd(acc, N)
    return int(g) if 1 < g < N else None


# -- ECM on Montgomery curves ------------------------------------------------

class _Found(Exception):
    def __init__(self, factor: int):
        self.factor = factor


def _xdbl(X, Z, a24, N):
    s, d = (X + Z) % N, (X - Z) % N
    s, d = s * s % N, d * d % N
    t = s - d
    return s * d % N, t * (d + a24 * t) % N


def _xadd(XP, ZP, XQ, ZQ, Xd, Zd, N):
    u = (XP - ZP) * (XQ + ZQ) % N
    v = (XP + ZP) * (XQ - ZQ) % N
    s, t = u + v, u - v
    return Zd * s * s % N, Xd * t * t % N


def _ladder(k: int, X, Z, a24, N):
    if k == 1:
        return X, Z
    # Montgomery ladder with _xadd/_xdbl inlined; this loop dominates ECM time
    X0, Z0 = X, Z
    X1, Z1 = _xdbl(X, Z, a24, N)
    for bit in bin(k)[3:]:
        u = (X1 - Z1) * (X0 + Z0) % N
        v = (X1 + Z1) * (X0 - Z0) % N
        sa, ta = u + v, u - v
        Xa, Za = Z * sa * sa % N, X * ta * ta % N
        if bit == "1":
            s, d = X1 + Z1, X1 - Z1
        else:
            s, d = X0 + Z0, X0 - Z0
        s, d = s * s % N, d * d % N
        t = s - d
        Xd, Zd = s * d % N, t * (d + a24 * t) % N
        if bit == "1":
            X0, Z0, X1, Z1 = Xa, Za, Xd, Zd
        else:
            X0, Z0, X1, Z1 = Xd, Zd, Xa, Za
    return X0, Z0


def _suyama(sigma: int, N):
    u = (sigma * sigma - 5) % N
    v = 4 * sigma % N
    X, Z = pow(u, 3, N), pow(v, 3, N)
    num = pow(v - u, 3, N) * (3 * u + v) % N
    den = 16 * pow(u, 3, N) * v % N
    g = gcd(den, N)
    if g != 1:
        raise _Found(int(g))
    return X, Z, num * pow(den, -1, N) % N


def ecm_curve(n: int, sigma: int, B1: int, B2: int | None = None) -> int | None:
    """One ECM curve; returns a divisor of n (possibly n itself) or None."""
    N = mpz(n)
    if B2 is None:
        B2 = 50 * B1
    try:
        X, Z, a24 = _suyama(sigma, N)
        for qk in _prime_powers(B1):
            X, Z = _ladder(qk, X, Z, a24, N)
        g = gcd(Z, N)
        if g != 1:
            return int(g)
        return _ecm_stage_two(X, Z, a24, N, B1, B2)
    except _Found as hit:
        return hit.factor


def _ecm_stage_two(X, Z, a24, N, B1: int, B2: int) -> int | None:
    D = 2310
    js = [j for j in range(1, D // 2, 2) if gcd(j, D) == 1]
    # odd multiples jQ for j < D/2
    mult = {1: (X, Z)}
    X2, Z2 = _xdbl(X, Z, a24, N)
    mult[3] = _xadd(X2, Z2, X, Z, X, Z, N)
    for j in range(5, D // 2, 2):
        a, b = mult[j - 2]
        c, d = mult[j - 4]
        mult[j] = _xadd(a, b, X2, Z2, c, d, N)
    baby = [mult[j] for j in js]
    XD, ZD = _ladder(D, X, Z, a24, N)
    m = max(1, B1 // D)
    prev = _ladder(m * D, X, Z, a24, N)
    cur = _ladder((m + 1) * D, X, Z, a24, N)
    acc = mpz(1)
    while m * D - D // 2 <= B2:
        Xg, Zg = prev
        for xj, zj in baby:
            acc = acc * (Xg * zj - xj * Zg) % N
        if m % 32 == 0:
            g = gcd(acc, N)
            if g != 1:
                return int(g)
        # (m + 2)D = (m + 1)D + D with difference mD
        prev, cur = cur, _xadd(cur[0], cur[1], XD, ZD, prev[0], prev[1], N)
        m += 1
    g = gcd(acc, N)
    return int(g) if g != 1 else None


def ecm(n: int, curves: int, B1: int, B2: int | None = None, sigma0: int = 6) -> int:
    """Run up to ``curves`` curves with sigma = sigma0, sigma0 + 1, ...

    Returns a proper divisor or raises NoFactorFound.
    """
    if n < 4:
        raise NoFactorFound(f"{n} is too small to split")
    if n % 2 == 0:
        return 2
    for sigma in range(sigma0, sigma0 + curves):
        g = ecm_curve(n, sigma, B1, B2)
        if g is not None and 1 < g < n:
            return g
    raise NoFactorFound(f"ECM: {curves} curves at B1 = {B1} found nothing")
