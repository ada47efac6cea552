"""Probable-prime screens: strong Fermat, strong Lucas (Selfridge), BPSW,
and the deterministic strong test used below 2**64."""

from __future__ import annotations

from .bigmath import exact_sqrt, jacobi, mod_pow, small_primes

__all__ = [
    "SMALL_THRESHOLD", "DETERMINISTIC_BASES", "strong_probable_prime",
    "strong_lucas_probable_prime", "is_probable_prime", "deterministic_small_prime",
    "strong_witness",
]

# the first 12 primes as strong-test bases are deterministic below 3.18e23,
# comfortably above 2**64
SMALL_THRESHOLD = 2 ** 64
DETERMINISTIC_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_TRIAL = small_primes(1000)


def strong_probable_prime(n: int, a: int) -> bool:
    """Miller-Rabin round for odd n > 2 with base a."""
    a %= n
    if a in (0, 1, n - 1):
        return True
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    x = mod_pow(a, d, n)
    if x in (1, n - 1):
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
        if x == 1:
            return False
    return False


def _selfridge_params(n: int) -> tuple[int, int, int] | None:
    D = 5
    while True:
        j = jacobi(D, n)
        if j == -1:
            return D, 1, (1 - D) // 4
        if j == 0 and abs(D) != n:
            return None  # |D| shares a factor with n
        D = -D - 2 if D > 0 else -D + 2


def strong_lucas_probable_prime(n: int) -> bool:
    """Strong Lucas test with Selfridge's method A parameters; n odd, > 2, not a square."""
    params = _selfridge_params(n)
    if params is None:
        return False
    D, P, Q = params
    d, s = n + 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1

    def half(x: int) -> int:
        return (x + n) // 2 if x & 1 else x // 2

    U, V, Qk = 1, P % n, Q % n
    for bit in bin(d)[3:]:
        U, V = U * V % n, (V * V - 2 * Qk) % n
        Qk = Qk * Qk % n
        if bit == "1":
            U, V = half((P * U + V) % n), half((D * U + P * V) % n)
            Qk = Qk * Q % n
    if U == 0 or V == 0:
        return True
    for _ in range(s - 1):
        V = (V * V - 2 * Qk) % n
        Qk = Qk * Qk % n
        if V == 0:
            return True
    return False


def is_probable_prime(n: int) -> bool:
    """BPSW: trial division, strong base-2 test, strong Lucas test."""
    if n < 2:
        return False
    for q in _TRIAL:
        if n % q == 0:
            return n == q
    if n < 1000 * 1000:
        return True
    if not strong_probable_prime(n, 2):
        return False
    if exact_sqrt(n) is not None:
        return False
    return strong_lucas_probable_prime(n)


def strong_witness(n: int, bases=DETERMINISTIC_BASES) -> int | None:
    """First base in ``bases`` that proves odd ``n > 3`` composite, or None."""
    for a in bases:
        if a % n and not strong_probable_prime(n, a):
            return a
    return None


def deterministic_small_prime(n: int) -> bool:
    """Unconditional primality for n < 2**64."""
    if n >= SMALL_THRESHOLD:
        raise ValueError("deterministic_small_prime needs n < 2**64")
    if n < 2:
        return False
    for q in DETERMINISTIC_BASES:
        if n % q == 0:
            return n == q
    return strong_witness(n) is None
