"""Exact big-integer helpers.

Everything here is integer-only.  When gmpy2 is importable it is used for
modular exponentiation and decimal conversion (GMP multiplication is
sub-quadratic); otherwise the built-in ``int`` paths are used and results are
identical.
"""

from __future__ import annotations

from math import gcd, isqrt

from .errors import InvalidModulus, UndefinedValuation

try:
    import gmpy2
    from gmpy2 import mpz
except ImportError:  # pragma: no cover - exercised only without gmpy2
    gmpy2 = None
    mpz = int

HAVE_GMPY2 = gmpy2 is not None

__all__ = [
    "HAVE_GMPY2", "mpz", "gcd", "isqrt", "mod_pow", "jacobi", "exact_sqrt",
    "is_perfect_square", "valuation", "digits10", "to_decimal", "from_decimal",
    "is_prime_trial", "small_primes",
]


def mod_pow(base: int, exp: int, modulus: int) -> int:
    """``base**exp % modulus`` for ``modulus >= 2`` and ``exp >= 0``."""
    if modulus < 2:
        raise InvalidModulus(f"modulus must be >= 2, got {modulus}")
    if exp < 0:
        raise ValueError("negative exponent")
    if HAVE_GMPY2:
        return int(gmpy2.powmod(base, exp, modulus))
    return pow(base, exp, modulus)


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd ``n >= 3``, by binary reciprocity."""
    if n < 3 or n % 2 == 0:
        raise InvalidModulus(f"Jacobi symbol needs odd n >= 3, got {n}")
    a %= n
    result = 1
    while a:
        tz = (a & -a).bit_length() - 1
        a >>= tz
        if tz & 1 and n % 8 in (3, 5):
            result = -result
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a, n = n % a, a
    return result if n == 1 else 0


# quadratic residues used as a cheap prefilter; never decides a "yes"
_QR = {m: frozenset(x * x % m for x in range(m)) for m in (64, 63, 65, 11)}


def exact_sqrt(z: int) -> int | None:
    """Return t >= 0 with t*t == z, or None when z is not a perfect square."""
    if z < 0:
        return None
    for m, residues in _QR.items():
        if z % m not in residues:
            return None
    t = isqrt(z)
    return t if t * t == z else None


def is_perfect_square(z: int) -> bool:
    return exact_sqrt(z) is not None


def valuation(n: int, q: int) -> int:
    """Largest e with q**e dividing n."""
    if n == 0:
        raise UndefinedValuation("valuation of 0 is undefined")
    if q < 2:
        raise ValueError(f"valuation base must be >= 2, got {q}")
    n = abs(n)
    if q == 2:
        return (n & -n).bit_length() - 1
    e = 0
    # square the divisor to strip high powers quickly
    while n % q == 0:
        qk, k = q, 1
        while n % (qk * qk) == 0:
            qk, k = qk * qk, 2 * k
        n //= qk
        e += k
    return e


def digits10(n: int) -> int:
    """Exact number of decimal digits of ``n >= 1``."""
    if n < 1:
        raise ValueError("digits10 needs n >= 1")
    # log10(2) ~ 30103/100000 gives a guess within one of the answer
    k = (n.bit_length() - 1) * 30103 // 100000
    while 10 ** (k + 1) <= n:
        k += 1
    while 10 ** k > n:
        k -= 1
    return k + 1


def to_decimal(n: int) -> str:
    """Decimal string of an arbitrarily large integer.

    Bypasses the interpreter's int->str digit limit, which certificates for
    the larger exponents exceed.
    """
    if HAVE_GMPY2:
        return mpz(n).digits(10)
    return _to_decimal_dc(int(n))


def _to_decimal_dc(n: int) -> str:
    if n < 0:
        return "-" + _to_decimal_dc(-n)
    if n < 10 ** 1000:
        return str(n)
    k = digits10(n) // 2
    hi, lo = divmod(n, 10 ** k)
    return _to_decimal_dc(hi) + _to_decimal_dc(lo).rjust(k, "0")


def from_decimal(s: str) -> int:
    """Parse a canonical decimal integer (optional leading '-', no spaces, no '+')."""
    body = s[1:] if s.startswith("-") else s
    if not body or not body.isascii() or not body.isdigit():
        raise ValueError(f"not a decimal integer: {s[:40]!r}")
    if len(body) > 1 and body[0] == "0":
        raise ValueError(f"leading zero in decimal integer: {s[:40]!r}")
    if s == "-0":
        raise ValueError("negative zero")
    if HAVE_GMPY2:
        return int(mpz(s))
    return _from_decimal_dc(s)


def _from_decimal_dc(s: str) -> int:
    if s.startswith("-"):
        return -_from_decimal_dc(s[1:])
    if len(s) <= 1000:
        return int(s)
    k = len(s) // 2
    return _from_decimal_dc(s[:-k]) * 10 ** k + _from_decimal_dc(s[-k:].lstrip("0") or "0")


def small_primes(limit: int) -> list[int]:
    """Primes below ``limit`` (sieve of Eratosthenes)."""
    if limit < 3:
        return []
    sieve = bytearray([1]) * limit
    sieve[0] = sieve[1] = 0
    for i in range(2, isqrt(limit - 1) + 1):
        if sieve[i]:
            sieve[i * i::i] = bytes(len(range(i * i, limit, i)))
    return [i for i in range(limit) if sieve[i]]


def is_prime_trial(n: int) -> bool:
    """Primality by trial division; meant for exponents and divisor-sized inputs."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True
