"""Arithmetic in Z[sqrt(D)]/(N): Chebyshev bases, Pell numbers, the Chua congruence.

The Chua congruence for base ``a`` and odd prime ``Q`` coprime to ``a^2 - 1``
states ``omega_a^((Q - eps)/2) == delta (mod Q)`` with ``omega_a = a + sqrt(a^2 - 1)``,
``eps = (a^2 - 1 / Q)`` and ``delta = (2(a + 1) / Q)``.  For Wagstaff numbers
only ``a = 3`` is used, where both symbols collapse to ``(2 / Q)``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bigmath import gcd, is_prime_trial, jacobi, mpz
from .errors import InvalidExponent, InvalidModulus, NotCoprime, RingMismatch

__all__ = [
    "QuadResidue", "PellPair", "quad_mul", "quad_pow", "norm", "omega", "pell",
    "chua_symbols", "chua_check", "chua_power", "condition_two", "wagstaff",
]


@dataclass(frozen=True)
class QuadResidue:
    """x + y*sqrt(D) reduced modulo N, with 0 <= x, y < N."""

    x: int
    y: int
    D: int
    N: int

    def __post_init__(self):
        if self.N < 3 or self.N % 2 == 0:
            raise InvalidModulus(f"ring modulus must be odd and >= 3, got {self.N}")
        if not (0 <= self.x < self.N and 0 <= self.y < self.N):
            raise ValueError("QuadResidue components must be reduced; use QuadResidue.of")

    @classmethod
    def of(cls, x: int, y: int, D: int, N: int) -> QuadResidue:
        return cls(int(x % N), int(y % N), D, N)

    @classmethod
    def one(cls, D: int, N: int) -> QuadResidue:
        return cls(1, 0, D, N)

    def __mul__(self, other: QuadResidue) -> QuadResidue:
        return quad_mul(self, other)

    def __pow__(self, k: int) -> QuadResidue:
        return quad_pow(self, k)


@dataclass(frozen=True)
class PellPair:
    """(1 + sqrt 2)^n = V/2 + U*sqrt 2, exact and unreduced."""

    U: int
    V: int
    n: int


def _check_ring(u: QuadResidue, v: QuadResidue) -> None:
    if u.D != v.D or u.N != v.N:
        raise RingMismatch(f"cannot combine Z[sqrt {u.D}]/({u.N}) with Z[sqrt {v.D}]/({v.N})")


def quad_mul(u: QuadResidue, v: QuadResidue) -> QuadResidue:
    _check_ring(u, v)
    N, D = u.N, u.D
    x = (u.x * v.x + D * u.y * v.y) % N
    y = (u.x * v.y + v.x * u.y) % N
    return QuadResidue(x, y, D, N)


def quad_pow(u: QuadResidue, k: int) -> QuadResidue:
    """u**k by left-to-right square-and-multiply."""
    if k < 0:
        raise ValueError("negative exponent")
    N, D = mpz(u.N), u.D
    bx, by = mpz(u.x), mpz(u.y)
    x, y = mpz(1), mpz(0)
    for bit in bin(k)[2:]:
        # (x + y r)^2 = x^2 + D y^2 + 2xy r
        x, y = (x * x + D * y * y) % N, (2 * x * y) % N
        if bit == "1":
            x, y = (x * bx + D * y * by) % N, (x * by + bx * y) % N
    return QuadResidue(int(x), int(y), u.D, u.N)


def norm(u: QuadResidue) -> int:
    """x^2 - D y^2 mod N."""
    return (u.x * u.x - u.D * u.y * u.y) % u.N


def omega(a: int, N: int, *, canonical: bool = True) -> QuadResidue:
    """The Chebyshev base a + sqrt(a^2 - 1) as a ring element.

    For a = 3 the canonical ring is Z[sqrt 2] with omega_3 = 3 + 2*sqrt 2;
    ``canonical=False`` gives the literal 3 + sqrt 8 instead.
    """
    if a in (0, 1, -1):
        raise ValueError(f"Chebyshev base undefined for a = {a}")
    if a == 3 and canonical:
        return QuadResidue.of(3, 2, 2, N)
    return QuadResidue.of(a, 1, a * a - 1, N)


def pell(n: int) -> PellPair:
    if n < 0:
        raise ValueError("pell index must be >= 0")
    # exact powering of 1 + sqrt 2
    x, y = 1, 0
    bx, by = 1, 1
    k = n
    while k:
        if k & 1:
            x, y = x * bx + 2 * y * by, x * by + y * bx
        bx, by = bx * bx + 2 * by * by, 2 * bx * by
        k >>= 1
    return PellPair(U=y, V=2 * x, n=n)


def chua_symbols(a: int, Q: int) -> tuple[int, int]:
    """(eps, delta) = ((a^2 - 1 / Q), (2(a + 1) / Q))."""
    if Q < 3 or Q % 2 == 0:
        raise InvalidModulus(f"Q must be odd and >= 3, got {Q}")
    D = a * a - 1
    g = gcd(D, Q)
    if g != 1:
        raise NotCoprime(f"gcd(a^2 - 1, Q) = {g}", factor=g if 1 < g < Q else None)
    eps = jacobi(D, Q)
    delta = jacobi(2 * (a + 1), Q)
    if eps == 0 or delta == 0:  # cannot happen once gcd(D, Q) == 1
        raise NotCoprime("zero Jacobi symbol")
    return eps, delta


def chua_power(a: int, Q: int, *, canonical: bool = True) -> tuple[int, int, QuadResidue]:
    """Return (eps, delta, omega_a^((Q - eps)/2))."""
    eps, delta = chua_symbols(a, Q)
    return eps, delta, quad_pow(omega(a, Q, canonical=canonical), (Q - eps) // 2)


def chua_check(a: int, Q: int, *, canonical: bool = True) -> bool:
    eps, delta, w = chua_power(a, Q, canonical=canonical)
    return w.x == delta % Q and w.y == 0


def wagstaff(p: int) -> int:
    return (2 ** p + 1) // 3


def condition_two(p: int) -> bool:
    """omega_3^((W_p + 1)/2) == -1 in Z[sqrt 2]/(W_p)."""
    if p < 5 or not is_prime_trial(p):
        raise InvalidExponent(f"exponent must be a prime >= 5, got {p}")
    N = wagstaff(p)
    w = quad_pow(QuadResidue.of(3, 2, 2, N), (N + 1) // 2)
    return w.x == N - 1 and w.y == 0
