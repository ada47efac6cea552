"""Divisors, the Moebius function and exact values of Phi_d(2)."""

from __future__ import annotations

from dataclasses import dataclass
from math import prod

from .bigmath import is_prime_trial
from .errors import InternalError, InvalidExponent

__all__ = [
    "CyclotomicTerm", "factor_small", "divisors", "mobius", "euler_phi",
    "phi_at_2", "phi_value", "wagstaff_n_minus_one", "format_factorization",
]


@dataclass(frozen=True)
class CyclotomicTerm:
    d: int
    value: int

    @property
    def bit_length(self) -> int:
        return self.value.bit_length()


def factor_small(n: int) -> dict[int, int]:
    """Prime factorization of a machine-sized ``n >= 1`` by trial division."""
    if n < 1:
        raise ValueError("n must be >= 1")
    out: dict[int, int] = {}
    f = 2
    while f * f <= n:
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        f += 1 if f == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def divisors(n: int) -> list[int]:
    divs = [1]
    for q, e in factor_small(n).items():
        divs = [x * q ** k for x in divs for k in range(e + 1)]
    return sorted(divs)


def mobius(n: int) -> int:
    f = factor_small(n)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def euler_phi(n: int) -> int:
    return prod((q - 1) * q ** (e - 1) for q, e in factor_small(n).items())


def phi_value(d: int, base: int = 2) -> int:
    """Phi_d(base) = prod over e | d of (base^e - 1)^mu(d/e), divided once at the end."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if base < 2:
        raise ValueError("base must be >= 2")
    num, den = 1, 1
    for e in divisors(d):
        mu = mobius(d // e)
        if mu == 1:
            num *= base ** e - 1
        elif mu == -1:
            den *= base ** e - 1
    value, rem = divmod(num, den)
    if rem:
        raise InternalError(f"inexact division evaluating Phi_{d}({base})")
    return value


def phi_at_2(d: int) -> int:
    return phi_value(d, 2)


def wagstaff_n_minus_one(p: int) -> tuple[int, list[CyclotomicTerm]]:
    """N - 1 for N = W_p, with the terms Phi_d(2) for every d | p - 1."""
    if p < 5 or not is_prime_trial(p):
        raise InvalidExponent(f"exponent must be a prime >= 5, got {p}")
    terms = [CyclotomicTerm(d, phi_at_2(d)) for d in divisors(p - 1)]
    total = prod(t.value for t in terms)
    if total != 2 ** (p - 1) - 1:
        raise InternalError(f"cyclotomic product mismatch for p = {p}")
    n_minus_one, rem = divmod(2 * total, 3)
    if rem or n_minus_one != (2 ** p + 1) // 3 - 1:
        raise InternalError(f"N - 1 mismatch for p = {p}")
    return n_minus_one, terms


def format_factorization(factors: dict[int, int], sep: str = " · ") -> str:
    """Render {2: 2, 3: 1} as '2^2 · 3'."""
    if not factors:
        return "1"
    return sep.join(f"{q}^{e}" if e > 1 else str(q) for q, e in sorted(factors.items()))
