"""Core of the BLS N - 1 criterion, shared by the Wagstaff prover and the
recursive prime certifier.

N - 1 = F R with F even, gcd(F, R) = 1 and every prime q | F carrying a
witness a_q (a_q^(N-1) == 1, gcd(a_q^((N-1)/q) - 1, N) == 1).  Then N is prime
when F^2 > N.  When only F^3 > N holds, write R = 2 F s + r with 0 <= r < 2F;
N is prime iff s == 0 or r^2 - 8 s is not a perfect square.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .bigmath import gcd, is_perfect_square, mod_pow, small_primes
from .errors import (CompositeDetected, FactorFound, InsufficientFactoredPart,
                     NotApplicable, WitnessSearchExhausted)

__all__ = [
    "Form", "DiscriminantRecord", "WITNESS_CANDIDATES", "find_witness",
    "witness_holds", "classify_form", "margin_bits", "discriminant_check",
]

WITNESS_CANDIDATES = tuple(small_primes(600)[:100])


class Form(str, Enum):
    SQRT = "sqrt"
    CUBE = "cube"


@dataclass(frozen=True)
class DiscriminantRecord:
    s: int
    r: int
    delta: int
    is_square: bool

    @property
    def accepts(self) -> bool:
        return self.s == 0 or not self.is_square


def witness_holds(N: int, q: int, a: int) -> bool:
    """Both witness conditions for (q, a) modulo N."""
    if a % N == 0 or mod_pow(a, N - 1, N) != 1:
        return False
    return gcd(mod_pow(a, (N - 1) // q, N) - 1, N) == 1


def find_witness(N: int, q: int, cofactor_exp: int | None = None,
                 candidates=WITNESS_CANDIDATES) -> int:
    """Smallest prime base a with a^(N-1) == 1 and gcd(a^((N-1)/q) - 1, N) == 1.

    A Fermat failure raises CompositeDetected, a proper gcd raises FactorFound.
    """
    if (N - 1) % q:
        raise ValueError(f"{q} does not divide N - 1")
    if cofactor_exp is None:
        cofactor_exp = (N - 1) // q
    for a in candidates:
        if a % N == 0:
            continue
        if mod_pow(a, N - 1, N) != 1:
            raise CompositeDetected(N, witness=a, kind="fermat")
        g = gcd(mod_pow(a, cofactor_exp, N) - 1, N)
        if g == 1:
            return a
        if g != N:
            raise FactorFound(N, g)
    raise WitnessSearchExhausted(f"no witness for q = {q} among {len(candidates)} candidates")


def classify_form(N: int, F: int) -> Form:
    if F * F > N:
        return Form.SQRT
    if F ** 3 > N:
        return Form.CUBE
    # F with bit_length > bitlen(N)/3 + 1 always clears the cube threshold
    missing = N.bit_length() // 3 + 2 - F.bit_length()
    raise InsufficientFactoredPart(
        f"F^3 <= N: factored part has {F.bit_length()} bits, N has {N.bit_length()}",
        missing_bits=max(1, missing))


def margin_bits(N: int, F: int) -> int:
    """floor(log2 F^3) - floor(log2 N)."""
    return (F ** 3).bit_length() - N.bit_length()


def discriminant_check(N: int, F: int, R: int) -> DiscriminantRecord:
    if F * R != N - 1:
        raise ValueError("F * R != N - 1")
    if F * F > N:
        raise NotApplicable("F > sqrt(N): the discriminant test is vacuous")
    if F ** 3 <= N:
        raise InsufficientFactoredPart("F^3 <= N")
    if F % 2:
        raise ValueError("the cube-root form needs an even factored part")
    s, r = divmod(R, 2 * F)
    delta = r * r - 8 * s
    return DiscriminantRecord(s=s, r=r, delta=delta, is_square=is_perfect_square(delta))
