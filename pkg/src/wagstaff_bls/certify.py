"""Unconditional primality certificates for the primes admitted to F.

Two proof shapes:

* ``SmallDeterministic`` for n < 2**64: strong tests to the first twelve
  prime bases, which are known to have no common pseudoprime below 3.18e23.
* ``NMinusOnePocklington`` for larger n: a partial factorization of n - 1
  whose primes carry their own (recursive) proofs, one witness per prime, and
  either the square-root or the cube-root form of the N - 1 criterion.

Proofs are plain data; ``verify_proof`` replays them without factoring.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from math import prod
from typing import Union

from .bigmath import exact_sqrt, gcd, mod_pow, small_primes, valuation
from .errors import (CertificationIncomplete, CompositeDetected, FactorFound,
                     InsufficientFactoredPart, NoFactorFound,
                     WitnessSearchExhausted)
from .factoring.methods import ecm, pollard_p_minus_1, pollard_rho
from .pocklington import (DiscriminantRecord, Form, classify_form,
                          discriminant_check, find_witness)
from .prp import (DETERMINISTIC_BASES, SMALL_THRESHOLD, deterministic_small_prime,
                  is_probable_prime, strong_witness)

__all__ = [
    "SmallDeterministic", "ProofFactor", "NMinusOnePocklington", "PrimalityProof",
    "CertifyBudget", "is_probable_prime", "prove_prime", "verify_proof",
    "proof_failure", "SMALL_METHOD",
]

log = logging.getLogger(__name__)

SMALL_METHOD = "strong-bases-2-37"


@dataclass(frozen=True)
class SmallDeterministic:
    n: int
    method: str = SMALL_METHOD


@dataclass(frozen=True)
class ProofFactor:
    q: int
    e: int
    witness: int
    proof: "PrimalityProof"


@dataclass(frozen=True)
class NMinusOnePocklington:
    n: int
    factors: tuple[ProofFactor, ...]
    form: Form
    discriminant: DiscriminantRecord | None = None

    @property
    def F(self) -> int:
        return prod(f.q ** f.e for f in self.factors)


PrimalityProof = Union[SmallDeterministic, NMinusOnePocklington]


@dataclass(frozen=True)
class CertifyBudget:
    """Effort spent factoring n - 1 at each level of the recursion."""

    trial_limit: int = 1 << 16
    pm1_b1: int = 20_000
    rho_iterations: int = 300_000
    ecm_schedule: tuple[tuple[int, int], ...] = ((2_000, 25), (11_000, 90), (50_000, 300))


_SMALL = small_primes(1 << 16)


def prove_prime(n: int, budget: CertifyBudget | None = None,
                _memo: dict[int, PrimalityProof] | None = None) -> PrimalityProof:
    """Build a checkable primality proof for ``n``.

    Raises CompositeDetected for composite n and CertificationIncomplete when
    n - 1 cannot be factored far enough within the budget.
    """
    if n < 2:
        raise ValueError(f"prove_prime needs n >= 2, got {n}")
    memo = {} if _memo is None else _memo
    if n in memo:
        return memo[n]
    if n < SMALL_THRESHOLD:
        if not deterministic_small_prime(n):
            w = next((a for a in DETERMINISTIC_BASES if n % a == 0 and n != a), None)
            if w is not None:
                raise CompositeDetected(n, kind="factor", factor=w)
            raise CompositeDetected(n, witness=strong_witness(n), kind="strong")
        proof: PrimalityProof = SmallDeterministic(n)
        memo[n] = proof
        return proof
    if not is_probable_prime(n):
        w = strong_witness(n)
        raise CompositeDetected(n, witness=w, kind="strong" if w else "lucas")
    proof = _prove_n_minus_one(n, budget or CertifyBudget(), memo)
    memo[n] = proof
    return proof


def _prove_n_minus_one(n: int, budget: CertifyBudget, memo) -> NMinusOnePocklington:
    m = n - 1
    proved: dict[int, PrimalityProof] = {}

    def F() -> int:
        return prod(q ** valuation(n - 1, q) for q in proved)

    def enough() -> bool:
        return F() ** 3 > n

    for q in _SMALL:
        if m % q == 0:
            while m % q == 0:
                m //= q
            proved[q] = SmallDeterministic(q)
        if q * q > m:
            break
    pending = [m] if m > 1 else []
    stuck: list[int] = []
    while pending and not enough():
        pending = sorted(x for x in pending if x > 1)
        if not pending:
            break
        # certify prime pieces before spending ECM on composite ones
        c = next((x for x in pending if is_probable_prime(x)), pending[0])
        pending.remove(c)
        if is_probable_prime(c):
            try:
                proved[c] = prove_prime(c, budget, memo)
            except CertificationIncomplete:
                stuck.append(c)
                continue
            pending = [_strip(x, c) for x in pending]
            continue
        g = _split(c, budget)
        if g is None:
            stuck.append(c)
        else:
            pending.extend((g, c // g))
    if not enough():
        raise CertificationIncomplete(
            f"n - 1 factored to {F().bit_length()} of the {n.bit_length() // 3 + 1} bits needed "
            f"for a {n.bit_length()}-bit n")

    factors = []
    for q in sorted(proved):
        try:
            a = find_witness(n, q)
        except FactorFound as exc:
            raise CompositeDetected(n, kind="factor", factor=exc.factor) from None
        except WitnessSearchExhausted:
            # a prime always has a primitive root; this is astronomically unlikely
            raise CertificationIncomplete(f"no witness found for q = {q}") from None
        factors.append(ProofFactor(q, valuation(n - 1, q), a, proved[q]))
    Fp = prod(f.q ** f.e for f in factors)
    try:
        form = classify_form(n, Fp)
    except InsufficientFactoredPart as exc:  # pragma: no cover - guarded by enough()
        raise CertificationIncomplete(str(exc)) from None
    rec = None
    if form is Form.CUBE:
        rec = discriminant_check(n, Fp, (n - 1) // Fp)
        if not rec.accepts:
            raise CompositeDetected(n, kind="discriminant")
    return NMinusOnePocklington(n, tuple(factors), form, rec)


def _strip(x: int, q: int) -> int:
    while x % q == 0:
        x //= q
    return x


def _split(c: int, budget: CertifyBudget) -> int | None:
    r = exact_sqrt(c)
    if r is not None:
        return r
    try:
        return pollard_p_minus_1(c, budget.pm1_b1)
    except NoFactorFound:
        pass
    try:
        return pollard_rho(c, budget.rho_iterations)
    except NoFactorFound:
        pass
    sigma = 6
    for b1, curves in budget.ecm_schedule:
        try:
            return ecm(c, curves, b1, sigma0=sigma)
        except NoFactorFound:
            sigma += curves
    log.debug("could not split a %d-bit composite", c.bit_length())
    return None


def proof_failure(n: int, proof: PrimalityProof) -> str | None:
    """Replay ``proof``; return None when it checks out, else a reason."""
    if isinstance(proof, SmallDeterministic):
        if proof.n != n:
            return f"proof is for {proof.n}, not {n}"
        if proof.method != SMALL_METHOD:
            return f"unknown small-prime method {proof.method!r}"
        if not 2 <= n < SMALL_THRESHOLD:
            return "small-prime leaf outside [2, 2**64)"
        if not deterministic_small_prime(n):
            return f"{n} fails the deterministic strong test"
        return None
    if not isinstance(proof, NMinusOnePocklington):
        return f"unknown proof node {type(proof).__name__}"
    if proof.n != n:
        return f"proof is for {proof.n}, not {n}"
    if n < 3 or n % 2 == 0:
        return "N - 1 node needs an odd n >= 3"
    if not proof.factors:
        return "empty factored part"
    seen = set()
    for f in proof.factors:
        if f.q in seen:
            return f"prime {f.q} listed twice"
        seen.add(f.q)
        if f.e < 1:
            return f"non-positive exponent for {f.q}"
    Fp = proof.F
    R, rem = divmod(n - 1, Fp)
    if rem:
        return "F does not divide n - 1"
    if gcd(Fp, R) != 1:
        return "gcd(F, R) != 1"
    for f in proof.factors:
        sub = proof_failure(f.q, f.proof)
        if sub is not None:
            return f"sub-proof for {f.q}: {sub}"
    for f in proof.factors:
        a = f.witness
        if a % n == 0 or mod_pow(a, n - 1, n) != 1:
            return f"witness {a} fails a^(n-1) == 1 for q = {f.q}"
        if gcd(mod_pow(a, (n - 1) // f.q, n) - 1, n) != 1:
            return f"witness {a} fails the gcd condition for q = {f.q}"
    if proof.form is Form.SQRT:
        if Fp * Fp <= n:
            return "F^2 <= n for a square-root form proof"
        if proof.discriminant is not None:
            return "square-root form carries a discriminant"
        return None
    if proof.form is not Form.CUBE:
        return f"unknown form {proof.form!r}"
    if Fp ** 3 <= n:
        return "F^3 <= n"
    if Fp * Fp > n:
        return "cube form claimed although F^2 > n"
    if Fp % 2:
        return "cube form needs an even F"
    rec = proof.discriminant
    if rec is None:
        return "cube form without discriminant"
    s, r = divmod(R, 2 * Fp)
    delta = r * r - 8 * s
    if (rec.s, rec.r, rec.delta) != (s, r, delta):
        return "discriminant record does not match R"
    square = exact_sqrt(delta) is not None
    if rec.is_square != square:
        return "discriminant square flag is wrong"
    if s != 0 and square:
        return "discriminant is a perfect square"
    return None


def verify_proof(n: int, proof: PrimalityProof) -> bool:
    return proof_failure(n, proof) is None
