"""Factor Phi_d(2) as far as the budget allows, certifying every prime.

Order of attack: local table claims, external database claims, the
cofactor-is-prime shortcut, progression trial division, then p - 1, rho and
(optionally) ECM on whatever composite remains.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Protocol

from .. import certify
from ..bigmath import to_decimal
from ..errors import (CertificationIncomplete, CompositeDetected, DbUnavailable,
                      InternalError, NoFactorFound)
from ..prp import is_probable_prime
from .methods import ecm, pollard_p_minus_1, pollard_rho, progression_sieve
from .tables import FactorTable
from .types import BudgetSpec, Factorization, PrimeFactor, Provenance

__all__ = ["SourceSet", "ClaimSource", "trial_division_progression", "factor_fully"]

log = logging.getLogger(__name__)


class ClaimSource(Protocol):
    """Anything with a ``lookup(n)`` returning an object with ``.factors``."""

    def lookup(self, n: int): ...


@dataclass
class SourceSet:
    table: FactorTable | None = None
    factordb: ClaimSource | None = None
    certify_budget: certify.CertifyBudget | None = None


class _Collector:
    """Accumulates certified primes and unresolved pieces for one n."""

    def __init__(self, n: int, cert_budget):
        self.n = n
        self.factors: dict[int, PrimeFactor] = {}
        self.rest = n
        self.unknown: list[int] = []
        self.cert_budget = cert_budget
        self.memo: dict = {}

    def admit(self, q: int, prov: Provenance) -> bool:
        """Certify q and strip every copy of it from the unresolved part."""
        if q in self.factors:
            return True
        if q < 2 or self.rest % q:
            return False
        try:
            proof = certify.prove_prime(q, self.cert_budget, self.memo)
        except CompositeDetected:
            log.warning("claimed prime %s... is composite; discarded", to_decimal(q)[:30])
            return False
        except CertificationIncomplete:
            log.info("could not certify a %d-bit prime; left in the residual", q.bit_length())
            return False
        e = 0
        while self.rest % q == 0:
            self.rest //= q
            e += 1
        self.factors[q] = PrimeFactor(q, e, prov, proof)
        return True

    def result(self) -> Factorization:
        fs = sorted(self.factors.values(), key=lambda f: f.prime)
        out = Factorization(self.n, fs, self.rest)
        if not out.product_holds():
            raise InternalError("factorization product mismatch")
        return out


def trial_division_progression(n: int, d: int, bound: int,
                               cert_budget: certify.CertifyBudget | None = None) -> Factorization:
    """Certified primes q <= bound, q == 1 (mod d), plus d's largest prime factor."""
    if n < 2 or d < 1:
        raise ValueError("trial_division_progression needs n >= 2, d >= 1")
    found, _, _ = progression_sieve(n, d, bound)
    col = _Collector(n, cert_budget)
    for q, _e in found:
        col.admit(q, Provenance.TRIAL_DIV_CYCLOTOMIC)
    return col.result()


def factor_fully(n: int, d: int = 1, budget: BudgetSpec | None = None,
                 sources: SourceSet | None = None) -> Factorization:
    """Factor ``n`` (normally Phi_d(2)) into certified primes and a residual.

    The residual is whatever could not be split or certified within the
    budget; it is 1 when the factorization is complete.
    """
    if n < 1:
        raise ValueError("factor_fully needs n >= 1")
    budget = budget or BudgetSpec()
    sources = sources or SourceSet()
    col = _Collector(n, sources.certify_budget)
    if n == 1:
        return col.result()

    if sources.table and d in sources.table:
        for q, e in sources.table[d]:
            if col.rest % (q ** e) or not col.admit(q, Provenance.TABLE_LOOKUP):
                log.warning("table claim %s^%d for d = %d rejected", to_decimal(q)[:30], e, d)

    pieces: list[int] = []
    if sources.factordb is not None and col.rest > 1 and not is_probable_prime(col.rest):
        try:
            resp = sources.factordb.lookup(n)
        except DbUnavailable as exc:
            log.info("factor database unavailable (%s); continuing locally", exc)
        else:
            for f, _e in resp.factors:
                if f < 2 or f == n or col.rest % f:
                    if f != n:
                        log.warning("database claim %s... does not divide; discarded", to_decimal(f)[:30])
                    continue
                if is_probable_prime(f):
                    col.admit(f, Provenance.EXTERNAL_DB)
                elif f < col.rest:
                    pieces.append(f)

    if col.rest > 1 and col.rest == n and is_probable_prime(n):
        col.admit(n, Provenance.CYCLOTOMIC_PRIME)
        return col.result()

    if col.rest > 1 and not is_probable_prime(col.rest):
        found, cof, exhausted = progression_sieve(col.rest, d, budget.trial_bound(d))
        for q, _e in found:
            col.admit(q, Provenance.TRIAL_DIV_CYCLOTOMIC)
        if exhausted and col.rest > 1 and col.rest == cof and is_probable_prime(cof):
            # no progression prime up to sqrt(cof) divides it
            col.admit(cof, Provenance.TRIAL_DIV_CYCLOTOMIC)

    if col.rest > 1 and is_probable_prime(col.rest):
        col.admit(col.rest, Provenance.RESIDUAL_PRIME_CERTIFIED)

    if col.rest > 1:
        rem, kept = col.rest, []
        for p in pieces:
            if rem % p == 0:
                rem //= p
                kept.append(p)
        if rem > 1:
            kept.append(rem)
        _split_pieces(col, kept, budget)
    return col.result()


def _split_pieces(col: _Collector, pieces: list[int], budget: BudgetSpec) -> None:
    stack = [(p, None) for p in pieces]
    while stack:
        c, how = stack.pop()
        c = _reduce(col, c)
        if c == 1:
            continue
        if is_probable_prime(c):
            if col.admit(c, how or Provenance.RESIDUAL_PRIME_CERTIFIED):
                continue
            col.unknown.append(c)
            continue
        split = _split_once(c, budget)
        if split is None:
            col.unknown.append(c)
            continue
        g, prov = split
        stack.append((g, prov))
        stack.append((c // g, prov))


def _reduce(col: _Collector, c: int) -> int:
    for q in col.factors:
        while c % q == 0:
            c //= q
    return c


def _split_once(c: int, budget: BudgetSpec) -> tuple[int, Provenance] | None:
    try:
        return pollard_p_minus_1(c, budget.pm1_b1, budget.pm1_b2), Provenance.DIRECT_PMINUS1
    except NoFactorFound:
        pass
    try:
        return pollard_rho(c, budget.rho_iterations), Provenance.DIRECT_RHO
    except NoFactorFound:
        pass
    if budget.ecm_curves > 0:
        try:
            return ecm(c, budget.ecm_curves, budget.ecm_b1), Provenance.DIRECT_ECM
        except NoFactorFound:
            pass
    return None
