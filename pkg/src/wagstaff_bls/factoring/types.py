"""Value types for factoring results and budgets."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from math import prod
from typing import Any


class Provenance(str, Enum):
    """Where a prime's literal value first entered the pipeline (audit only)."""

    ALGEBRAIC = "algebraic"
    TABLE_LOOKUP = "table_lookup"
    EXTERNAL_DB = "external_db"
    TRIAL_DIV_CYCLOTOMIC = "trial_div_cyclotomic"
    DIRECT_RHO = "direct_rho"
    DIRECT_PMINUS1 = "direct_pminus1"
    DIRECT_ECM = "direct_ecm"
    CYCLOTOMIC_PRIME = "cyclotomic_prime"
    RESIDUAL_PRIME_CERTIFIED = "residual_prime_certified"


@dataclass(frozen=True)
class PrimeFactor:
    prime: int
    exponent: int
    provenance: Provenance
    proof: Any  # certify.PrimalityProof


@dataclass
class Factorization:
    n: int
    factors: list[PrimeFactor] = field(default_factory=list)
    residual: int = 1

    @property
    def complete(self) -> bool:
        return self.residual == 1

    @property
    def primes(self) -> list[int]:
        return [f.prime for f in self.factors]

    def as_dict(self) -> dict[int, int]:
        return {f.prime: f.exponent for f in self.factors}

    def product_holds(self) -> bool:
        return prod(f.prime ** f.exponent for f in self.factors) * self.residual == self.n


@dataclass(frozen=True)
class BudgetSpec:
    """Per-composite effort limits for factoring Phi_d(2).

    ``trial_candidates`` counts progression members, not a value bound.
    ECM is off unless ``ecm_curves`` is positive.
    """

    trial_candidates: int = 1_000_000
    rho_iterations: int = 20_000_000
    pm1_b1: int = 100_000
    pm1_b2: int | None = None
    ecm_curves: int = 0
    ecm_b1: int = 11_000

    def trial_bound(self, d: int) -> int:
        step = 2 * d if d % 2 else d
        if d <= 2:
            step = 2
        return 1 + step * self.trial_candidates
