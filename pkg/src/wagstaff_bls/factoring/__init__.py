"""Factoring of cyclotomic values with per-prime provenance."""

from .methods import (ecm, largest_prime_factor, pollard_p_minus_1, pollard_rho,
                      progression_sieve)
from .pipeline import SourceSet, factor_fully, trial_division_progression
from .tables import format_factor_table, load_factor_table, load_tables, parse_factor_table
from .types import BudgetSpec, Factorization, PrimeFactor, Provenance

__all__ = [
    "BudgetSpec", "Factorization", "PrimeFactor", "Provenance", "SourceSet",
    "ecm", "factor_fully", "format_factor_table", "largest_prime_factor",
    "load_factor_table", "load_tables", "parse_factor_table", "pollard_p_minus_1",
    "pollard_rho", "progression_sieve", "trial_division_progression",
]
