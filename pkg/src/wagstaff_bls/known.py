"""Reference data: known Wagstaff exponents and published feasibility notes."""

from __future__ import annotations

# W_p proved prime, p = 3 excluded (W_3 = 3)
PROVED = (5, 7, 11, 13, 17, 19, 23, 31, 43, 61, 79, 101, 127, 167,
          191, 199, 313, 347, 701, 1709, 2617, 3539, 5807,
          10501, 10691, 11279, 12391, 14479, 42737)

# W_p probable prime, not yet proved
PROBABLE = (83339, 95369, 117239, 127031, 138937, 141079, 267017)

KNOWN = PROVED + PROBABLE

# Exponents whose BLS N - 1 proof is reported feasible with published factor data
REFERENCE_FEASIBLE = frozenset({2617, 10501, 12391})

# Published blocking divisor d for infeasible exponents; exponents in KNOWN above
# 2617 that are absent here are blocked by a large prime factor of p - 1.
REFERENCE_BLOCKING = {
    3539: 1769, 5807: 2903, 10691: 1069, 11279: 5639, 14479: 14478,
    42737: 2671, 95369: 1703, 138937: 827,
}

# Published digit count, tau(p - 1), primes in F and margin M for the three targets
REFERENCE_SUMMARY = {
    2617: {"digits": 788, "tau": 16, "primes_in_F": 22, "margin": 46},
    10501: {"digits": 3161, "tau": 48, "primes_in_F": 103, "margin": 3261},
    12391: {"digits": 3730, "tau": 32, "primes_in_F": 61, "margin": 2860},
}


def reference_verdict(p: int) -> str:
    """Published feasibility note for p, or '' when none is recorded."""
    if p in REFERENCE_FEASIBLE:
        return "feasible"
    if p in REFERENCE_BLOCKING:
        return f"blocking d = {REFERENCE_BLOCKING[p]}"
    if p in KNOWN and p > 2617:
        return "large prime in p-1"
    return ""
