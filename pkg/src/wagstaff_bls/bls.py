"""BLS N - 1 proofs for Wagstaff numbers.

N - 1 = 2 * prod_{d | p-1, d > 2} Phi_d(2).  Every Phi_d(2) that factors
completely into certified primes contributes those primes (at full valuation
in N - 1) to the factored part F; the remaining terms make up R.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from math import prod

from . import certify
from .bigmath import digits10, gcd, is_prime_trial, mod_pow, valuation
from .certificate import (BlsCertificate, ChuaRecord, CyclotomicRecord,
                          DecompositionEntry)
from .cyclotomic import (divisors, euler_phi, factor_small, format_factorization,
                         phi_at_2, wagstaff_n_minus_one)
from .errors import (CompositeDetected, FactorFound, InsufficientFactoredPart,
                     InternalError, InvalidExponent)
from .factoring import BudgetSpec, Factorization, Provenance, SourceSet, factor_fully
from .known import reference_verdict
from .pocklington import (WITNESS_CANDIDATES, DiscriminantRecord, Form, classify_form,
                          discriminant_check, find_witness, margin_bits)
from .quad_ring import chua_power, wagstaff

__all__ = [
    "Decomposition", "DivisorStatus", "ScanRow", "assemble_factored_part",
    "attach_witnesses", "find_witness", "discriminant_check", "fermat_screen",
    "prove_wagstaff", "feasibility_scan", "CHUA_BASE",
]

log = logging.getLogger(__name__)

CHUA_BASE = 3
SCREEN_BASES = WITNESS_CANDIDATES[1:11]  # 3, 5, ..., 31; base 2 never fails for W_p


@dataclass(frozen=True)
class Decomposition:
    N: int
    F: int
    R: int
    entries: tuple[DecompositionEntry, ...]
    margin: int
    form: Form
    discriminant: DiscriminantRecord | None = None


@dataclass(frozen=True)
class DivisorStatus:
    """How much of one Phi_d(2) is factored into certified primes."""

    d: int
    bits: int
    factored_bits: int
    complete: bool
    skipped: bool = False

    def describe(self) -> str:
        if self.complete:
            return f"d = {self.d}: Phi_d(2) ~ 2^{self.bits} fully factored"
        if self.skipped:
            return f"d = {self.d}: Phi_d(2) ~ 2^{self.bits} not attempted"
        return (f"d = {self.d}: Phi_d(2) ~ 2^{self.bits} unfactored "
                f"({self.factored_bits} bits of certified factors)")


def assemble_factored_part(N: int, certified, *, default_provenance=Provenance.RESIDUAL_PRIME_CERTIFIED
                           ) -> Decomposition:
    """Build F from certified primes of N - 1 (witnesses left unset).

    ``certified`` holds ints or factoring.PrimeFactor objects; bare ints get a
    fresh primality proof.  Each q enters at its full valuation in N - 1.
    """
    if N < 3 or N % 2 == 0:
        raise ValueError(f"N must be odd and >= 3, got {N}")
    seen: dict[int, DecompositionEntry] = {}
    for item in certified:
        if isinstance(item, int):
            q, proof = item, certify.prove_prime(item)
            prov = Provenance.ALGEBRAIC if q == 2 else default_provenance
        else:
            q, proof, prov = item.prime, item.proof, item.provenance
        if q in seen:
            continue
        if proof is None:
            raise ValueError(f"{q} has no primality proof")
        if (N - 1) % q:
            raise ValueError(f"{q} does not divide N - 1")
        seen[q] = DecompositionEntry(q, valuation(N - 1, q), None, prov, proof)
    entries = tuple(seen[q] for q in sorted(seen))
    F = prod(x.q ** x.e for x in entries)
    R = (N - 1) // F
    if gcd(F, R) != 1:  # full valuations make this impossible
        raise InternalError("gcd(F, R) != 1")
    form = classify_form(N, F)
    return Decomposition(N, F, R, entries, margin_bits(N, F), form)


def attach_witnesses(dec: Decomposition) -> Decomposition:
    """Find a_q for every q | F and, for the cube form, the discriminant record."""
    N = dec.N
    entries = []
    for x in dec.entries:
        try:
            a = find_witness(N, x.q)
        except FactorFound as exc:
            raise CompositeDetected(N, kind="factor", factor=exc.factor) from None
        entries.append(replace(x, witness=a))
    rec = None
    if dec.form is Form.CUBE:
        rec = discriminant_check(N, dec.F, dec.R)
        if not rec.accepts:
            raise CompositeDetected(N, kind="discriminant")
    return replace(dec, entries=tuple(entries), discriminant=rec)


def fermat_screen(N: int, bases=SCREEN_BASES) -> None:
    """Raise CompositeDetected on the first base a with a^(N-1) != 1 (mod N)."""
    for a in bases:
        if a % N and mod_pow(a, N - 1, N) != 1:
            raise CompositeDetected(N, witness=a, kind="fermat")


def _factor_terms(ds, budget, sources, threads, timings):
    def work(d):
        t = time.perf_counter()
        fz = factor_fully(phi_at_2(d), d, budget, sources)
        if timings is not None:
            timings[f"factor d = {d}"] = time.perf_counter() - t
        return fz
    if threads > 1 and len(ds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(work, ds))
    return [work(d) for d in ds]


def _status(d: int, fz: Factorization | None) -> DivisorStatus:
    if fz is None:
        return DivisorStatus(d, euler_phi(d), 0, False, skipped=True)
    got = prod(f.prime ** f.exponent for f in fz.factors)
    return DivisorStatus(d, fz.n.bit_length(), got.bit_length() - 1 if got > 1 else 0, fz.complete)


def prove_wagstaff(p: int, sources: SourceSet | None = None, budget: BudgetSpec | None = None,
                   *, skip_divisors=(), threads: int = 1,
                   timings: dict[str, float] | None = None) -> BlsCertificate:
    """Prove W_p prime; returns a sealed certificate.

    Raises CompositeDetected for composite W_p and InsufficientFactoredPart
    (with a list of DivisorStatus as ``report``) when F^3 <= N.  Wall times
    per phase are written into ``timings`` when given.
    """
    t0 = time.perf_counter()
    n_minus_one, _ = wagstaff_n_minus_one(p)
    N = wagstaff(p)
    fermat_screen(N)
    skip = set(skip_divisors)
    ds = [d for d in divisors(p - 1) if d > 2]
    work = [d for d in ds if d not in skip]
    results = dict(zip(work, _factor_terms(work, budget, sources, threads, timings)))

    records, certified, report = [], [2], []
    for d in ds:
        fz = results.get(d)
        report.append(_status(d, fz))
        if fz is None:
            records.append(CyclotomicRecord(d, phi_at_2(d), (), phi_at_2(d)))
            continue
        records.append(CyclotomicRecord(
            d, fz.n, tuple((f.prime, f.exponent, f.provenance) for f in fz.factors), fz.residual))
        if fz.complete:
            certified.extend(fz.factors)
    if 2 * prod(r.value for r in records) != n_minus_one:
        raise InternalError(f"cyclotomic terms do not multiply to N - 1 for p = {p}")

    try:
        dec = assemble_factored_part(N, certified)
    except InsufficientFactoredPart as exc:
        blocking = [s for s in report if not s.complete]
        lines = "; ".join(s.describe() for s in blocking)
        raise InsufficientFactoredPart(
            f"W_{p}: F^3 <= N, about {exc.missing_bits} more bits of F needed; {lines}",
            missing_bits=exc.missing_bits, report=report) from None
    t = time.perf_counter()
    dec = attach_witnesses(dec)
    if timings is not None:
        timings["witnesses"] = time.perf_counter() - t

    t = time.perf_counter()
    eps, delta, w = chua_power(CHUA_BASE, N)
    holds = w.x == delta % N and w.y == 0
    if not holds:
        raise InternalError(f"Condition (II) fails for the proven prime W_{p}; "
                            "quadratic-ring arithmetic is inconsistent")
    if timings is not None:
        timings["condition II"] = time.perf_counter() - t
        timings["total"] = time.perf_counter() - t0
    cert = BlsCertificate(
        exponent=p, n_digits=digits10(N), cyclotomic=tuple(records), entries=dec.entries,
        R=dec.R, form=dec.form, discriminant=dec.discriminant, margin_bits=dec.margin,
        chua=ChuaRecord(CHUA_BASE, eps, delta, holds))
    return cert.sealed()


# -- feasibility scan --------------------------------------------------------

@dataclass
class ScanRow:
    p: int
    p_minus_one: dict[int, int]
    tau: int
    digits: int
    statuses: list[DivisorStatus] = field(default_factory=list)
    factored_bits: int = 0
    primes_in_F: int = 0
    feasible: bool = False
    blocking_d: int | None = None
    reference: str = ""

    @property
    def factorization(self) -> str:
        return format_factorization(self.p_minus_one)

    @property
    def verdict(self) -> str:
        if self.feasible:
            return "feasible"
        return f"blocking d = {self.blocking_d}"


def feasibility_scan(p_list, sources: SourceSet | None = None, budget: BudgetSpec | None = None,
                     *, max_bits: int = 128) -> list[ScanRow]:
    """Per exponent: factor p - 1 and report which Phi_d(2) are fully factored.

    Terms with phi(d) > max_bits are not attempted (unless a supplied table
    covers them) and count as unfactored.  An exponent is feasible when the
    primes from complete terms give F^3 > N.
    """
    cache: dict[int, Factorization] = {}
    rows = []
    for p in p_list:
        if p < 5 or not is_prime_trial(p):
            raise InvalidExponent(f"exponent must be a prime >= 5, got {p}")
        pm1 = factor_small(p - 1)
        N = wagstaff(p)
        row = ScanRow(p, pm1, prod(e + 1 for e in pm1.values()), digits10(N),
                      reference=reference_verdict(p))
        primes = {2}
        for d in divisors(p - 1):
            if d <= 2:
                continue
            tabled = sources is not None and sources.table is not None and d in sources.table
            if euler_phi(d) > max_bits and not tabled:
                st = DivisorStatus(d, euler_phi(d), 0, False, skipped=True)
            else:
                if d not in cache:
                    cache[d] = factor_fully(phi_at_2(d), d, budget, sources)
                st = _status(d, cache[d])
                if st.complete:
                    primes.update(cache[d].primes)
            row.statuses.append(st)
        F = prod(q ** valuation(N - 1, q) for q in primes)
        row.factored_bits = F.bit_length()
        row.primes_in_F = len(primes)
        row.feasible = F ** 3 > N
        if not row.feasible:
            row.blocking_d = next(s.d for s in row.statuses if not s.complete)
        rows.append(row)
    return rows
