"""Independent replay of a BLS certificate.

Every claim is treated as untrusted.  The verifier does no factoring and no
witness search; it only recomputes and compares.  Beyond primitive arithmetic
it relies on the prover side for one thing, the replay of embedded primality
proofs (``certify.proof_failure``).

Steps, in order:
 1. exponent      recompute N = (2^p + 1)/3, its digit count and every Phi_d(2)
 2. primality     replay the primality proof of each q
 3. valuations    recompute e = v_q(N - 1) and compare
 4. factored part rebuild F from the recomputed e; F R = N - 1, gcd(F, R) = 1
 5. threshold     exact comparison for the claimed form; recompute M
 6. witnesses     a^(N-1) == 1 and gcd(a^((N-1)/q) - 1, N) == 1 for each q
 7. discriminant  recompute s, r, delta and the square test (cube form)
 8. condition II  omega_3^((N+1)/2) == -1 in Z[sqrt 2]/(N)
 9. digest        SHA-256 of the canonical bytes
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass, field
from math import prod

from .bigmath import digits10, exact_sqrt, gcd, is_prime_trial, jacobi, mod_pow, valuation
from .certificate import BlsCertificate, read_certificate, to_json
from .certify import proof_failure
from .errors import SchemaError
from .pocklington import Form
from .quad_ring import QuadResidue, quad_pow

__all__ = ["StepResult", "VerificationReport", "verify_certificate", "verify_file", "main",
           "STEP_NAMES", "EXIT_PASS", "EXIT_FAIL", "EXIT_SCHEMA"]

EXIT_PASS, EXIT_FAIL, EXIT_SCHEMA = 0, 1, 2

STEP_NAMES = ("exponent", "primality", "valuations", "factored part", "threshold",
              "witnesses", "discriminant", "condition II", "digest")


@dataclass
class StepResult:
    number: int
    name: str
    passed: bool
    reason: str = ""
    seconds: float = 0.0


@dataclass
class VerificationReport:
    exponent: int
    steps: list[StepResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return len(self.steps) == len(STEP_NAMES) and all(s.passed for s in self.steps)

    @property
    def failed_steps(self) -> list[int]:
        return [s.number for s in self.steps if not s.passed]

    def to_text(self) -> str:
        lines = [f"certificate for W_{self.exponent}"]
        for s in self.steps:
            mark = "ok  " if s.passed else "FAIL"
            tail = f"  {s.reason}" if s.reason else ""
            lines.append(f"  [{mark}] step {s.number} {s.name:<13} {s.seconds:8.3f}s{tail}")
        lines.append("VERIFIED" if self.passed else "REJECTED")
        return "\n".join(lines)


class _Fail(Exception):
    pass


def _need(cond: bool, reason: str) -> None:
    if not cond:
        raise _Fail(reason)


# -- small independent helpers -------------------------------------------------

def _factor_small(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    f = 2
    while f * f <= n:
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        f += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _divisors(n: int) -> list[int]:
    ds = [1]
    for q, e in _factor_small(n).items():
        ds = [d * q ** k for d in ds for k in range(e + 1)]
    return sorted(ds)


def _phi2(d: int) -> int:
    """Phi_d(2) via the Moebius product over k | d of (2^k - 1)^mu(d/k)."""
    num = den = 1
    for k in _divisors(d):
        f = _factor_small(d // k)
        if any(e > 1 for e in f.values()):
            continue
        if len(f) % 2:
            den *= (1 << k) - 1
        else:
            num *= (1 << k) - 1
    q, r = divmod(num, den)
    if r:
        raise ArithmeticError(f"inexact cyclotomic quotient for d = {d}")
    return q


# -- the steps -----------------------------------------------------------------

class _Ctx:
    def __init__(self, cert: BlsCertificate):
        self.cert = cert
        self.N: int | None = None
        self.e: dict[int, int] = {}
        self.F: int | None = None


def _step_exponent(c: _Ctx) -> str:
    cert = c.cert
    p = cert.exponent
    _need(p >= 5 and is_prime_trial(p), f"exponent {p} is not a prime >= 5")
    N, r = divmod((1 << p) + 1, 3)
    _need(r == 0, "2^p + 1 not divisible by 3")
    c.N = N
    _need(digits10(N) == cert.n_digits, f"n_digits {cert.n_digits} != {digits10(N)}")
    want = [d for d in _divisors(p - 1) if d > 2]
    got = [rec.d for rec in cert.cyclotomic]
    _need(got == want, "cyclotomic records do not list the divisors d > 2 of p - 1 in order")
    for rec in cert.cyclotomic:
        _need(rec.value == _phi2(rec.d), f"wrong Phi_d(2) value for d = {rec.d}")
        _need(rec.residual >= 1, f"bad residual for d = {rec.d}")
        _need(prod(q ** e for q, e, _ in rec.factors) * rec.residual == rec.value,
              f"factor list for d = {rec.d} does not multiply to Phi_d(2)")
    _need(2 * prod(rec.value for rec in cert.cyclotomic) == N - 1,
          "2 * prod Phi_d(2) != N - 1")
    return ""


def _step_primality(c: _Ctx) -> str:
    seen = set()
    for x in c.cert.entries:
        _need(x.q not in seen, f"prime {x.q} listed twice")
        seen.add(x.q)
        why = proof_failure(x.q, x.proof)
        _need(why is None, f"q = {x.q}: {why}")
    _need(bool(seen), "no primes in F")
    return f"{len(seen)} proofs replayed"


def _step_valuations(c: _Ctx) -> str:
    N = c.N
    _need(N is not None, "N unavailable")
    bad = []
    for x in c.cert.entries:
        _need(x.q >= 2, f"q = {x.q} out of range")
        e = valuation(N - 1, x.q)
        c.e[x.q] = e
        if e != x.e:
            bad.append(f"q = {x.q}: stored e = {x.e}, v_q(N - 1) = {e}")
    _need(not bad, "; ".join(bad))
    return ""


def _step_factored_part(c: _Ctx) -> str:
    N = c.N
    _need(N is not None and bool(c.e), "N or valuations unavailable")
    _need(all(e >= 1 for e in c.e.values()), "a listed q does not divide N - 1")
    F = prod(q ** e for q, e in c.e.items())
    c.F = F
    _need(F * c.cert.R == N - 1, "F * R != N - 1")
    _need(gcd(F, c.cert.R) == 1, "gcd(F, R) != 1")
    return f"F has {F.bit_length()} bits"


def _step_threshold(c: _Ctx) -> str:
    N, F = c.N, c.F
    _need(F is not None, "F unavailable")
    form = c.cert.form
    if form is Form.SQRT:
        _need(F * F > N, "F^2 <= N for the square-root form")
    else:
        _need(F ** 3 > N, "F^3 <= N for the cube form")
        _need(F * F <= N, "cube form claimed although F^2 > N")
        _need(F % 2 == 0, "cube form needs an even F")
    M = (F ** 3).bit_length() - N.bit_length()
    _need(M == c.cert.margin_bits, f"margin {c.cert.margin_bits} != {M}")
    if M >= 1:
        _need(F ** 3 > N, "M >= 1 but F^3 <= N")
    return f"M = {M}"


def _step_witnesses(c: _Ctx) -> str:
    N = c.N
    _need(N is not None, "N unavailable")
    for x in c.cert.entries:
        a = x.witness
        _need(a is not None and a % N != 0, f"q = {x.q}: witness {a} is 0 mod N")
        _need(mod_pow(a, N - 1, N) == 1, f"q = {x.q}: a = {a} fails a^(N-1) == 1")
        _need((N - 1) % x.q == 0, f"q = {x.q} does not divide N - 1")
        g = gcd(mod_pow(a, (N - 1) // x.q, N) - 1, N)
        _need(g == 1, f"q = {x.q}: gcd(a^((N-1)/q) - 1, N) = {g}")
    return ""


def _step_discriminant(c: _Ctx) -> str:
    N, F = c.N, c.F
    rec = c.cert.discriminant
    if c.cert.form is Form.SQRT:
        _need(rec is None, "square-root form carries a discriminant")
        return "not applicable"
    _need(rec is not None, "cube form without a discriminant")
    _need(F is not None and F > 0, "F unavailable")
    R = (N - 1) // F
    s, r = divmod(R, 2 * F)
    delta = r * r - 8 * s
    square = exact_sqrt(delta) is not None
    _need((rec.s, rec.r, rec.delta) == (s, r, delta), "stored (s, r, delta) does not match (N - 1)/F")
    _need(rec.is_square == square, "stored square flag is wrong")
    _need(s == 0 or not square, "r^2 - 8s is a perfect square")
    return ""


def _step_condition_two(c: _Ctx) -> str:
    N = c.N
    ch = c.cert.chua
    _need(ch.a == 3, f"condition II uses a = 3, certificate has a = {ch.a}")
    eps, delta = jacobi(8, N), jacobi(8, N)  # (a^2 - 1) = 2(a + 1) = 8 for a = 3
    w = quad_pow(QuadResidue.of(3, 2, 2, N), (N - eps) // 2)
    holds = w.x == delta % N and w.y == 0
    _need((ch.epsilon, ch.delta, ch.holds) == (eps, delta, holds),
          f"stored ({ch.epsilon}, {ch.delta}, {ch.holds}) != recomputed ({eps}, {delta}, {holds})")
    _need(holds, "omega_3^((N - eps)/2) != delta")
    return ""


def _step_digest(c: _Ctx) -> str:
    view = to_json(c.cert, with_digest=False)
    raw = json.dumps(view, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode()
    dg = hashlib.sha256(raw).hexdigest()
    _need(dg == c.cert.digest, f"digest mismatch: stored {c.cert.digest[:16]}..., computed {dg[:16]}...")
    return dg


_STEPS = (_step_exponent, _step_primality, _step_valuations, _step_factored_part,
          _step_threshold, _step_witnesses, _step_discriminant, _step_condition_two,
          _step_digest)


def verify_certificate(cert: BlsCertificate) -> VerificationReport:
    """Run all nine steps; never raises on bad data."""
    ctx = _Ctx(cert)
    report = VerificationReport(cert.exponent)
    for i, (fn, name) in enumerate(zip(_STEPS, STEP_NAMES), start=1):
        t = time.perf_counter()
        try:
            note, ok = fn(ctx), True
        except _Fail as exc:
            note, ok = str(exc), False
        except Exception as exc:  # malformed data must produce a report, not a crash
            note, ok = f"{type(exc).__name__}: {exc}", False
        report.steps.append(StepResult(i, name, ok, note, time.perf_counter() - t))
    return report


def verify_file(path) -> tuple[int, str]:
    """(exit code, text) for the certificate at ``path``."""
    try:
        cert = read_certificate(path)
    except SchemaError as exc:
        return EXIT_SCHEMA, f"schema error: {exc}"
    rep = verify_certificate(cert)
    return (EXIT_PASS if rep.passed else EXIT_FAIL), rep.to_text()


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="wagstaff-verify",
                                 description="Replay a Wagstaff BLS certificate.")
    ap.add_argument("certificate")
    args = ap.parse_args(argv)
    code, text = verify_file(args.certificate)
    print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
