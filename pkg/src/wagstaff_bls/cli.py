"""Command-line front end: prove, verify, scan, chua, factor-phi, digest."""

from __future__ import annotations

import argparse
import logging
import platform
import sys
import time
from math import prod
from pathlib import Path

from . import __version__
from .bigmath import HAVE_GMPY2, digits10, from_decimal, to_decimal
from .bls import feasibility_scan, prove_wagstaff
from .certificate import digest, read_certificate, write_certificate
from .cyclotomic import divisors, phi_at_2
from .errors import (CompositeDetected, InsufficientFactoredPart, InvalidExponent,
                     InvalidModulus, NotCoprime, SchemaError, TableFormatError)
from .factordb import FactorDbClient
from .factoring import BudgetSpec, SourceSet, factor_fully, load_tables
from .known import KNOWN
from .quad_ring import chua_power, wagstaff
from .verifier import verify_file

EXIT_OK, EXIT_COMPOSITE, EXIT_INSUFFICIENT, EXIT_USAGE = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int(text: str) -> int:
    try:
        return from_decimal(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None


def _budget_flags(ap: argparse.ArgumentParser) -> None:
    d = BudgetSpec()
    g = ap.add_argument_group("factoring budget")
    g.add_argument("--trial-candidates", type=_int, default=d.trial_candidates,
                   help="progression members tried per Phi_d(2) (default %(default)s)")
    g.add_argument("--rho-iterations", type=_int, default=d.rho_iterations)
    g.add_argument("--pm1-b1", type=_int, default=d.pm1_b1)
    g.add_argument("--pm1-b2", type=_int, default=None)
    g.add_argument("--ecm-curves", type=_int, default=d.ecm_curves, help="0 disables ECM")
    g.add_argument("--ecm-b1", type=_int, default=d.ecm_b1)


def _source_flags(ap: argparse.ArgumentParser) -> None:
    g = ap.add_argument_group("factor sources")
    g.add_argument("--tables", type=Path, help="factor table file or directory of *.txt tables")
    g.add_argument("--factordb", choices=("on", "off"), default="off",
                   help="query the external factor database (default off)")
    g.add_argument("--factordb-url", help="override the database base URL")
    g.add_argument("--factordb-cache", type=Path, help="response cache directory")
    g.add_argument("--offline", action="store_true", help="serve database answers from the cache only")


def _budget(args) -> BudgetSpec:
    return BudgetSpec(trial_candidates=args.trial_candidates, rho_iterations=args.rho_iterations,
                      pm1_b1=args.pm1_b1, pm1_b2=args.pm1_b2, ecm_curves=args.ecm_curves,
                      ecm_b1=args.ecm_b1)


def _sources(args) -> SourceSet:
    table = load_tables(args.tables) if args.tables else None
    db = None
    if args.factordb == "on":
        db = FactorDbClient(args.factordb_url, args.factordb_cache, offline=args.offline)
    return SourceSet(table=table, factordb=db)


def _tau(n: int) -> int:
    return len(divisors(n))


# -- prove -------------------------------------------------------------------

def cmd_prove(args) -> int:
    p = args.p
    try:
        sources = _sources(args)
    except (OSError, TableFormatError) as exc:
        print(f"error: cannot load tables: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = args.out or Path(f"W{p}.cert.json")
    timings: dict[str, float] = {}
    t = time.perf_counter()
    try:
        cert = prove_wagstaff(p, sources, _budget(args), skip_divisors=args.skip_d,
                              threads=args.threads, timings=timings)
    except InvalidExponent as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CompositeDetected as exc:
        how = f"base {exc.witness}" if exc.witness is not None else exc.kind
        extra = f", factor {exc.factor}" if exc.factor is not None else ""
        print(f"W_{p} is composite ({exc.kind} witness: {how}{extra})")
        return EXIT_COMPOSITE
    except InsufficientFactoredPart as exc:
        print(f"W_{p}: insufficient factored part, about {exc.missing_bits} more bits needed")
        for st in exc.report or []:
            if not st.complete:
                print(f"  blocking {st.describe()}")
        return EXIT_INSUFFICIENT
    wall = time.perf_counter() - t
    try:
        write_certificate(cert, out)
        _write_log(Path(str(out) + ".log"), args, cert, timings, wall)
    except OSError as exc:
        print(f"error: cannot write certificate: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"{'p':>6} {'digits':>7} {'tau(p-1)':>9} {'primes in F':>12} {'M (bits)':>9}  wall time")
    print(f"{p:>6} {cert.n_digits:>7} {_tau(p - 1):>9} {len(cert.entries):>12} "
          f"{cert.margin_bits:>9}  {wall:.2f} s")
    print(f"form {cert.form.value}, digest {cert.digest}")
    print(f"certificate written to {out}")
    return EXIT_OK


def _write_log(path: Path, args, cert, timings: dict[str, float], wall: float) -> None:
    lines = [
        f"wagstaff-bls {__version__}",
        f"python {platform.python_version()} on {platform.platform()}",
        f"gmpy2 {'yes' if HAVE_GMPY2 else 'no'}",
        f"command: prove --p {args.p}",
        f"tables: {args.tables or '-'}",
        f"factordb: {args.factordb}",
        f"budget: {_budget(args)}",
        f"skipped d: {sorted(args.skip_d) or '-'}",
        f"exponent {cert.exponent}, {cert.n_digits} digits, form {cert.form.value}, "
        f"M = {cert.margin_bits}, {len(cert.entries)} primes in F",
        f"digest {cert.digest}",
    ]
    lines += [f"time {k}: {v:.3f} s" for k, v in timings.items()]
    lines.append(f"time wall: {wall:.3f} s")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


# -- verify / digest -----------------------------------------------------------

def cmd_verify(args) -> int:
    code, text = verify_file(args.certificate)
    print(text)
    return code


def cmd_digest(args) -> int:
    try:
        cert = read_certificate(args.certificate)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    dg = digest(cert)
    print(dg)
    if dg != cert.digest:
        print("warning: recorded digest differs", file=sys.stderr)
        return 1
    return 0


# -- scan ----------------------------------------------------------------------

def cmd_scan(args) -> int:
    ps = list(KNOWN) if args.known else args.p_list
    if not ps:
        print("error: give --known or --p-list", file=sys.stderr)
        return EXIT_USAGE
    try:
        rows = feasibility_scan(ps, _sources(args), _budget(args), max_bits=args.max_bits)
    except (InvalidExponent, OSError, TableFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"{'p':>7}  {'p-1':<24} {'tau':>4} {'digits':>6} {'F bits':>7}  {'verdict':<20} reference")
    for r in rows:
        print(f"{r.p:>7}  {r.factorization:<24} {r.tau:>4} {r.digits:>6} {r.factored_bits:>7}  "
              f"{r.verdict:<20} {r.reference}")
        if args.verbose:
            for st in r.statuses:
                print(f"           {st.describe()}")
    return EXIT_OK


# -- chua ----------------------------------------------------------------------

def cmd_chua(args) -> int:
    if args.p is not None:
        if args.p < 5:
            print("error: --p must be a prime >= 5", file=sys.stderr)
            return EXIT_USAGE
        Q, a = wagstaff(args.p), 3
    elif args.Q is not None and args.a is not None:
        Q, a = args.Q, args.a
    else:
        print("error: give --p, or both --Q and --a", file=sys.stderr)
        return EXIT_USAGE
    try:
        eps, delta, w = chua_power(a, Q)
    except NotCoprime as exc:
        extra = f" (proper factor {exc.factor})" if exc.factor else ""
        print(f"NotCoprime: {exc}{extra}")
        return 1
    except InvalidModulus as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    holds = w.x == delta % Q and w.y == 0
    print(f"Q has {digits10(Q)} digits, a = {a}")
    print(f"epsilon = {eps}, delta = {delta}, holds = {str(holds).lower()}")
    return 0 if holds else 1


# -- factor-phi ------------------------------------------------------------------

def cmd_factor_phi(args) -> int:
    d = args.d
    if d < 1:
        print("error: --d must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        sources = _sources(args)
    except (OSError, TableFormatError) as exc:
        print(f"error: cannot load tables: {exc}", file=sys.stderr)
        return EXIT_USAGE
    n = phi_at_2(d)
    fz = factor_fully(n, d, _budget(args), sources)
    print(f"Phi_{d}(2) = {to_decimal(n) if n.bit_length() < 400 else f'<{digits10(n)} digits>'}")
    print(format_factorization_line(fz))
    return 0 if fz.complete else EXIT_INSUFFICIENT


def format_factorization_line(fz) -> str:
    if fz.n == 1:
        return "1, empty"
    parts = [f"{f.prime}^{f.exponent}" if f.exponent > 1 else str(f.prime) for f in fz.factors]
    labels = {f.provenance.value for f in fz.factors}
    if len(labels) == 1:
        text = " · ".join(parts) + f" ({labels.pop()})"
    else:
        text = " · ".join(f"{s} ({f.provenance.value})" for s, f in zip(parts, fz.factors))
    if fz.residual > 1:
        res = f"unfactored C{digits10(fz.residual)}"
        text = f"{text} · {res}" if parts else res
    assert prod(f.prime ** f.exponent for f in fz.factors) * fz.residual == fz.n
    return text


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="wagstaff-bls", description="BLS N - 1 primality certificates for "
                                                  "Wagstaff numbers (2^p + 1)/3.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    pr = sub.add_parser("prove", help="prove W_p prime and write a certificate")
    pr.add_argument("--p", type=_int, required=True)
    pr.add_argument("--out", type=Path, help="certificate path (default W<p>.cert.json)")
    pr.add_argument("--skip-d", type=_int, nargs="*", default=[],
                    help="divisors d whose Phi_d(2) is left out of F")
    pr.add_argument("--threads", type=_int, default=1, help="worker cap for per-d factoring")
    _source_flags(pr)
    _budget_flags(pr)
    pr.set_defaults(func=cmd_prove)

    ve = sub.add_parser("verify", help="replay a certificate")
    ve.add_argument("certificate", type=Path)
    ve.set_defaults(func=cmd_verify)

    sc = sub.add_parser("scan", help="p - 1 smoothness and feasibility table")
    grp = sc.add_mutually_exclusive_group(required=True)
    grp.add_argument("--known", action="store_true", help="all known Wagstaff exponents")
    grp.add_argument("--p-list", type=_int, nargs="+")
    sc.add_argument("--max-bits", type=_int, default=128,
                    help="attempt Phi_d(2) only when phi(d) <= this (default %(default)s)")
    _source_flags(sc)
    _budget_flags(sc)
    sc.set_defaults(func=cmd_scan, trial_candidates=20_000, rho_iterations=200_000, pm1_b1=20_000)

    ch = sub.add_parser("chua", help="Chua congruence for (a, Q) or Condition (II) for W_p")
    ch.add_argument("--p", type=_int)
    ch.add_argument("--Q", type=_int)
    ch.add_argument("--a", type=_int)
    ch.set_defaults(func=cmd_chua)

    fp = sub.add_parser("factor-phi", help="factor Phi_d(2) with provenance")
    fp.add_argument("--d", type=_int, required=True)
    _source_flags(fp)
    _budget_flags(fp)
    fp.set_defaults(func=cmd_factor_phi)

    dg = sub.add_parser("digest", help="print the SHA-256 digest of a certificate")
    dg.add_argument("certificate", type=Path)
    dg.set_defaults(func=cmd_digest)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
