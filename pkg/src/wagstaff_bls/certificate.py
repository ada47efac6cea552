"""BLS certificate value type, canonical encoding, digest and file I/O.

Certificate JSON, format_version "1".  Every integer is a decimal string
(signed where the value can be negative); booleans are JSON booleans.
Unknown or missing keys are rejected.

    {
      "format_version": "1",
      "exponent": p,
      "n_digits": decimal digits of N = (2^p + 1)/3,
      "cyclotomic": [            one record per d | p - 1 with d > 2, d ascending
        {"d", "value": Phi_d(2),
         "factors": [{"q", "e", "provenance"}, ...]   q ascending,
         "residual": unfactored part (1 when complete)}
      ],
      "decomposition": [         one entry per prime q | F, q ascending
        {"q", "e": v_q(N - 1), "witness": a_q, "provenance", "proof": <proof>}
      ],
      "R": (N - 1)/F,
      "form": "sqrt" | "cube",
      "discriminant": null | {"s", "r", "delta", "is_square"},   object iff form is cube
      "margin_bits": floor(log2 F^3) - floor(log2 N),
      "chua_check": {"a", "epsilon", "delta", "holds"},
      "digest": SHA-256 hex of the canonical bytes of everything else
    }

    <proof> := {"type": "small", "n", "method"}
             | {"type": "n-1", "n", "form", "factors": [{"q", "e", "witness", "proof"}],
                "discriminant": null | {"s", "r", "delta", "is_square"}}

Canonical bytes: UTF-8 JSON, keys sorted, separators "," and ":", no
whitespace.  Run metadata (versions, timings) is kept out of the certificate
in a sibling log file so that digests are run independent.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any

from .bigmath import from_decimal, to_decimal
from .certify import NMinusOnePocklington, PrimalityProof, ProofFactor, SmallDeterministic
from .errors import SchemaError
from .factoring.types import Provenance
from .pocklington import DiscriminantRecord, Form

__all__ = [
    "FORMAT_VERSION", "CyclotomicRecord", "DecompositionEntry", "ChuaRecord",
    "BlsCertificate", "canonical_bytes", "digest", "to_json", "from_json",
    "write_certificate", "read_certificate", "proof_to_json", "proof_from_json",
]

FORMAT_VERSION = "1"


@dataclass(frozen=True)
class CyclotomicRecord:
    d: int
    value: int
    factors: tuple[tuple[int, int, Provenance], ...]
    residual: int

    @property
    def complete(self) -> bool:
        return self.residual == 1


@dataclass(frozen=True)
class DecompositionEntry:
    q: int
    e: int
    witness: int | None
    provenance: Provenance
    proof: PrimalityProof


@dataclass(frozen=True)
class ChuaRecord:
    a: int
    epsilon: int
    delta: int
    holds: bool


@dataclass(frozen=True)
class BlsCertificate:
    exponent: int
    n_digits: int
    cyclotomic: tuple[CyclotomicRecord, ...]
    entries: tuple[DecompositionEntry, ...]
    R: int
    form: Form
    discriminant: DiscriminantRecord | None
    margin_bits: int
    chua: ChuaRecord
    digest: str = ""
    format_version: str = FORMAT_VERSION

    def sealed(self) -> BlsCertificate:
        """Copy with the digest field filled in."""
        return replace(self, digest=digest(self))


# -- encoding ----------------------------------------------------------------

def _disc_json(rec: DiscriminantRecord | None):
    if rec is None:
        return None
    return {"s": to_decimal(rec.s), "r": to_decimal(rec.r),
            "delta": to_decimal(rec.delta), "is_square": bool(rec.is_square)}


def proof_to_json(proof: PrimalityProof) -> dict:
    if isinstance(proof, SmallDeterministic):
        return {"type": "small", "n": to_decimal(proof.n), "method": proof.method}
    if isinstance(proof, NMinusOnePocklington):
        return {
            "type": "n-1",
            "n": to_decimal(proof.n),
            "form": proof.form.value,
            "factors": [{"q": to_decimal(f.q), "e": to_decimal(f.e),
                         "witness": to_decimal(f.witness), "proof": proof_to_json(f.proof)}
                        for f in proof.factors],
            "discriminant": _disc_json(proof.discriminant),
        }
    raise SchemaError(f"cannot serialize proof node {type(proof).__name__}")


def to_json(cert: BlsCertificate, *, with_digest: bool = True) -> dict:
    out: dict[str, Any] = {
        "format_version": cert.format_version,
        "exponent": to_decimal(cert.exponent),
        "n_digits": to_decimal(cert.n_digits),
        "cyclotomic": [
            {"d": to_decimal(c.d), "value": to_decimal(c.value),
             "factors": [{"q": to_decimal(q), "e": to_decimal(e), "provenance": Provenance(pv).value}
                         for q, e, pv in c.factors],
             "residual": to_decimal(c.residual)}
            for c in cert.cyclotomic
        ],
        "decomposition": [
            {"q": to_decimal(x.q), "e": to_decimal(x.e),
             "witness": None if x.witness is None else to_decimal(x.witness),
             "provenance": Provenance(x.provenance).value, "proof": proof_to_json(x.proof)}
            for x in cert.entries
        ],
        "R": to_decimal(cert.R),
        "form": Form(cert.form).value,
        "discriminant": _disc_json(cert.discriminant),
        "margin_bits": to_decimal(cert.margin_bits),
        "chua_check": {"a": to_decimal(cert.chua.a), "epsilon": to_decimal(cert.chua.epsilon),
                       "delta": to_decimal(cert.chua.delta), "holds": bool(cert.chua.holds)},
    }
    if with_digest:
        out["digest"] = cert.digest
    return out


def canonical_bytes(view: Any) -> bytes:
    """Sorted-key, whitespace-free UTF-8 JSON.  Accepts a certificate or a JSON view."""
    if isinstance(view, BlsCertificate):
        view = to_json(view, with_digest=False)
    _check_serializable(view, "$")
    return json.dumps(view, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False, allow_nan=False).encode("utf-8")


def _check_serializable(v: Any, path: str) -> None:
    if v is None or isinstance(v, (str, bool)):
        return
    if isinstance(v, dict):
        for k, x in v.items():
            if not isinstance(k, str):
                raise SchemaError(f"non-string key {k!r}", path)
            _check_serializable(x, f"{path}.{k}")
        return
    if isinstance(v, list):
        for i, x in enumerate(v):
            _check_serializable(x, f"{path}[{i}]")
        return
    # raw numbers are not allowed: every integer travels as a decimal string
    raise SchemaError(f"unsupported value of type {type(v).__name__}", path)


def digest(cert: BlsCertificate | dict) -> str:
    """SHA-256 hex of the canonical bytes with the digest field omitted."""
    if isinstance(cert, BlsCertificate):
        view = to_json(cert, with_digest=False)
    else:
        view = {k: v for k, v in cert.items() if k != "digest"}
    return hashlib.sha256(canonical_bytes(view)).hexdigest()


def write_certificate(cert: BlsCertificate, path) -> None:
    text = json.dumps(to_json(cert), sort_keys=True, indent=1, ensure_ascii=False)
    Path(path).write_text(text + "\n", encoding="utf-8")


def read_certificate(path) -> BlsCertificate:
    """Load and schema-check a certificate (no semantic verification)."""
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise SchemaError(f"cannot read certificate: {exc}") from None
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    return from_json(data)


# -- decoding with strict schema ----------------------------------------------

_TOP = {"format_version", "exponent", "n_digits", "cyclotomic", "decomposition", "R",
        "form", "discriminant", "margin_bits", "chua_check", "digest"}


def _obj(v: Any, keys: set[str], path: str) -> dict:
    if not isinstance(v, dict):
        raise SchemaError("expected an object", path)
    extra = set(v) - keys
    if extra:
        raise SchemaError(f"unknown field(s) {sorted(extra)}", path)
    missing = keys - set(v)
    if missing:
        raise SchemaError(f"missing field(s) {sorted(missing)}", path)
    return v


def _list(v: Any, path: str) -> list:
    if not isinstance(v, list):
        raise SchemaError("expected an array", path)
    return v


def _int(v: Any, path: str, *, lo: int | None = 0) -> int:
    if not isinstance(v, str):
        raise SchemaError("expected a decimal string", path)
    try:
        x = from_decimal(v)
    except ValueError as exc:
        raise SchemaError(str(exc), path) from None
    if lo is not None and x < lo:
        raise SchemaError(f"value below {lo}", path)
    return x


def _bool(v: Any, path: str) -> bool:
    if not isinstance(v, bool):
        raise SchemaError("expected a boolean", path)
    return v


def _enum(cls, v: Any, path: str):
    try:
        return cls(v)
    except ValueError:
        raise SchemaError(f"unknown {cls.__name__} {v!r}", path) from None


def _disc(v: Any, path: str) -> DiscriminantRecord:
    o = _obj(v, {"s", "r", "delta", "is_square"}, path)
    return DiscriminantRecord(s=_int(o["s"], path + ".s"), r=_int(o["r"], path + ".r"),
                              delta=_int(o["delta"], path + ".delta", lo=None),
                              is_square=_bool(o["is_square"], path + ".is_square"))


def _form_disc(o: dict, path: str) -> tuple[Form, DiscriminantRecord | None]:
    form = _enum(Form, o["form"], path + ".form")
    if form is Form.CUBE:
        if o["discriminant"] is None:
            raise SchemaError("cube form requires a discriminant", path + ".discriminant")
        return form, _disc(o["discriminant"], path + ".discriminant")
    if o["discriminant"] is not None:
        raise SchemaError("square-root form must not carry a discriminant", path + ".discriminant")
    return form, None


def proof_from_json(v: Any, path: str = "$") -> PrimalityProof:
    if not isinstance(v, dict) or "type" not in v:
        raise SchemaError("expected a proof object with a type", path)
    if v["type"] == "small":
        o = _obj(v, {"type", "n", "method"}, path)
        if not isinstance(o["method"], str):
            raise SchemaError("expected a string", path + ".method")
        return SmallDeterministic(_int(o["n"], path + ".n"), o["method"])
    if v["type"] == "n-1":
        o = _obj(v, {"type", "n", "form", "factors", "discriminant"}, path)
        form, disc = _form_disc(o, path)
        factors = []
        for i, f in enumerate(_list(o["factors"], path + ".factors")):
            fp = f"{path}.factors[{i}]"
            fo = _obj(f, {"q", "e", "witness", "proof"}, fp)
            factors.append(ProofFactor(_int(fo["q"], fp + ".q"), _int(fo["e"], fp + ".e"),
                                       _int(fo["witness"], fp + ".witness"),
                                       proof_from_json(fo["proof"], fp + ".proof")))
        return NMinusOnePocklington(_int(o["n"], path + ".n"), tuple(factors), form, disc)
    raise SchemaError(f"unknown proof type {v['type']!r}", path + ".type")


def from_json(data: Any) -> BlsCertificate:
    o = _obj(data, _TOP, "$")
    if o["format_version"] != FORMAT_VERSION:
        raise SchemaError(f"unsupported format_version {o['format_version']!r}", "$.format_version")
    cyc = []
    for i, c in enumerate(_list(o["cyclotomic"], "$.cyclotomic")):
        cp = f"$.cyclotomic[{i}]"
        co = _obj(c, {"d", "value", "factors", "residual"}, cp)
        fs = []
        for j, f in enumerate(_list(co["factors"], cp + ".factors")):
            fp = f"{cp}.factors[{j}]"
            fo = _obj(f, {"q", "e", "provenance"}, fp)
            fs.append((_int(fo["q"], fp + ".q"), _int(fo["e"], fp + ".e"),
                       _enum(Provenance, fo["provenance"], fp + ".provenance")))
        cyc.append(CyclotomicRecord(_int(co["d"], cp + ".d"), _int(co["value"], cp + ".value"),
                                    tuple(fs), _int(co["residual"], cp + ".residual")))
    entries = []
    for i, x in enumerate(_list(o["decomposition"], "$.decomposition")):
        xp = f"$.decomposition[{i}]"
        xo = _obj(x, {"q", "e", "witness", "provenance", "proof"}, xp)
        entries.append(DecompositionEntry(
            _int(xo["q"], xp + ".q"), _int(xo["e"], xp + ".e"),
            _int(xo["witness"], xp + ".witness"),
            _enum(Provenance, xo["provenance"], xp + ".provenance"),
            proof_from_json(xo["proof"], xp + ".proof")))
    form, disc = _form_disc(o, "$")
    co = _obj(o["chua_check"], {"a", "epsilon", "delta", "holds"}, "$.chua_check")
    chua = ChuaRecord(_int(co["a"], "$.chua_check.a"),
                      _int(co["epsilon"], "$.chua_check.epsilon", lo=None),
                      _int(co["delta"], "$.chua_check.delta", lo=None),
                      _bool(co["holds"], "$.chua_check.holds"))
    dg = o["digest"]
    if not isinstance(dg, str):
        raise SchemaError("expected a hex string", "$.digest")
    return BlsCertificate(
        exponent=_int(o["exponent"], "$.exponent"), n_digits=_int(o["n_digits"], "$.n_digits"),
        cyclotomic=tuple(cyc), entries=tuple(entries), R=_int(o["R"], "$.R"), form=form,
        discriminant=disc, margin_bits=_int(o["margin_bits"], "$.margin_bits", lo=None),
        chua=chua, digest=dg, format_version=o["format_version"])
