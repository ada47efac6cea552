"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class WagstaffError(Exception):
    """Base class for every error raised by this package."""


class InvalidModulus(WagstaffError, ValueError):
    pass


class UndefinedValuation(WagstaffError, ValueError):
    pass


class InvalidExponent(WagstaffError, ValueError):
    pass


class RingMismatch(WagstaffError, ValueError):
    pass


class NotCoprime(WagstaffError, ValueError):
    """gcd(a^2 - 1, Q) > 1.  ``factor`` holds the gcd when it is a proper divisor of Q."""

    def __init__(self, message: str, factor: int | None = None):
        super().__init__(message)
        self.factor = factor


class InternalError(WagstaffError, RuntimeError):
    """An arithmetic consistency check failed; indicates a bug, not bad input."""


class NoFactorFound(WagstaffError):
    pass


class TableFormatError(WagstaffError, ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class CompositeDetected(WagstaffError):
    """``n`` is provably composite.

    ``witness`` is the base that disproved primality; ``kind`` says how
    ("fermat", "strong", "factor").
    """

    def __init__(self, n: int, witness: int | None = None, kind: str = "fermat",
                 factor: int | None = None):
        msg = f"composite: {kind} witness {witness}" if witness is not None else f"composite ({kind})"
        if factor is not None:
            msg += f", factor {factor}"
        super().__init__(msg)
        self.n = n
        self.witness = witness
        self.kind = kind
        self.factor = factor


class FactorFound(WagstaffError):
    def __init__(self, n: int, factor: int):
        super().__init__(f"nontrivial factor {factor}")
        self.n = n
        self.factor = factor


class CertificationIncomplete(WagstaffError):
    """n - 1 could not be factored far enough within the budget."""


class WitnessSearchExhausted(WagstaffError):
    pass


class NotApplicable(WagstaffError):
    pass


class InsufficientFactoredPart(WagstaffError):
    """F^3 <= N.  ``report`` carries per-divisor detail when available."""

    def __init__(self, message: str, missing_bits: int = 0, report: object = None):
        super().__init__(message)
        self.missing_bits = missing_bits
        self.report = report


class SchemaError(WagstaffError, ValueError):
    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path


class DbUnavailable(WagstaffError):
    pass


class DbParseError(DbUnavailable):
    pass
