"""BLS N - 1 primality certificates for Wagstaff numbers W_p = (2^p + 1)/3."""

__version__ = "0.1.0"

# factoring before certify: the pipeline calls back into the certifier
from . import factoring  # noqa: E402,F401
from .bls import feasibility_scan, prove_wagstaff  # noqa: E402
from .certificate import BlsCertificate, digest, read_certificate, write_certificate  # noqa: E402
from .certify import prove_prime, verify_proof  # noqa: E402
from .verifier import verify_certificate  # noqa: E402

__all__ = [
    "BlsCertificate", "digest", "feasibility_scan", "prove_prime", "prove_wagstaff",
    "read_certificate", "verify_certificate", "verify_proof", "write_certificate",
]
