"""
Verifier drivers
"""

from tlapsgen.verifiers.mock import MockVerifier
from tlapsgen.verifiers.tlaps import TLAPSVerifier

__all__ = ['verifiers']

verifiers = {
    "tlaps": TLAPSVerifier,
    "mock": MockVerifier
}
