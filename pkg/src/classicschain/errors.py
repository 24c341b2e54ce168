"""Engine error hierarchy.

Every expected failure carries a stable string code (the codes appear in
API responses and test assertions). Unexpected conditions raise plain
exceptions and are bugs.
"""

from __future__ import annotations


class EngineError(Exception):
    """Base for all expected engine failures."""

    def __init__(self, code: str, message: str = ""):
        super().__init__(f"{code}: {message}" if message else code)
        self.code = code
        self.message = message


class ContractError(EngineError):
    """Rejected by the contract layer (auth, validation, unknown asset)."""


class LedgerError(EngineError):
    """Ordering or commit-time failure (MVCC conflict, no quorum)."""


class IdentityError(EngineError):
    """Enrollment, certificate or key failure."""


class MediaError(EngineError):
    """Media store failure."""


# Contract-layer codes
AUTH_DENIED = "AUTH_DENIED"
UNKNOWN_VIN = "UNKNOWN_VIN"
UNKNOWN_USER = "UNKNOWN_USER"
VIN_EXISTS = "VIN_EXISTS"
BAD_VIN = "BAD_VIN"
BAD_EVIDENCE = "BAD_EVIDENCE"
NO_SUCH_GRANT = "NO_SUCH_GRANT"
SELF_TRANSFER = "SELF_TRANSFER"
GRANTEE_IS_OWNER = "GRANTEE_IS_OWNER"
DUPLICATE_STEP = "DUPLICATE_STEP"
NO_SUCH_REF = "NO_SUCH_REF"
BAD_REQUEST = "BAD_REQUEST"

# Ledger codes
UNKNOWN_FUNCTION = "UNKNOWN_FUNCTION"
MVCC_CONFLICT = "MVCC_CONFLICT"
ORDERING_UNAVAILABLE = "ORDERING_UNAVAILABLE"
NO_LEADER = "NO_LEADER"

# Identity codes
DUPLICATE_USER = "DUPLICATE_USER"
ROLE_ORG_MISMATCH = "ROLE_ORG_MISMATCH"
MALFORMED_CERT = "MALFORMED_CERT"
UNKNOWN_KEY = "UNKNOWN_KEY"

# Media codes
TOO_LARGE = "TOO_LARGE"
NOT_FOUND = "NOT_FOUND"
INTEGRITY_FAILURE = "INTEGRITY_FAILURE"
IO_FAILURE = "IO_FAILURE"
