from .engine import LedgerEngine, LedgerConfig, SimulatedTx
from .blockfile import BlockFile, verify_chain, VerifyResult
from .types import Version, FLAG_VALID, FLAG_MVCC_CONFLICT, FLAG_BAD_SIGNATURE, FLAG_ENDORSEMENT_FAIL

__all__ = [
    "BlockFile",
    "FLAG_BAD_SIGNATURE",
    "FLAG_ENDORSEMENT_FAIL",
    "FLAG_MVCC_CONFLICT",
    "FLAG_VALID",
    "LedgerConfig",
    "LedgerEngine",
    "SimulatedTx",
    "VerifyResult",
    "Version",
    "verify_chain",
]
