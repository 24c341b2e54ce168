"""On-ledger asset records and their validation.

Three record kinds live in world state, all as canonical JSON:

- ``classic:<vin>``        the vehicle record (primary key: VIN)
- ``step:<vin>:<stepId>``  one restoration task
- ``access:<vin>``         the grant table for the vehicle

Separate keys keep concurrent work on different vehicles conflict-free.
"""

from __future__ import annotations

import re

from ..codec import canonical_bytes, decode_canonical
from ..errors import BAD_EVIDENCE, BAD_VIN, ContractError

# VIN: 5-17 uppercase alphanumerics, I/O/Q excluded.
_VIN_RE = re.compile(r"^[A-HJ-NPR-Z0-9]{5,17}$")

ACTIVITY_TYPES = (
    "bodywork", "paint", "mechanical", "upholstery", "electrical", "inspection", "other",
)

ACCESS_LEVELS = {"read": 1, "write": 2, "certify": 3}

CID_RE = re.compile(r"^sha2-256:[0-9a-f]{64}$")


def classic_key(vin: str) -> str:
    return f"classic:{vin}"


def step_key(vin: str, step_id: str) -> str:
    return f"step:{vin}:{step_id}"


def access_key(vin: str) -> str:
    return f"access:{vin}"


def validate_vin(vin: str) -> str:
    if not isinstance(vin, str) or not _VIN_RE.match(vin):
        raise ContractError(BAD_VIN, f"invalid VIN {vin!r}")
    return vin


def new_classic(vin: str, registration_number: str, make: str, model: str,
                year: int, owner_user_id: str) -> dict:
    return {
        "certified": False,
        "certifiedAt": None,
        "certifierUserId": None,
        "documents": [],
        "make": make,
        "model": model,
        "ownerUserId": owner_user_id,
        "registrationNumber": registration_number,
        "stepIds": [],
        "vin": vin,
        "year": year,
    }


def new_access(vin: str) -> dict:
    return {"entries": [], "vin": vin}


def validate_media_ref(ref: dict) -> dict:
    """Shared shape of DocumentRef and EvidenceRef."""
    try:
        cid = ref["cid"]
        filename = ref["filename"]
        media_type = ref["mediaType"]
        size = ref["sizeBytes"]
        anchor_state = ref.get("anchorState", "pending")
    except (KeyError, TypeError) as exc:
        raise ContractError(BAD_EVIDENCE, f"missing field: {exc}") from exc
    if not isinstance(cid, str) or not CID_RE.match(cid):
        raise ContractError(BAD_EVIDENCE, f"malformed cid {cid!r}")
    if anchor_state not in ("pending", "anchored"):
        raise ContractError(BAD_EVIDENCE, f"bad anchorState {anchor_state!r}")
    if not isinstance(size, int) or size < 0:
        raise ContractError(BAD_EVIDENCE, "sizeBytes must be a non-negative integer")
    return {
        "anchorState": anchor_state,
        "cid": cid,
        "filename": str(filename),
        "mediaType": str(media_type),
        "sizeBytes": size,
    }


def encode(record: dict) -> bytes:
    return canonical_bytes(record)


def decode(data: bytes) -> dict:
    return decode_canonical(data)


def access_level_of(access: dict, user_id: str) -> int:
    """0 when not granted; otherwise the rank in read < write < certify."""
    for entry in access["entries"]:
        if entry["granteeUserId"] == user_id:
            return ACCESS_LEVELS[entry["level"]]
    return 0
