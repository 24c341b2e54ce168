"""Canonical byte encoding and digests.

Every hash and signature in the engine is computed over the canonical
encoding produced here, so the format is frozen:

- UTF-8 JSON, object keys sorted by code point, separators "," and ":"
  with no whitespace, non-ASCII emitted raw (ensure_ascii=False).
- Value domain: dict (str keys), list, str, int, bool, None. Floats and
  raw bytes are rejected; byte-valued fields are lowercase-hex strings
  by schema convention.

Identical values encode to identical bytes on every platform.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any

ZERO_DIGEST = "0" * 64


class CodecError(ValueError):
    """Value outside the canonical-encodable domain."""


def _check(value: Any, path: str) -> None:
    if value is None or isinstance(value, (str, bool)):
        return
    if isinstance(value, int):
        return
    if isinstance(value, float):
        raise CodecError(f"float at {path} is not canonically encodable")
    if isinstance(value, (bytes, bytearray)):
        raise CodecError(f"raw bytes at {path}; hex-encode by schema instead")
    if isinstance(value, list):
        for i, item in enumerate(value):
            _check(item, f"{path}[{i}]")
        return
    if isinstance(value, dict):
        for key, item in value.items():
            if not isinstance(key, str):
                raise CodecError(f"non-string key {key!r} at {path}")
            _check(item, f"{path}.{key}")
        return
    raise CodecError(f"unsupported type {type(value).__name__} at {path}")


def canonical_bytes(value: Any) -> bytes:
    """Encode *value* to its canonical byte form."""
    _check(value, "$")
    return json.dumps(
        value, sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=False
    ).encode("utf-8")


def decode_canonical(data: bytes) -> Any:
    return json.loads(data.decode("utf-8"))


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def digest(value: Any) -> str:
    """SHA-256 hex digest of the canonical encoding of *value*."""
    return sha256_hex(canonical_bytes(value))
