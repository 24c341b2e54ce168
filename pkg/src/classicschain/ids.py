"""Lexicographically sortable unique ids (ULID layout).

26 Crockford base32 chars: 48-bit millisecond timestamp + 80 random bits.
Ids generated later sort strictly after earlier ones (same-millisecond
ties broken by the random tail).
"""

from __future__ import annotations

import os
import time

_ALPHABET = "0123456789ABCDEFGHJKMNPQRSTVWXYZ"


def _b32(value: int, length: int) -> str:
    out = []
    for _ in range(length):
        out.append(_ALPHABET[value & 0x1F])
        value >>= 5
    return "".join(reversed(out))


def new_id(now_ms: int | None = None) -> str:
    ts = int(time.time() * 1000) if now_ms is None else now_ms
    rand = int.from_bytes(os.urandom(10), "big")
    return _b32(ts & ((1 << 48) - 1), 10) + _b32(rand, 16)
