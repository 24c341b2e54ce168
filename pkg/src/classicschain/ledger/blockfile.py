"""Append-only block persistence and full-chain verification.

File format (documented external interface)::

    magic "CCBF1\\n"
    record*:  u32be payload_length | payload

where payload is the canonical encoding of one block. Every persisted
byte is covered by a digest or signature: transactions by dataHash; the
header fields (number, previousHash, dataHash, signerNodeId,
validationFlags, configHash) by the orderer signature and the next
block's previousHash; framing damage surfaces as a parse failure. A
record that parses but is not in canonical form is rejected outright.
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Optional

from ..codec import ZERO_DIGEST, canonical_bytes, decode_canonical
from .types import data_hash, header_digest

MAGIC = b"CCBF1\n"
_MAX_RECORD = 256 * 1024 * 1024

OK = "OK"
CORRUPT_RECORD = "CORRUPT_RECORD"
DATA_HASH_MISMATCH = "DATA_HASH_MISMATCH"
PREV_HASH_MISMATCH = "PREV_HASH_MISMATCH"
NUMBER_MISMATCH = "NUMBER_MISMATCH"
BAD_ORDERER_SIGNATURE = "BAD_ORDERER_SIGNATURE"
BAD_GENESIS = "BAD_GENESIS"
MISSING_CONFIG = "MISSING_CONFIG"
EMPTY_BLOCK = "EMPTY_BLOCK"


@dataclass
class VerifyResult:
    ok: bool
    first_bad_block: Optional[int] = None
    reason: Optional[str] = None

    def __bool__(self) -> bool:
        return self.ok


class BlockFile:
    """Append-only store; one instance owns the file handle for writes."""

    def __init__(self, path: str | os.PathLike):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        if not self.path.exists():
            with open(self.path, "wb") as fh:
                fh.write(MAGIC)
        self._fh = open(self.path, "ab")

    def append(self, block: dict) -> None:
        payload = canonical_bytes(block)
        self._fh.write(struct.pack(">I", len(payload)) + payload)
        self._fh.flush()
        os.fsync(self._fh.fileno())

    def close(self) -> None:
        self._fh.close()

    @staticmethod
    def repair_tail(path: str | os.PathLike) -> int:
        """Truncate a torn final record (power cut); returns blocks kept.

        Append-only writes mean damage from an interrupted shutdown is
        confined to a partial tail record; everything up to the last
        fully decodable block is kept.
        """
        path = Path(path)
        good_end = len(MAGIC)
        count = 0
        for index, block, ok, end_offset in _iter_raw(path):
            if not ok:
                break
            good_end = end_offset
            count += 1
        size = os.path.getsize(path)
        if size > good_end:
            with open(path, "r+b") as fh:
                fh.truncate(good_end)
        return count


def _iter_raw(path: str | os.PathLike) -> Iterator[tuple[int, Optional[dict], bool, int]]:
    with open(path, "rb") as fh:
        if fh.read(len(MAGIC)) != MAGIC:
            yield (0, None, False, 0)
            return
        index = 0
        while True:
            hdr = fh.read(4)
            if not hdr:
                return
            if len(hdr) < 4:
                yield (index, None, False, fh.tell())
                return
            (length,) = struct.unpack(">I", hdr)
            if length > _MAX_RECORD:
                yield (index, None, False, fh.tell())
                return
            payload = fh.read(length)
            if len(payload) < length:
                yield (index, None, False, fh.tell())
                return
            try:
                block = decode_canonical(payload)
                if canonical_bytes(block) != payload:
                    raise ValueError("non-canonical record")
            except Exception:
                yield (index, None, False, fh.tell())
                return
            yield (index, block, True, fh.tell())
            index += 1


def iter_records(path: str | os.PathLike) -> Iterator[tuple[int, Optional[dict], bool]]:
    """Yield (index, block|None, ok) per stored record, strictly framed."""
    for index, block, ok, _ in _iter_raw(path):
        yield (index, block, ok)


def load_chain(path: str | os.PathLike) -> list[dict]:
    """Load all blocks; raises on any framing damage (use repair_tail first)."""
    blocks = []
    for index, block, ok in iter_records(path):
        if not ok:
            raise ValueError(f"corrupt record at block {index}")
        blocks.append(block)
    return blocks


_REQUIRED_BLOCK_FIELDS = {
    "config": (dict, type(None)),
    "dataHash": (str,),
    "number": (int,),
    "ordererSignature": (str,),
    "previousHash": (str,),
    "signerNodeId": (int,),
    "transactions": (list,),
    "validationFlags": (list,),
}


def _block_shape_ok(block: dict) -> bool:
    if not isinstance(block, dict) or set(block) != set(_REQUIRED_BLOCK_FIELDS):
        return False
    return all(isinstance(block[name], kinds)
               for name, kinds in _REQUIRED_BLOCK_FIELDS.items())


_HEX_RE = None


def _strict_hex(text: str, length: int) -> bytes:
    """Lowercase-only hex: bytes.fromhex accepts uppercase, which would
    make a case flip in a signature field invisible."""
    import re

    global _HEX_RE
    if _HEX_RE is None:
        _HEX_RE = re.compile(r"^[0-9a-f]*$")
    if len(text) != length or not _HEX_RE.match(text):
        raise ValueError(f"not a {length}-char lowercase hex string")
    return bytes.fromhex(text)


def _verify_orderer_signature(block: dict, orderer_certs: dict, ca_roots: dict[str, str]) -> bool:
    from ..identity.ca import verify_with_certificate

    cert = orderer_certs.get(str(block["signerNodeId"]))
    if cert is None:
        return False
    try:
        sig = _strict_hex(block["ordererSignature"], 128)
        return verify_with_certificate(
            cert, header_digest(block).encode("ascii"), sig, ca_roots
        )
    except Exception:
        return False


def verify_chain(path: str | os.PathLike) -> VerifyResult:
    """Recompute every digest, linkage and orderer signature in the file.

    The genesis config supplies the CA roots and orderer certificates,
    so a chain file is verifiable standalone. Reports the first
    violating block; never raises on damaged input.
    """
    prev_digest = None
    orderer_certs: dict = {}
    ca_roots: dict[str, str] = {}
    saw_any = False
    try:
        iterator = iter_records(path)
        for index, block, ok in iterator:
            saw_any = True
            if not ok:
                return VerifyResult(False, index, CORRUPT_RECORD)
            if not _block_shape_ok(block):
                return VerifyResult(False, index, CORRUPT_RECORD)
            if block.get("number") != index:
                return VerifyResult(False, index, NUMBER_MISMATCH)
            if index == 0:
                if block.get("previousHash") != ZERO_DIGEST:
                    return VerifyResult(False, 0, BAD_GENESIS)
                config = block.get("config")
                if not config:
                    return VerifyResult(False, 0, MISSING_CONFIG)
                orderer_certs = config.get("ordererCertificates", {})
                ca_roots = config.get("caRoots", {})
            else:
                if block.get("previousHash") != prev_digest:
                    return VerifyResult(False, index, PREV_HASH_MISMATCH)
                if not block.get("transactions"):
                    return VerifyResult(False, index, EMPTY_BLOCK)
            if data_hash(block["transactions"]) != block["dataHash"]:
                return VerifyResult(False, index, DATA_HASH_MISMATCH)
            if not _verify_orderer_signature(block, orderer_certs, ca_roots):
                return VerifyResult(False, index, BAD_ORDERER_SIGNATURE)
            prev_digest = header_digest(block)
    except OSError:
        return VerifyResult(False, 0, CORRUPT_RECORD)
    if not saw_any:
        return VerifyResult(False, 0, CORRUPT_RECORD)
    return VerifyResult(True)
