"""Transaction and block records and their digest rules.

Records are canonical-encodable dicts throughout (they travel through
Raft payloads and the block file unchanged). Digest rules:

- signable bytes  = canonical(tx minus txId, clientSignature)
- txId            = sha256(canonical(tx minus txId))      # signature included
- dataHash        = sha256(canonical(ordered tx list))
- header digest   = sha256(canonical({configHash, dataHash, number,
                    previousHash, signerNodeId, validationFlags}))
- ordererSignature signs the header digest, applied after validation so
  the flags are tamper-evident too.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import total_ordering
from typing import Optional

from ..codec import ZERO_DIGEST, canonical_bytes, digest, sha256_hex

FLAG_VALID = "VALID"
FLAG_MVCC_CONFLICT = "MVCC_CONFLICT"
FLAG_BAD_SIGNATURE = "BAD_SIGNATURE"
FLAG_ENDORSEMENT_FAIL = "ENDORSEMENT_FAIL"

CHANNEL_NAME = "classics-main"


@total_ordering
@dataclass(frozen=True)
class Version:
    """Commit coordinate of a write: (block number, tx position)."""

    block_number: int
    tx_index: int

    def to_record(self) -> dict:
        return {"blockNumber": self.block_number, "txIndex": self.tx_index}

    @classmethod
    def from_record(cls, rec: Optional[dict]) -> Optional["Version"]:
        if rec is None:
            return None
        return cls(rec["blockNumber"], rec["txIndex"])

    def __lt__(self, other: "Version") -> bool:
        return (self.block_number, self.tx_index) < (other.block_number, other.tx_index)


def read_set_record(reads: dict[str, Optional[Version]]) -> list[dict]:
    return [
        {"key": k, "version": v.to_record() if v is not None else None}
        for k, v in sorted(reads.items())
    ]


def write_set_record(writes: list[tuple[str, Optional[bytes], bool]]) -> list[dict]:
    return [
        {"isDelete": is_delete, "key": k,
         "value": None if value is None else value.decode("utf-8")}
        for k, value, is_delete in writes
    ]


def signable_bytes(tx: dict) -> bytes:
    body = {k: v for k, v in tx.items() if k not in ("txId", "clientSignature")}
    return canonical_bytes(body)


def compute_tx_id(tx: dict) -> str:
    body = {k: v for k, v in tx.items() if k != "txId"}
    return digest(body)


def build_transaction(submitter_ref: dict, function: str, args: list[str],
                      read_set: list[dict], write_set: list[dict],
                      timestamp_ms: int, sign) -> dict:
    """Assemble, sign and id a transaction record."""
    tx = {
        "args": list(args),
        "channel": CHANNEL_NAME,
        "function": function,
        "readSet": read_set,
        "submitter": submitter_ref,
        "timestamp": timestamp_ms,
        "writeSet": write_set,
    }
    tx["clientSignature"] = sign(signable_bytes(tx)).hex()
    tx["txId"] = compute_tx_id(tx)
    return tx


def data_hash(transactions: list[dict]) -> str:
    return digest(transactions)


def header_record(block: dict) -> dict:
    return {
        "configHash": digest(block["config"]) if block.get("config") is not None else None,
        "dataHash": block["dataHash"],
        "number": block["number"],
        "previousHash": block["previousHash"],
        "signerNodeId": block["signerNodeId"],
        "validationFlags": block["validationFlags"],
    }


def header_digest(block: dict) -> str:
    return digest(header_record(block))


def build_block(number: int, previous_hash: str, transactions: list[dict],
                flags: list[str], signer_node_id: int, sign,
                config: Optional[dict] = None) -> dict:
    block = {
        "config": config,
        "dataHash": data_hash(transactions),
        "number": number,
        "ordererSignature": "",
        "previousHash": previous_hash,
        "signerNodeId": signer_node_id,
        "transactions": transactions,
        "validationFlags": flags,
    }
    block["ordererSignature"] = sign(header_digest(block).encode("ascii")).hex()
    return block


def genesis_block(config: dict, signer_node_id: int, sign) -> dict:
    return build_block(0, ZERO_DIGEST, [], [], signer_node_id, sign, config=config)
