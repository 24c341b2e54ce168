"""Helpers to build signed chains directly (no ordering pipeline)."""

from __future__ import annotations

from classicschain.identity import Network
from classicschain.ledger.blockfile import BlockFile
from classicschain.ledger.types import (
    FLAG_VALID,
    build_block,
    build_transaction,
    genesis_block,
    header_digest,
)


def make_network(seed: bytes = b"\x11" * 32) -> tuple[Network, dict]:
    net = Network(seed=seed)
    orderers = {
        nid: net.enroll_identity("OrderersOrg", f"orderer-{nid}", "orderer")
        for nid in (1, 2, 3)
    }
    return net, orderers


def genesis_config(net: Network, orderers: dict, max_messages=10, batch_timeout_ms=500) -> dict:
    return {
        "batchTimeoutMs": batch_timeout_ms,
        "caRoots": net.ca_roots(),
        "channel": "classics-main",
        "maxMessagesPerBlock": max_messages,
        "ordererCertificates": {str(n): o.certificate for n, o in orderers.items()},
    }


def make_chain(path, n_blocks: int, txs_per_block: int = 2,
               seed: bytes = b"\x11" * 32) -> tuple[Network, dict]:
    """Write genesis + n_blocks tx blocks to *path*; returns (net, orderers)."""
    net, orderers = make_network(seed)
    submitter = net.enroll_identity("OwnersOrg", "alice", "owner")
    bf = BlockFile(path)
    genesis = genesis_block(genesis_config(net, orderers), 1, orderers[1].sign)
    bf.append(genesis)
    prev = header_digest(genesis)
    counter = 0
    for number in range(1, n_blocks + 1):
        txs = []
        flags = []
        for _ in range(txs_per_block):
            counter += 1
            tx = build_transaction(
                submitter.ref(), "GrantAccess",
                ["CAR00001", f"user-{counter}", "read"],
                [{"key": "classic:CAR00001", "version": None}],
                [{"isDelete": False, "key": f"k{counter}", "value": f"v{counter}"}],
                1700000000000 + counter, submitter.sign,
            )
            txs.append(tx)
            flags.append(FLAG_VALID)
        block = build_block(number, prev, txs, flags, 1, orderers[1].sign)
        bf.append(block)
        prev = header_digest(block)
    bf.close()
    return net, orderers
