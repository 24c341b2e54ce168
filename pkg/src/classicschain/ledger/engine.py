"""The channel engine: simulate, order, validate, commit.

One engine instance is the committing peer plus the three-node ordering
cluster for the single ``classics-main`` channel. The pipeline:

    submit -> simulate against a snapshot (contracts produce read/write
    sets) -> sign -> batch (block cutting by count or timeout) -> Raft
    replication -> single-threaded validation (certificate + client
    signature, endorsement hook, MVCC) -> apply VALID writes -> signed
    block appended to the chain file -> submitter unblocked.

Simulation and queries run concurrently on snapshots; ordering,
validation and commit are serialized per channel. On restart the world
state and history are rebuilt by replaying the chain file (after
truncating a torn tail), so the block file is the only durable truth.
"""

from __future__ import annotations

import logging
import queue
import tempfile
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from ..codec import canonical_bytes, decode_canonical
from ..contracts import CallerInfo, ContractRegistry, TxContext, default_registry
from ..errors import (
    MVCC_CONFLICT,
    ORDERING_UNAVAILABLE,
    IdentityError,
    LedgerError,
)
from ..identity import Network, PEER_ORGS
from ..identity.ca import Identity, verify_certificate
from ..ids import new_id
from .blockfile import BlockFile, load_chain, verify_chain
from .raft import RaftCluster, RaftConfig
from .state import WorldState
from .types import (
    CHANNEL_NAME,
    FLAG_BAD_SIGNATURE,
    FLAG_ENDORSEMENT_FAIL,
    FLAG_MVCC_CONFLICT,
    FLAG_VALID,
    Version,
    build_block,
    build_transaction,
    compute_tx_id,
    genesis_block,
    header_digest,
    read_set_record,
    signable_bytes,
    write_set_record,
)

log = logging.getLogger(__name__)

ORDERING_SIGNER_ID = 1


@dataclass
class LedgerConfig:
    max_messages_per_block: int = 10
    batch_timeout_ms: int = 500
    commit_timeout_ms: int = 10_000
    propose_timeout_ms: int = 3_000
    raft: RaftConfig = field(default_factory=RaftConfig)


@dataclass
class SimulatedTx:
    """A simulated, signed transaction plus its local execution result."""

    tx: dict
    result: object


class _Waiter:
    __slots__ = ("event", "flag", "detail")

    def __init__(self):
        self.event = threading.Event()
        self.flag: Optional[str] = None
        self.detail: str = ""


class LedgerEngine:
    def __init__(self, network: Network, registry: ContractRegistry | None = None,
                 data_dir: str | Path | None = None,
                 config: LedgerConfig | None = None,
                 clock: Callable[[], int] | None = None,
                 raft_seed: int | None = None):
        self.network = network
        self.registry = registry or default_registry()
        self.config = config or LedgerConfig()
        self.clock = clock or (lambda: int(time.time() * 1000))
        if data_dir is None:
            self._tmp = tempfile.TemporaryDirectory(prefix="classicschain-")
            data_dir = self._tmp.name
        else:
            self._tmp = None
        self.data_dir = Path(data_dir)
        self.chain_path = self.data_dir / "chain.blocks"

        self.world = WorldState()
        self._blocks_meta: list[str] = []  # header digest per block
        self._applied_digest: dict[int, bytes] = {}
        self._cert_cache: dict[str, dict] = {}

        self._orderers = self._bootstrap_orderers()
        self._recover_or_create_genesis()

        # Endorsement hook: one peer-role executor of the submitter's org
        # simulates in-process; commit re-checks the org is a peer org.
        self.endorsement_check: Callable[[dict], bool] = (
            lambda tx: tx["submitter"]["orgName"] in PEER_ORGS
        )

        self.cluster = RaftCluster(self.config.raft, seed=raft_seed,
                                   on_commit=self._on_raft_commit)
        self._commit_queue: "queue.Queue[tuple[int, int, bytes] | None]" = queue.Queue()
        self._next_apply_index = 1

        self._pending: list[tuple[dict, _Waiter]] = []
        self._pending_first_ms: Optional[int] = None
        self._pending_cond = threading.Condition()
        self._waiters: dict[str, _Waiter] = {}
        self._waiters_lock = threading.Lock()

        self._closing = False
        self._cutter = threading.Thread(target=self._cutter_loop, name="block-cutter", daemon=True)
        self._committer = threading.Thread(target=self._committer_loop, name="committer", daemon=True)
        self._started = False

    # -- lifecycle -------------------------------------------------------

    def start(self) -> "LedgerEngine":
        if not self._started:
            self.cluster.start_threaded()
            self._cutter.start()
            self._committer.start()
            self._started = True
        return self

    def close(self) -> None:
        self._closing = True
        with self._pending_cond:
            self._pending_cond.notify_all()
        self._commit_queue.put(None)
        if self._started:
            self._cutter.join(timeout=3)
            self._committer.join(timeout=3)
            self.cluster.stop_threaded()
        self._blockfile.close()
        if self._tmp is not None:
            self._tmp.cleanup()

    def __enter__(self) -> "LedgerEngine":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.close()

    # -- bootstrap -------------------------------------------------------

    def _bootstrap_orderers(self) -> dict[int, Identity]:
        orderers = {}
        for node_id in (1, 2, 3):
            user = f"orderer-{node_id}"
            try:
                ident = self.network.enroll_identity("OrderersOrg", user, "orderer")
            except IdentityError:
                ident = self.network.get_identity("OrderersOrg", user)
            orderers[node_id] = ident
        return orderers

    def _genesis_config(self) -> dict:
        return {
            "batchTimeoutMs": self.config.batch_timeout_ms,
            "caRoots": self.network.ca_roots(),
            "channel": CHANNEL_NAME,
            "maxMessagesPerBlock": self.config.max_messages_per_block,
            "ordererCertificates": {
                str(nid): ident.certificate for nid, ident in self._orderers.items()
            },
        }

    def _recover_or_create_genesis(self) -> None:
        if self.chain_path.exists():
            kept = BlockFile.repair_tail(self.chain_path)
            blocks = load_chain(self.chain_path)
            log.info("recovered chain: %d blocks", kept)
        else:
            blocks = []
        self._blockfile = BlockFile(self.chain_path)
        if not blocks:
            signer = self._orderers[ORDERING_SIGNER_ID]
            genesis = genesis_block(self._genesis_config(), ORDERING_SIGNER_ID, signer.sign)
            self._blockfile.append(genesis)
            blocks = [genesis]
        for block in blocks:
            self._blocks_meta.append(header_digest(block))
            self._replay_block(block)

    def _replay_block(self, block: dict) -> None:
        for tx_index, (tx, flag) in enumerate(
            zip(block["transactions"], block["validationFlags"])
        ):
            if flag != FLAG_VALID:
                continue
            version = Version(block["number"], tx_index)
            for write in tx["writeSet"]:
                value = None if write["value"] is None else write["value"].encode("utf-8")
                self.world.apply_write(
                    write["key"], value, write["isDelete"], version,
                    tx["txId"], tx["timestamp"],
                    tx["submitter"]["userId"], tx["submitter"]["orgName"],
                    tx["function"],
                )

    # -- public operations -------------------------------------------------

    def simulate(self, identity: Identity, function: str, args: list[str]) -> SimulatedTx:
        """Run the contract against a snapshot and sign the resulting tx."""
        fn = self.registry.resolve(function)
        timestamp = self.clock()
        ctx = self._make_context(identity, timestamp)
        result = fn.handler(ctx, [self._as_str(a) for a in args])
        tx = build_transaction(
            identity.ref(), function, [self._as_str(a) for a in args],
            read_set_record(ctx.reads), write_set_record(ctx.write_set()),
            timestamp, identity.sign,
        )
        return SimulatedTx(tx=tx, result=result)

    def submit_simulated(self, stx: SimulatedTx,
                         timeout_ms: Optional[int] = None) -> str:
        """Order and commit a simulated tx; returns txId once VALID."""
        if self._closing:
            raise LedgerError(ORDERING_UNAVAILABLE, "engine is shutting down")
        timeout_ms = timeout_ms or self.config.commit_timeout_ms
        waiter = _Waiter()
        tx_id = stx.tx["txId"]
        with self._waiters_lock:
            self._waiters[tx_id] = waiter
        with self._pending_cond:
            self._pending.append((stx.tx, waiter))
            if self._pending_first_ms is None:
                self._pending_first_ms = self._now_mono_ms()
            self._pending_cond.notify_all()
        if not waiter.event.wait(timeout_ms / 1000):
            with self._waiters_lock:
                self._waiters.pop(tx_id, None)
            raise LedgerError(ORDERING_UNAVAILABLE, "commit not reached in time")
        if waiter.flag == FLAG_VALID:
            return tx_id
        if waiter.flag == FLAG_MVCC_CONFLICT:
            raise LedgerError(MVCC_CONFLICT, waiter.detail or "read set stale; retry")
        if waiter.flag == ORDERING_UNAVAILABLE:
            raise LedgerError(ORDERING_UNAVAILABLE, waiter.detail)
        raise LedgerError(waiter.flag or "UNKNOWN", waiter.detail)

    def submit_transaction(self, identity: Identity, function: str,
                           args: list[str]) -> tuple[str, object]:
        """Simulate, order and commit; returns (txId, contract result)."""
        stx = self.simulate(identity, function, args)
        tx_id = self.submit_simulated(stx)
        return tx_id, stx.result

    def evaluate_query(self, identity: Identity, function: str, args: list[str]) -> object:
        """Read-only execution against a consistent snapshot; no tx produced."""
        fn = self.registry.resolve(function)
        ctx = self._make_context(identity, self.clock())
        return fn.handler(ctx, [self._as_str(a) for a in args])

    def get_history_for_key(self, key: str) -> list[dict]:
        return [e.to_record() for e in self.world.history(key)]

    def read_state(self, key: str) -> Optional[bytes]:
        """Direct committed-state read for in-process plumbing."""
        return self.world.get(key)

    def verify(self):
        return verify_chain(self.chain_path)

    def block_height(self) -> int:
        return len(self._blocks_meta)

    # -- orderer fault injection (tests, ops tooling) -----------------------

    def crash_orderer(self, node_id: int) -> None:
        self.cluster.crash(node_id)

    def restart_orderer(self, node_id: int) -> None:
        self.cluster.restart(node_id)

    # -- internals ----------------------------------------------------------

    @staticmethod
    def _as_str(arg) -> str:
        return arg.decode("utf-8") if isinstance(arg, (bytes, bytearray)) else str(arg)

    @staticmethod
    def _now_mono_ms() -> int:
        return int(time.monotonic() * 1000)

    def _make_context(self, identity: Identity, timestamp_ms: int) -> TxContext:
        snapshot = self.world.snapshot()
        caller = CallerInfo(
            user_id=identity.user_id,
            org_name=identity.org_name,
            role=identity.role,
            attributes=identity.attributes,
        )
        return TxContext(
            snapshot, caller, timestamp_ms, self.network.user_exists,
            history=lambda key: self.world.history(key)[: snapshot.history_len(key)],
        )

    # Block cutting: a block is cut when the pending queue reaches
    # maxMessagesPerBlock or batchTimeout has elapsed since the first
    # pending tx, whichever comes first.
    def _cutter_loop(self) -> None:
        cfg = self.config
        while True:
            with self._pending_cond:
                while not self._pending and not self._closing:
                    self._pending_cond.wait(0.1)
                if self._closing and not self._pending:
                    return
                while (len(self._pending) < cfg.max_messages_per_block
                       and not self._closing):
                    elapsed = self._now_mono_ms() - (self._pending_first_ms or 0)
                    remaining = cfg.batch_timeout_ms - elapsed
                    if remaining <= 0:
                        break
                    self._pending_cond.wait(remaining / 1000)
                batch = self._pending[: cfg.max_messages_per_block]
                self._pending = self._pending[cfg.max_messages_per_block:]
                self._pending_first_ms = self._now_mono_ms() if self._pending else None
            if not batch:
                continue
            payload = canonical_bytes({
                "batchId": new_id(),
                "txs": [tx for tx, _ in batch],
            })
            try:
                self.cluster.propose_blocking(payload, cfg.propose_timeout_ms)
            except LedgerError as exc:
                for tx, waiter in batch:
                    with self._waiters_lock:
                        self._waiters.pop(tx["txId"], None)
                    waiter.flag = ORDERING_UNAVAILABLE
                    waiter.detail = str(exc)
                    waiter.event.set()

    def _on_raft_commit(self, node_id: int, index: int, payload: bytes) -> None:
        self._commit_queue.put((node_id, index, payload))

    def _committer_loop(self) -> None:
        import hashlib

        buffered: dict[int, bytes] = {}
        while True:
            item = self._commit_queue.get()
            if item is None:
                return
            node_id, index, payload = item
            if index < self._next_apply_index:
                if self._applied_digest.get(index) != hashlib.sha256(payload).digest():
                    log.critical("raft divergence at index %d (node %d)", index, node_id)
                continue
            if index in buffered:
                if buffered[index] != payload:
                    log.critical("raft divergence at index %d (node %d)", index, node_id)
                continue
            buffered[index] = payload
            while self._next_apply_index in buffered:
                entry = buffered.pop(self._next_apply_index)
                self._applied_digest[self._next_apply_index] = hashlib.sha256(entry).digest()
                self._apply_batch(entry)
                self._next_apply_index += 1

    def _apply_batch(self, payload: bytes) -> None:
        batch = decode_canonical(payload)
        txs = batch["txs"]
        number = len(self._blocks_meta)
        flags: list[str] = []
        details: list[str] = []
        for tx_index, tx in enumerate(txs):
            flag, detail = self._validate_tx(tx)
            if flag == FLAG_VALID:
                self._apply_writes(tx, Version(number, tx_index))
            flags.append(flag)
            details.append(detail)
        signer = self._orderers[ORDERING_SIGNER_ID]
        block = build_block(
            number, self._blocks_meta[-1], txs, flags, ORDERING_SIGNER_ID, signer.sign,
        )
        self._blockfile.append(block)
        self._blocks_meta.append(header_digest(block))
        # Submitters unblock only once the block is durable.
        for tx, flag, detail in zip(txs, flags, details):
            self._resolve_waiter(tx["txId"], flag, detail)

    def _validate_tx(self, tx: dict) -> tuple[str, str]:
        from cryptography.exceptions import InvalidSignature
        from cryptography.hazmat.primitives.asymmetric.ed25519 import Ed25519PublicKey

        try:
            if compute_tx_id(tx) != tx["txId"]:
                return FLAG_BAD_SIGNATURE, "txId does not match content"
            cert = tx["submitter"]["certificate"]
            cert_key = cert["signature"]
            record = self._cert_cache.get(cert_key)
            if record is None:
                record = verify_certificate(cert, self.network.ca_roots())
                self._cert_cache[cert_key] = record
            if (record["userId"] != tx["submitter"]["userId"]
                    or record["orgName"] != tx["submitter"]["orgName"]):
                return FLAG_BAD_SIGNATURE, "submitter does not match certificate"
            pub = Ed25519PublicKey.from_public_bytes(bytes.fromhex(record["publicKey"]))
            pub.verify(bytes.fromhex(tx["clientSignature"]), signable_bytes(tx))
        except InvalidSignature:
            return FLAG_BAD_SIGNATURE, "client signature invalid"
        except (IdentityError, KeyError, ValueError, TypeError) as exc:
            return FLAG_BAD_SIGNATURE, f"certificate rejected: {exc}"
        if not self.endorsement_check(tx):
            return FLAG_ENDORSEMENT_FAIL, "endorsement policy not satisfied"
        for read in tx["readSet"]:
            current = self.world.current_version(read["key"])
            recorded = Version.from_record(read["version"])
            if current != recorded:
                return FLAG_MVCC_CONFLICT, f"stale read of {read['key']}"
        return FLAG_VALID, ""

    def _apply_writes(self, tx: dict, version: Version) -> None:
        for write in tx["writeSet"]:
            value = None if write["value"] is None else write["value"].encode("utf-8")
            self.world.apply_write(
                write["key"], value, write["isDelete"], version,
                tx["txId"], tx["timestamp"],
                tx["submitter"]["userId"], tx["submitter"]["orgName"],
                tx["function"],
            )

    def _resolve_waiter(self, tx_id: str, flag: str, detail: str) -> None:
        with self._waiters_lock:
            waiter = self._waiters.pop(tx_id, None)
        if waiter is not None:
            waiter.flag = flag
            waiter.detail = detail
            waiter.event.set()
