"""Crash-fault-tolerant ordering: a three-node Raft cluster.

The node is a plain state machine driven by ``tick(now_ms)`` and
``receive(msg, now_ms)``; time and transport are injected, which lets
tests run hundreds of crash/restart schedules on a virtual clock while
deployment drives the same nodes from a ticker thread.

Safety properties relied on elsewhere:
- at most one leader per term (vote bookkeeping is persistent),
- an entry is committed only once replicated to a majority (2 of 3),
- committed entries are never reordered or lost while a majority lives.
"""

from __future__ import annotations

import logging
import random
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from ..errors import NO_LEADER, ORDERING_UNAVAILABLE, LedgerError

log = logging.getLogger(__name__)

FOLLOWER = "Follower"
CANDIDATE = "Candidate"
LEADER = "Leader"


@dataclass
class LogEntry:
    term: int
    payload: bytes


@dataclass
class RequestVote:
    term: int
    candidate_id: int
    last_log_index: int
    last_log_term: int


@dataclass
class VoteReply:
    term: int
    voter_id: int
    granted: bool


@dataclass
class AppendEntries:
    term: int
    leader_id: int
    prev_log_index: int
    prev_log_term: int
    entries: list[LogEntry]
    leader_commit: int


@dataclass
class AppendReply:
    term: int
    follower_id: int
    success: bool
    match_index: int


@dataclass
class NodeStorage:
    """Durable per-node state; survives a crash/restart of the node."""

    current_term: int = 0
    voted_for: Optional[int] = None
    log: list[LogEntry] = field(default_factory=list)


@dataclass
class RaftConfig:
    election_timeout_min_ms: int = 150
    election_timeout_max_ms: int = 300
    heartbeat_ms: int = 40
    max_entries_per_append: int = 64


class RaftNode:
    """One member of the ordering cluster. Not thread-safe by itself."""

    def __init__(self, node_id: int, peer_ids: list[int], cfg: RaftConfig,
                 storage: NodeStorage, send: Callable[[int, int, object], None],
                 rng: random.Random,
                 on_commit: Callable[[int, int, bytes], None]):
        self.node_id = node_id
        self.peer_ids = peer_ids
        self.cfg = cfg
        self.storage = storage
        self._send = send
        self._rng = rng
        self._on_commit = on_commit

        self.role = FOLLOWER
        self.commit_index = 0  # 1-based; 0 = nothing committed
        self.last_applied = 0
        self.leader_id: Optional[int] = None
        self.next_index: dict[int, int] = {}
        self.match_index: dict[int, int] = {}
        self._votes: set[int] = set()
        self._election_deadline = 0
        self._next_heartbeat = 0
        self._started = False

    # -- helpers -------------------------------------------------------

    def _last_log_index(self) -> int:
        return len(self.storage.log)

    def _last_log_term(self) -> int:
        return self.storage.log[-1].term if self.storage.log else 0

    def _term_at(self, index: int) -> int:
        return self.storage.log[index - 1].term if index >= 1 else 0

    def _reset_election_deadline(self, now: int) -> None:
        span = self.cfg.election_timeout_max_ms - self.cfg.election_timeout_min_ms
        self._election_deadline = now + self.cfg.election_timeout_min_ms + self._rng.randint(0, span)

    def _become_follower(self, term: int, now: int) -> None:
        if term > self.storage.current_term:
            self.storage.current_term = term
            self.storage.voted_for = None
        self.role = FOLLOWER
        self._votes.clear()
        self._reset_election_deadline(now)

    def _become_leader(self, now: int) -> None:
        self.role = LEADER
        self.leader_id = self.node_id
        nxt = self._last_log_index() + 1
        self.next_index = {p: nxt for p in self.peer_ids}
        self.match_index = {p: 0 for p in self.peer_ids}
        self._next_heartbeat = now  # replicate immediately
        log.debug("node %d leader for term %d", self.node_id, self.storage.current_term)

    # -- public API ----------------------------------------------------

    def start(self, now: int) -> None:
        self._started = True
        self._reset_election_deadline(now)

    def is_leader(self) -> bool:
        return self.role == LEADER

    def propose(self, payload: bytes, now: int) -> Optional[int]:
        """Append to the leader log; returns the entry index or None if not leader."""
        if self.role != LEADER:
            return None
        self.storage.log.append(LogEntry(self.storage.current_term, payload))
        index = self._last_log_index()
        self._next_heartbeat = now  # push out on next tick
        return index

    def tick(self, now: int) -> None:
        if not self._started:
            self.start(now)
        if self.role == LEADER:
            if now >= self._next_heartbeat:
                self._broadcast_append(now)
                self._next_heartbeat = now + self.cfg.heartbeat_ms
            return
        if now >= self._election_deadline:
            self._start_election(now)

    def receive(self, msg: object, now: int) -> None:
        if isinstance(msg, RequestVote):
            self._on_request_vote(msg, now)
        elif isinstance(msg, VoteReply):
            self._on_vote_reply(msg, now)
        elif isinstance(msg, AppendEntries):
            self._on_append_entries(msg, now)
        elif isinstance(msg, AppendReply):
            self._on_append_reply(msg, now)

    # -- elections -----------------------------------------------------

    def _start_election(self, now: int) -> None:
        self.storage.current_term += 1
        self.storage.voted_for = self.node_id
        self.role = CANDIDATE
        self.leader_id = None
        self._votes = {self.node_id}
        self._reset_election_deadline(now)
        req = RequestVote(self.storage.current_term, self.node_id,
                          self._last_log_index(), self._last_log_term())
        for p in self.peer_ids:
            self._send(self.node_id, p, req)

    def _log_up_to_date(self, last_index: int, last_term: int) -> bool:
        if last_term != self._last_log_term():
            return last_term > self._last_log_term()
        return last_index >= self._last_log_index()

    def _on_request_vote(self, msg: RequestVote, now: int) -> None:
        if msg.term > self.storage.current_term:
            self._become_follower(msg.term, now)
        granted = (
            msg.term == self.storage.current_term
            and self.storage.voted_for in (None, msg.candidate_id)
            and self._log_up_to_date(msg.last_log_index, msg.last_log_term)
        )
        if granted:
            self.storage.voted_for = msg.candidate_id
            self._reset_election_deadline(now)
        self._send(self.node_id, msg.candidate_id,
                   VoteReply(self.storage.current_term, self.node_id, granted))

    def _on_vote_reply(self, msg: VoteReply, now: int) -> None:
        if msg.term > self.storage.current_term:
            self._become_follower(msg.term, now)
            return
        if self.role != CANDIDATE or msg.term != self.storage.current_term:
            return
        if msg.granted:
            self._votes.add(msg.voter_id)
            if len(self._votes) * 2 > len(self.peer_ids) + 1:
                self._become_leader(now)

    # -- replication ---------------------------------------------------

    def _broadcast_append(self, now: int) -> None:
        for p in self.peer_ids:
            nxt = self.next_index[p]
            prev_index = nxt - 1
            entries = self.storage.log[prev_index:prev_index + self.cfg.max_entries_per_append]
            self._send(self.node_id, p, AppendEntries(
                term=self.storage.current_term,
                leader_id=self.node_id,
                prev_log_index=prev_index,
                prev_log_term=self._term_at(prev_index),
                entries=list(entries),
                leader_commit=self.commit_index,
            ))

    def _on_append_entries(self, msg: AppendEntries, now: int) -> None:
        if msg.term > self.storage.current_term or (
            msg.term == self.storage.current_term and self.role != FOLLOWER
        ):
            self._become_follower(msg.term, now)
        if msg.term < self.storage.current_term:
            self._send(self.node_id, msg.leader_id,
                       AppendReply(self.storage.current_term, self.node_id, False, 0))
            return
        self.leader_id = msg.leader_id
        self._reset_election_deadline(now)

        if msg.prev_log_index > self._last_log_index() or (
            msg.prev_log_index >= 1
            and self._term_at(msg.prev_log_index) != msg.prev_log_term
        ):
            self._send(self.node_id, msg.leader_id,
                       AppendReply(self.storage.current_term, self.node_id, False,
                                   min(msg.prev_log_index - 1, self._last_log_index())))
            return

        # Append, truncating any conflicting suffix.
        idx = msg.prev_log_index
        for entry in msg.entries:
            idx += 1
            if idx <= self._last_log_index():
                if self._term_at(idx) != entry.term:
                    del self.storage.log[idx - 1:]
                    self.storage.log.append(entry)
            else:
                self.storage.log.append(entry)
        match = msg.prev_log_index + len(msg.entries)
        if msg.leader_commit > self.commit_index:
            self.commit_index = min(msg.leader_commit, self._last_log_index())
            self._apply()
        self._send(self.node_id, msg.leader_id,
                   AppendReply(self.storage.current_term, self.node_id, True, match))

    def _on_append_reply(self, msg: AppendReply, now: int) -> None:
        if msg.term > self.storage.current_term:
            self._become_follower(msg.term, now)
            return
        if self.role != LEADER or msg.term != self.storage.current_term:
            return
        if msg.success:
            self.match_index[msg.follower_id] = max(self.match_index[msg.follower_id],
                                                    msg.match_index)
            self.next_index[msg.follower_id] = self.match_index[msg.follower_id] + 1
            self._advance_commit()
        else:
            self.next_index[msg.follower_id] = max(1, min(self.next_index[msg.follower_id] - 1,
                                                          msg.match_index + 1))

    def _advance_commit(self) -> None:
        for n in range(self._last_log_index(), self.commit_index, -1):
            if self._term_at(n) != self.storage.current_term:
                break
            votes = 1 + sum(1 for p in self.peer_ids if self.match_index[p] >= n)
            if votes * 2 > len(self.peer_ids) + 1:
                self.commit_index = n
                self._apply()
                break

    def _apply(self) -> None:
        while self.last_applied < self.commit_index:
            self.last_applied += 1
            entry = self.storage.log[self.last_applied - 1]
            self._on_commit(self.node_id, self.last_applied, entry.payload)


class InMemoryTransport:
    """Queue-per-node message transport with crash and partition hooks."""

    def __init__(self):
        self.queues: dict[int, list[tuple[int, object]]] = {}
        self.down: set[int] = set()

    def register(self, node_id: int) -> None:
        self.queues.setdefault(node_id, [])

    def send(self, src: int, dst: int, msg: object) -> None:
        if src in self.down or dst in self.down:
            return
        if dst in self.queues:
            self.queues[dst].append((src, msg))

    def drain(self, node_id: int) -> list[tuple[int, object]]:
        msgs = self.queues.get(node_id, [])
        self.queues[node_id] = []
        return msgs


class RaftCluster:
    """Three in-process nodes plus the machinery to drive and observe them.

    ``step(ms)`` advances a virtual clock deterministically (tests);
    ``start_threaded()`` drives the same loop from a real-time thread.
    Commits are surfaced through *on_commit(node_id, index, payload)* for
    every node, letting the consumer apply each index exactly once and
    assert cross-node agreement.
    """

    NODE_IDS = (1, 2, 3)

    def __init__(self, cfg: RaftConfig | None = None, seed: int | None = None,
                 on_commit: Callable[[int, int, bytes], None] | None = None):
        self.cfg = cfg or RaftConfig()
        self._rng = random.Random(seed)
        self.transport = InMemoryTransport()
        self.lock = threading.RLock()
        self._on_commit = on_commit or (lambda n, i, p: None)
        self.storages = {nid: NodeStorage() for nid in self.NODE_IDS}
        self.nodes: dict[int, RaftNode] = {}
        self.now_ms = 0
        self._thread: Optional[threading.Thread] = None
        self._stop = threading.Event()
        self.tick_interval_ms = 5
        for nid in self.NODE_IDS:
            self.transport.register(nid)
            self._spawn(nid)

    def _spawn(self, nid: int) -> None:
        peers = [p for p in self.NODE_IDS if p != nid]
        node_rng = random.Random(self._rng.randint(0, 2**31))
        self.nodes[nid] = RaftNode(
            nid, peers, self.cfg, self.storages[nid], self.transport.send,
            node_rng, self._commit_cb,
        )

    def _commit_cb(self, node_id: int, index: int, payload: bytes) -> None:
        self._on_commit(node_id, index, payload)

    # -- fault injection ------------------------------------------------

    def crash(self, nid: int) -> None:
        with self.lock:
            self.transport.down.add(nid)
            self.transport.queues[nid] = []

    def restart(self, nid: int) -> None:
        """Bring a crashed node back with its durable state only."""
        with self.lock:
            self.transport.down.discard(nid)
            self.transport.queues[nid] = []
            self._spawn(nid)
            self.nodes[nid].start(self.now_ms)

    def alive(self) -> list[int]:
        return [n for n in self.NODE_IDS if n not in self.transport.down]

    # -- stepping -------------------------------------------------------

    def step(self, ms: int) -> None:
        """Advance the virtual clock by *ms*, delivering messages and ticking."""
        with self.lock:
            remaining = ms
            while remaining > 0:
                delta = min(self.tick_interval_ms, remaining)
                self.now_ms += delta
                remaining -= delta
                self._pump()

    def _pump(self) -> None:
        # Deliver queued messages, then tick; bounded rounds so a
        # message → reply → message cascade settles within the step.
        for _ in range(4):
            busy = False
            for nid in self.NODE_IDS:
                if nid in self.transport.down:
                    continue
                for _, msg in self.transport.drain(nid):
                    busy = True
                    self.nodes[nid].receive(msg, self.now_ms)
            if not busy:
                break
        for nid in self.NODE_IDS:
            if nid not in self.transport.down:
                self.nodes[nid].tick(self.now_ms)

    # -- threaded drive ---------------------------------------------------

    def start_threaded(self) -> None:
        if self._thread is not None:
            return
        self._stop.clear()
        self.now_ms = int(time.monotonic() * 1000)

        def loop():
            while not self._stop.is_set():
                with self.lock:
                    self.now_ms = int(time.monotonic() * 1000)
                    self._pump()
                time.sleep(self.tick_interval_ms / 1000)

        self._thread = threading.Thread(target=loop, name="raft-ticker", daemon=True)
        self._thread.start()

    def stop_threaded(self) -> None:
        if self._thread is None:
            return
        self._stop.set()
        self._thread.join(timeout=2)
        self._thread = None

    # -- ordering API -----------------------------------------------------

    def leader_id(self) -> Optional[int]:
        with self.lock:
            best = None
            for nid in self.alive():
                node = self.nodes[nid]
                if node.is_leader() and (best is None or
                                         node.storage.current_term > best[0]):
                    best = (node.storage.current_term, nid)
            return best[1] if best else None

    def propose(self, payload: bytes, now: int | None = None) -> int:
        """Hand an entry to the current leader; returns its log index.

        Raises NO_LEADER when no live node is leading; the caller owns
        retries and the commit wait.
        """
        with self.lock:
            lid = None
            for nid in self.alive():
                if self.nodes[nid].is_leader():
                    if lid is None or (self.nodes[nid].storage.current_term
                                       > self.nodes[lid].storage.current_term):
                        lid = nid
            if lid is None:
                raise LedgerError(NO_LEADER, "election in progress")
            idx = self.nodes[lid].propose(payload, now if now is not None else self.now_ms)
            if idx is None:
                raise LedgerError(NO_LEADER, "leader stepped down")
            return idx

    def propose_blocking(self, payload: bytes, timeout_ms: int = 5000) -> int:
        """Threaded-mode propose with bounded leader retry."""
        deadline = time.monotonic() + timeout_ms / 1000
        while True:
            try:
                return self.propose(payload)
            except LedgerError:
                if time.monotonic() >= deadline:
                    raise LedgerError(ORDERING_UNAVAILABLE, "no Raft leader") from None
                time.sleep(0.02)
