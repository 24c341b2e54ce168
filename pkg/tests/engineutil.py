"""Shared fixtures-in-functions for engine-level tests."""

from __future__ import annotations

import itertools
import json

from classicschain.identity import Network
from classicschain.ledger import LedgerConfig, LedgerEngine
from classicschain.ledger.raft import RaftConfig


def fast_config(batch_timeout_ms: int = 25, max_messages: int = 10,
                commit_timeout_ms: int = 10_000) -> LedgerConfig:
    return LedgerConfig(
        max_messages_per_block=max_messages,
        batch_timeout_ms=batch_timeout_ms,
        commit_timeout_ms=commit_timeout_ms,
        propose_timeout_ms=3_000,
        raft=RaftConfig(election_timeout_min_ms=40, election_timeout_max_ms=80,
                        heartbeat_ms=10),
    )


_clock_counter = itertools.count()


def ticking_clock(start_ms: int = 1_750_000_000_000):
    """Deterministic strictly-increasing millisecond clock."""
    counter = itertools.count()
    return lambda: start_ms + next(counter)


def make_engine(data_dir=None, seed: bytes = b"\x21" * 32, raft_seed: int = 7,
                clock=None, **cfg_kwargs) -> tuple[LedgerEngine, Network]:
    net = Network(seed=seed)
    engine = LedgerEngine(
        net, data_dir=data_dir, config=fast_config(**cfg_kwargs),
        clock=clock or ticking_clock(), raft_seed=raft_seed,
    )
    return engine, net


def standard_cast(net: Network) -> dict:
    return {
        "alice": net.enroll_identity("OwnersOrg", "alice", "owner"),
        "bob": net.enroll_identity("OwnersOrg", "bob", "owner"),
        "shop1": net.enroll_identity("WorkshopsOrg", "shop1", "restorer",
                                     {"shopName": "Coopers Garage"}),
        "shop2": net.enroll_identity("WorkshopsOrg", "shop2", "restorer"),
        "cert1": net.enroll_identity("CertifiersOrg", "cert1", "certifier"),
    }


def details(make="Mini", model="Cooper S", year=1967, reg="AA-11-22") -> str:
    return json.dumps({"make": make, "model": model, "registrationNumber": reg,
                       "year": year})


def step_json(step_id: str, title="Paint respray", activity="paint", **extra) -> str:
    body = {"stepId": step_id, "title": title, "activityType": activity,
            "description": "", "materials": [], "tools": []}
    body.update(extra)
    return json.dumps(body)


def register(engine, cast, vin="1275MK1S", owner="alice", registrar="shop1"):
    return engine.submit_transaction(
        cast[registrar], "RegisterClassic", [vin, details(), owner]
    )
