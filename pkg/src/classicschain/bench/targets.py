"""Benchmark targets: direct engine invocation and the REST surface.

The direct target plays the role of a smart-contract load driver (no
HTTP in the path); the REST target measures what end users see.
"""

from __future__ import annotations

import json
import threading

from ..ledger import LedgerEngine


class LedgerDirectTarget:
    """Pre-seeded vehicles and identities; exposes op callables."""

    def __init__(self, engine: LedgerEngine, network, n_vehicles: int = 20,
                 nonce: str = "B0"):
        self.engine = engine
        self.network = network
        self.nonce = nonce
        self._register_lock = threading.Lock()
        self._register_counter = 0
        self.owner = network.enroll_identity("OwnersOrg", f"bench-owner-{nonce}", "owner")
        self.shop = network.enroll_identity("WorkshopsOrg", f"bench-shop-{nonce}", "restorer")
        self.grantee = network.enroll_identity("OwnersOrg", f"bench-grantee-{nonce}", "owner")
        self.vins = [f"BENCH{nonce}{i:06d}" for i in range(n_vehicles)]
        details = json.dumps({"make": "Mini", "model": "Bench",
                              "registrationNumber": "BB-00-00", "year": 1965})
        for vin in self.vins:
            engine.submit_transaction(self.shop, "RegisterClassic",
                                      [vin, details, self.owner.user_id])
            engine.submit_transaction(self.owner, "GrantAccess",
                                      [vin, self.shop.user_id, "write"])

    # -- read operations ---------------------------------------------------

    def read_card(self, iteration: int) -> None:
        vin = self.vins[iteration % len(self.vins)]
        self.engine.evaluate_query(self.owner, "GetVehicleCard", [vin])

    def read_history(self, iteration: int) -> None:
        vin = self.vins[iteration % len(self.vins)]
        self.engine.evaluate_query(self.owner, "GetVehicleCardHistory", [vin])

    def list_classics(self, iteration: int) -> None:
        self.engine.evaluate_query(self.owner, "ListClassicsForUser",
                                   [self.owner.user_id])

    # -- write operations -----------------------------------------------------

    def _next_vin(self) -> str:
        with self._register_lock:
            self._register_counter += 1
            return f"NEW{self.nonce}{self._register_counter:08d}"

    def write_register(self, iteration: int) -> None:
        details = json.dumps({"make": "Mini", "model": "Bench",
                              "registrationNumber": "BB-00-00", "year": 1965})
        self.engine.submit_transaction(self.shop, "RegisterClassic",
                                       [self._next_vin(), details,
                                        self.owner.user_id])

    def write_step(self, iteration: int) -> None:
        vin = self.vins[iteration % len(self.vins)]
        step = json.dumps({"stepId": f"S{self.nonce}{iteration:08d}",
                           "title": "bench", "activityType": "other",
                           "description": "", "materials": [], "tools": []})
        self.engine.submit_transaction(self.shop, "AddRestorationStep",
                                       [vin, step, "[]"])

    def ops(self) -> dict:
        return {
            "read_card": self.read_card,
            "read_history": self.read_history,
            "list_classics": self.list_classics,
            "write_register": self.write_register,
            "write_step": self.write_step,
        }


class RestTarget:
    """Drives the gateway HTTP surface (live URL or in-process ASGI app)."""

    def __init__(self, client, tokens: dict[str, dict], vins: list[str],
                 owner_id: str):
        """*client* is an httpx-compatible client; *tokens* maps role key
        ('owner', 'shop') to auth headers."""
        self.client = client
        self.tokens = tokens
        self.vins = vins
        self.owner_id = owner_id
        self._lock = threading.Lock()
        self._counter = 0

    def _check(self, response) -> None:
        if response.status_code >= 400:
            from ..errors import EngineError

            code = "HTTP_%d" % response.status_code
            try:
                code = response.json().get("error", code)
            except Exception:
                pass
            raise EngineError(code, response.text[:200])

    def read_card(self, iteration: int) -> None:
        vin = self.vins[iteration % len(self.vins)]
        self._check(self.client.get(f"/classics/{vin}/card",
                                    headers=self.tokens["owner"]))

    def read_history(self, iteration: int) -> None:
        vin = self.vins[iteration % len(self.vins)]
        self._check(self.client.get(f"/classics/{vin}/history",
                                    headers=self.tokens["owner"]))

    def list_classics(self, iteration: int) -> None:
        self._check(self.client.get(f"/users/{self.owner_id}/classics",
                                    headers=self.tokens["owner"]))

    def write_register(self, iteration: int) -> None:
        with self._lock:
            self._counter += 1
            vin = f"RESTB{self._counter:08d}"
        self._check(self.client.post("/classics", json={
            "vin": vin, "make": "Mini", "model": "Bench",
            "registrationNumber": "BB-00-00", "year": 1965,
            "ownerUserId": self.owner_id,
        }, headers=self.tokens["shop"]))

    def ops(self) -> dict:
        return {
            "read_card": self.read_card,
            "read_history": self.read_history,
            "list_classics": self.list_classics,
            "write_register": self.write_register,
        }
