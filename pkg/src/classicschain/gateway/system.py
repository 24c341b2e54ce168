"""Wiring of one gateway process: identities, ledger, media, users, events."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional

from ..identity import Network
from ..identity.ca import ORG_ROLES, PEER_ORGS
from ..ids import new_id
from ..ledger import LedgerConfig, LedgerEngine
from ..mediastore import AnchorQueue, MediaStore
from .auth import TokenSigner, load_or_create_token_key
from .config import GatewayConfig
from .events import EventDispatcher
from .users import UserStore

log = logging.getLogger(__name__)


class GatewaySystem:
    def __init__(self, cfg: GatewayConfig, clock=None, raft_seed: int | None = None,
                 ledger_config: LedgerConfig | None = None):
        self.cfg = cfg
        root = Path(cfg.data_dir)
        root.mkdir(parents=True, exist_ok=True)
        self.network = Network.persistent(root / "identity")
        self.engine = LedgerEngine(
            self.network,
            data_dir=root / "ledger",
            config=ledger_config or LedgerConfig(
                max_messages_per_block=cfg.max_messages_per_block,
                batch_timeout_ms=cfg.batch_timeout_ms,
            ),
            clock=clock,
            raft_seed=raft_seed,
        )
        self.media = MediaStore(root / "media", max_media_bytes=cfg.max_media_bytes)
        self.anchors = AnchorQueue(
            root / "anchors.jsonl",
            self._submit_anchor,
            anchor_delay_s=cfg.anchor.delay_per_file_ms / 1000,
            max_retries=cfg.anchor.max_retries,
            backoff_base_s=cfg.anchor.backoff_base_s,
        )
        self.users = UserStore(root / "users")
        self.events = EventDispatcher(root / "events.jsonl", cfg.webhooks)
        self.tokens = TokenSigner(
            load_or_create_token_key(root / "token.key"),
            expiry_s=cfg.token_expiry_hours * 3600,
        )
        self._started = False

    # -- lifecycle ---------------------------------------------------------

    def start(self) -> "GatewaySystem":
        if not self._started:
            self.engine.start()
            if self.cfg.anchor.mode == "async":
                self.anchors.start()
            self.events.start()
            self._started = True
        return self

    def close(self) -> None:
        self.anchors.stop()
        self.events.stop()
        self.engine.close()
        self.users.close()
        self._started = False

    def __enter__(self) -> "GatewaySystem":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.close()

    # -- registration ---------------------------------------------------------

    def register_user(self, display_name: str, email: str, password: str,
                      org_name: str, role: str) -> str:
        """Create the user record and enroll the ledger identity atomically."""
        from ..errors import EngineError, IdentityError
        from .auth import hash_password
        from .users import UserRecord

        if org_name not in PEER_ORGS:
            raise IdentityError("ROLE_ORG_MISMATCH", f"cannot register under {org_name}")
        if ORG_ROLES[org_name] != role:
            raise IdentityError("ROLE_ORG_MISMATCH",
                                f"role {role!r} not issued by {org_name}")
        user_id = "u" + new_id().lower()
        rec = UserRecord(
            user_id=user_id,
            display_name=display_name,
            email=email,
            password_hash=hash_password(password),
            org_name=org_name,
            role=role,
            ledger_identity_ref=f"{org_name}__{user_id}",
            created_at=UserStore.now_ms(),
        )
        self.users.insert(rec)
        try:
            self.network.enroll_identity(org_name, user_id, role)
        except Exception:
            # Roll the user record back so no orphan remains.
            self.users.delete(org_name, user_id)
            raise
        return user_id

    def identity_for(self, user_id: str):
        rec = self.users.find_by_id(user_id)
        if rec is None:
            return None
        return self.network.get_identity(rec.org_name, rec.user_id)

    # -- anchoring --------------------------------------------------------------

    def _submit_anchor(self, org: str, user: str, vin: str, cid: str,
                       ref_kind: str) -> None:
        identity = self.network.get_identity(org, user)
        self.engine.submit_transaction(identity, "AnchorMedia", [vin, cid, ref_kind])

    def anchor_inline(self, identity, vin: str, cids: list[str], ref_kind: str) -> None:
        """Synchronous reference mode: anchor in the request path."""
        import time as _time

        for cid in cids:
            if self.cfg.anchor.delay_per_file_ms:
                _time.sleep(self.cfg.anchor.delay_per_file_ms / 1000)
            self.engine.submit_transaction(identity, "AnchorMedia",
                                           [vin, cid, ref_kind])

    def anchor_background(self, identity, vin: str, cids: list[str],
                          ref_kind: str) -> list[str]:
        return [
            self.anchors.enqueue(cid, vin, ref_kind, identity.org_name,
                                 identity.user_id)
            for cid in cids
        ]
