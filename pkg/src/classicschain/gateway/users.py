"""Per-organization user store (embedded sqlite, one DB file per org).

Holds the PII half of a participant: display name, email, password
hash. The ledger sees only the opaque userId. Emails are unique across
all organizations.
"""

from __future__ import annotations

import sqlite3
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from ..identity.ca import PEER_ORGS

_SCHEMA = """
CREATE TABLE IF NOT EXISTS users (
    user_id TEXT PRIMARY KEY,
    display_name TEXT NOT NULL,
    email TEXT NOT NULL UNIQUE,
    password_hash TEXT NOT NULL,
    org_name TEXT NOT NULL,
    role TEXT NOT NULL,
    ledger_identity_ref TEXT NOT NULL,
    created_at INTEGER NOT NULL
)
"""


@dataclass
class UserRecord:
    user_id: str
    display_name: str
    email: str
    password_hash: str
    org_name: str
    role: str
    ledger_identity_ref: str
    created_at: int


class UserStore:
    def __init__(self, directory: str | Path):
        self.dir = Path(directory)
        self.dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._conns: dict[str, sqlite3.Connection] = {}
        for org in PEER_ORGS:
            conn = sqlite3.connect(self.dir / f"{org}.db", check_same_thread=False)
            conn.execute(_SCHEMA)
            conn.commit()
            self._conns[org] = conn

    def close(self) -> None:
        for conn in self._conns.values():
            conn.close()

    def insert(self, rec: UserRecord) -> None:
        with self._lock:
            conn = self._conns[rec.org_name]
            conn.execute(
                "INSERT INTO users VALUES (?,?,?,?,?,?,?,?)",
                (rec.user_id, rec.display_name, rec.email, rec.password_hash,
                 rec.org_name, rec.role, rec.ledger_identity_ref, rec.created_at),
            )
            conn.commit()

    def delete(self, org_name: str, user_id: str) -> None:
        with self._lock:
            conn = self._conns[org_name]
            conn.execute("DELETE FROM users WHERE user_id = ?", (user_id,))
            conn.commit()

    def _row_to_record(self, row) -> UserRecord:
        return UserRecord(*row)

    def find_by_email(self, email: str) -> Optional[UserRecord]:
        with self._lock:
            for conn in self._conns.values():
                row = conn.execute(
                    "SELECT * FROM users WHERE email = ?", (email,)
                ).fetchone()
                if row:
                    return self._row_to_record(row)
        return None

    def find_by_id(self, user_id: str) -> Optional[UserRecord]:
        with self._lock:
            for conn in self._conns.values():
                row = conn.execute(
                    "SELECT * FROM users WHERE user_id = ?", (user_id,)
                ).fetchone()
                if row:
                    return self._row_to_record(row)
        return None

    def email_exists(self, email: str) -> bool:
        return self.find_by_email(email) is not None

    @staticmethod
    def now_ms() -> int:
        return int(time.time() * 1000)
