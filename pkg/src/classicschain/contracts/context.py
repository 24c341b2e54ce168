"""Simulation context: read/write-set capture over a state snapshot.

Contract functions are pure given (snapshot, caller, args); every state
read is recorded with the version seen, so commit-time MVCC validation
re-checks exactly what authorization and business logic depended on.
Read-your-writes applies within one simulation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable, Optional

if TYPE_CHECKING:
    from ..ledger.state import StateSnapshot
    from ..ledger.types import Version


@dataclass(frozen=True)
class CallerInfo:
    user_id: str
    org_name: str
    role: str
    attributes: dict


class TxContext:
    def __init__(self, snapshot: "StateSnapshot", caller: CallerInfo,
                 timestamp_ms: int, user_exists: Callable[[str], bool],
                 history: Callable[[str], list] | None = None):
        self.snapshot = snapshot
        self.caller = caller
        self.timestamp = timestamp_ms
        self._user_exists = user_exists
        self._history = history or (lambda key: [])
        self.reads: dict[str, Optional["Version"]] = {}
        self._writes: dict[str, tuple[Optional[bytes], bool]] = {}
        self._write_order: list[str] = []

    # -- state access ----------------------------------------------------

    def get_state(self, key: str) -> Optional[bytes]:
        if key in self._writes:
            value, is_delete = self._writes[key]
            return None if is_delete else value
        if key not in self.reads:
            self.reads[key] = self.snapshot.version(key)
        return self.snapshot.get(key)

    def put_state(self, key: str, value: bytes) -> None:
        if key not in self._writes:
            self._write_order.append(key)
        self._writes[key] = (value, False)

    def delete_state(self, key: str) -> None:
        if key not in self._writes:
            self._write_order.append(key)
        self._writes[key] = (None, True)

    def write_set(self) -> list[tuple[str, Optional[bytes], bool]]:
        return [(k, *self._writes[k]) for k in self._write_order]

    # -- environment -----------------------------------------------------

    def user_exists(self, user_id: str) -> bool:
        return self._user_exists(user_id)

    def history_len(self, key: str) -> int:
        """Committed history length, consistent with the snapshot."""
        return self.snapshot.history_len(key)

    def history(self, key: str) -> list:
        """Committed history entries (read-only queries)."""
        return self._history(key)

    def scan_keys(self, prefix: str) -> list[str]:
        """Range read for queries; not tracked in the read set."""
        return self.snapshot.keys_with_prefix(prefix)
