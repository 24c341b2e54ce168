"""Versioned world state and per-key history index.

Writers (the single commit pipeline) mutate under the lock; readers take
an O(size) snapshot and never block afterwards. History records every
VALID write in commit order, including deletes.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Optional

from .types import Version


@dataclass(frozen=True)
class HistoryEntry:
    tx_id: str
    timestamp: int
    submitter_user: str
    submitter_org: str
    function: str
    value: Optional[bytes]
    is_delete: bool
    version: Version

    def to_record(self) -> dict:
        return {
            "function": self.function,
            "isDelete": self.is_delete,
            "submitter": {"orgName": self.submitter_org, "userId": self.submitter_user},
            "timestamp": self.timestamp,
            "txId": self.tx_id,
            "value": None if self.value is None else self.value.decode("utf-8"),
            "version": self.version.to_record(),
        }


class StateSnapshot:
    """Immutable point-in-time view used for simulation and queries."""

    def __init__(self, entries: dict[str, tuple[bytes, Version]],
                 history_len: dict[str, int]):
        self._entries = entries
        self._history_len = history_len

    def get(self, key: str) -> Optional[bytes]:
        entry = self._entries.get(key)
        return entry[0] if entry else None

    def version(self, key: str) -> Optional[Version]:
        entry = self._entries.get(key)
        return entry[1] if entry else None

    def history_len(self, key: str) -> int:
        return self._history_len.get(key, 0)

    def keys_with_prefix(self, prefix: str) -> list[str]:
        return sorted(k for k in self._entries if k.startswith(prefix))


class WorldState:
    def __init__(self):
        self._lock = threading.Lock()
        self._entries: dict[str, tuple[bytes, Version]] = {}
        self._history: dict[str, list[HistoryEntry]] = {}

    def snapshot(self) -> StateSnapshot:
        with self._lock:
            return StateSnapshot(
                dict(self._entries),
                {k: len(v) for k, v in self._history.items()},
            )

    def current_version(self, key: str) -> Optional[Version]:
        with self._lock:
            entry = self._entries.get(key)
            return entry[1] if entry else None

    def apply_write(self, key: str, value: Optional[bytes], is_delete: bool,
                    version: Version, tx_id: str, timestamp: int,
                    submitter_user: str, submitter_org: str, function: str) -> None:
        with self._lock:
            if is_delete:
                self._entries.pop(key, None)
            else:
                assert value is not None
                self._entries[key] = (value, version)
            self._history.setdefault(key, []).append(HistoryEntry(
                tx_id, timestamp, submitter_user, submitter_org, function,
                None if is_delete else value, is_delete, version,
            ))

    def history(self, key: str) -> list[HistoryEntry]:
        with self._lock:
            return list(self._history.get(key, []))

    def get(self, key: str) -> Optional[bytes]:
        with self._lock:
            entry = self._entries.get(key)
            return entry[0] if entry else None
