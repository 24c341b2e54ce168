"""Content-addressed media storage.

Files are named by the SHA-256 of their bytes (``sha2-256:<hex>``) and
laid out in a two-level hex fan-out: ``media/<hex[:2]>/<hex[2:4]>/<hex>``.
Reads re-hash on every access; corruption is never returned silently.
Everything stored is pinned (no garbage collection).
"""

from __future__ import annotations

import hashlib
import os
import re
from pathlib import Path

from ..errors import (
    INTEGRITY_FAILURE,
    IO_FAILURE,
    NOT_FOUND,
    TOO_LARGE,
    MediaError,
)

CID_PREFIX = "sha2-256:"
_CID_RE = re.compile(r"^sha2-256:([0-9a-f]{64})$")

DEFAULT_MAX_MEDIA_BYTES = 50 * 1024 * 1024


def compute_cid(content: bytes) -> str:
    """Deterministic content id: identical bytes, identical cid, anywhere."""
    return CID_PREFIX + hashlib.sha256(content).hexdigest()


def parse_cid(cid: str) -> str:
    m = _CID_RE.match(cid)
    if not m:
        raise MediaError(NOT_FOUND, f"malformed cid {cid!r}")
    return m.group(1)


class MediaStore:
    def __init__(self, root: str | os.PathLike,
                 max_media_bytes: int = DEFAULT_MAX_MEDIA_BYTES):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.max_media_bytes = max_media_bytes

    def path_for(self, cid: str) -> Path:
        digest = parse_cid(cid)
        return self.root / digest[:2] / digest[2:4] / digest

    def store(self, content: bytes) -> str:
        if len(content) > self.max_media_bytes:
            raise MediaError(
                TOO_LARGE,
                f"{len(content)} bytes exceeds limit of {self.max_media_bytes}",
            )
        cid = compute_cid(content)
        path = self.path_for(cid)
        if path.exists():
            return cid  # content addressing: re-store is a no-op
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_name(path.name + ".tmp")
            tmp.write_bytes(content)
            tmp.replace(path)
        except OSError as exc:
            raise MediaError(IO_FAILURE, str(exc)) from exc
        return cid

    def get(self, cid: str) -> bytes:
        path = self.path_for(cid)
        if not path.exists():
            raise MediaError(NOT_FOUND, cid)
        try:
            content = path.read_bytes()
        except OSError as exc:
            raise MediaError(IO_FAILURE, str(exc)) from exc
        if compute_cid(content) != cid:
            raise MediaError(INTEGRITY_FAILURE, f"stored bytes no longer match {cid}")
        return content

    def exists(self, cid: str) -> bool:
        try:
            return self.path_for(cid).exists()
        except MediaError:
            return False

    def verify_all(self) -> list[tuple[str, bool]]:
        """Re-hash every stored object; returns (cid, ok) pairs."""
        results = []
        for path in sorted(self.root.glob("*/*/*")):
            if path.suffix == ".tmp":
                continue
            cid = CID_PREFIX + path.name
            results.append((cid, compute_cid(path.read_bytes()) == cid))
        return results
