"""Gateway configuration: JSON file plus CLASSICSCHAIN_* env overrides.

HTTPS is mandatory outside test mode: ``serve`` refuses to start without
TLS material unless ``testMode`` is set.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional


@dataclass
class AnchorSettings:
    mode: str = "async"  # async | sync (reference mode for comparisons)
    delay_per_file_ms: int = 0  # injected remote-store latency
    bounded_anchor_time_s: int = 30
    max_retries: int = 3
    backoff_base_s: float = 1.0


@dataclass
class GatewayConfig:
    host: str = "127.0.0.1"
    port: int = 8443
    data_dir: str = "./classicschain-data"
    test_mode: bool = False
    tls_certfile: Optional[str] = None
    tls_keyfile: Optional[str] = None
    max_messages_per_block: int = 10
    batch_timeout_ms: int = 500
    anchor: AnchorSettings = field(default_factory=AnchorSettings)
    max_media_bytes: int = 50 * 1024 * 1024
    webhooks: list[str] = field(default_factory=list)
    token_expiry_hours: int = 24

    def data_path(self) -> Path:
        return Path(self.data_dir)


_ENV_PREFIX = "CLASSICSCHAIN_"


def _env(name: str) -> Optional[str]:
    return os.environ.get(_ENV_PREFIX + name)


def load_config(path: str | Path | None = None) -> GatewayConfig:
    cfg = GatewayConfig()
    if path is not None:
        raw = json.loads(Path(path).read_text())
        cfg.host = raw.get("host", cfg.host)
        cfg.port = int(raw.get("port", cfg.port))
        cfg.data_dir = raw.get("dataDir", cfg.data_dir)
        cfg.test_mode = bool(raw.get("testMode", cfg.test_mode))
        tls = raw.get("tls") or {}
        cfg.tls_certfile = tls.get("certfile")
        cfg.tls_keyfile = tls.get("keyfile")
        block = raw.get("block") or {}
        cfg.max_messages_per_block = int(
            block.get("maxMessagesPerBlock", cfg.max_messages_per_block))
        cfg.batch_timeout_ms = int(block.get("batchTimeoutMs", cfg.batch_timeout_ms))
        anchor = raw.get("anchor") or {}
        cfg.anchor = AnchorSettings(
            mode=anchor.get("mode", cfg.anchor.mode),
            delay_per_file_ms=int(anchor.get("delayPerFileMs",
                                             cfg.anchor.delay_per_file_ms)),
            bounded_anchor_time_s=int(anchor.get("boundedAnchorTimeS",
                                                 cfg.anchor.bounded_anchor_time_s)),
            max_retries=int(anchor.get("maxRetries", cfg.anchor.max_retries)),
            backoff_base_s=float(anchor.get("backoffBaseS", cfg.anchor.backoff_base_s)),
        )
        media = raw.get("media") or {}
        cfg.max_media_bytes = int(media.get("maxBytes", cfg.max_media_bytes))
        cfg.webhooks = list(raw.get("webhooks") or [])
        token = raw.get("token") or {}
        cfg.token_expiry_hours = int(token.get("expiryHours", cfg.token_expiry_hours))

    if _env("HOST"):
        cfg.host = _env("HOST")
    if _env("PORT"):
        cfg.port = int(_env("PORT"))
    if _env("DATA_DIR"):
        cfg.data_dir = _env("DATA_DIR")
    if _env("TEST_MODE"):
        cfg.test_mode = _env("TEST_MODE").lower() in ("1", "true", "yes")
    if _env("TLS_CERTFILE"):
        cfg.tls_certfile = _env("TLS_CERTFILE")
    if _env("TLS_KEYFILE"):
        cfg.tls_keyfile = _env("TLS_KEYFILE")
    if _env("BLOCK_MAX_MESSAGES"):
        cfg.max_messages_per_block = int(_env("BLOCK_MAX_MESSAGES"))
    if _env("BLOCK_BATCH_TIMEOUT_MS"):
        cfg.batch_timeout_ms = int(_env("BLOCK_BATCH_TIMEOUT_MS"))
    if _env("ANCHOR_MODE"):
        cfg.anchor.mode = _env("ANCHOR_MODE")
    if _env("ANCHOR_DELAY_PER_FILE_MS"):
        cfg.anchor.delay_per_file_ms = int(_env("ANCHOR_DELAY_PER_FILE_MS"))
    if _env("ANCHOR_BOUNDED_TIME_S"):
        cfg.anchor.bounded_anchor_time_s = int(_env("ANCHOR_BOUNDED_TIME_S"))
    if _env("MEDIA_MAX_BYTES"):
        cfg.max_media_bytes = int(_env("MEDIA_MAX_BYTES"))
    if _env("WEBHOOKS"):
        cfg.webhooks = [u for u in _env("WEBHOOKS").split(",") if u]
    if _env("TOKEN_EXPIRY_HOURS"):
        cfg.token_expiry_hours = int(_env("TOKEN_EXPIRY_HOURS"))
    return cfg
