"""Operation notifications: durable event log plus webhook fan-out.

Every committed triggering transaction emits exactly one event per
recipient. Events append to a JSONL log synchronously (the durable
record) and are delivered to configured webhook URLs at-least-once from
a background thread; delivery failures retry with backoff and never
slow down API responses.
"""

from __future__ import annotations

import json
import logging
import queue
import threading
import time
from pathlib import Path
from typing import Optional

log = logging.getLogger(__name__)

EVENT_TYPES = (
    "access-granted",
    "access-revoked",
    "ownership-transferred",
    "step-added",
    "certified",
)


class EventDispatcher:
    def __init__(self, log_path: str | Path, webhook_urls: list[str] | None = None,
                 clock=None, max_attempts: int = 3, backoff_base_s: float = 0.5):
        self.log_path = Path(log_path)
        self.log_path.parent.mkdir(parents=True, exist_ok=True)
        self.webhook_urls = list(webhook_urls or [])
        self.clock = clock or (lambda: int(time.time() * 1000))
        self.max_attempts = max_attempts
        self.backoff_base_s = backoff_base_s
        self._queue: "queue.Queue[Optional[dict]]" = queue.Queue()
        self._thread: Optional[threading.Thread] = None
        self._stop = threading.Event()
        self._lock = threading.Lock()

    def start(self) -> None:
        if self._thread is not None or not self.webhook_urls:
            return
        self._stop.clear()
        self._thread = threading.Thread(target=self._deliver_loop,
                                        name="event-webhooks", daemon=True)
        self._thread.start()

    def stop(self) -> None:
        if self._thread is None:
            return
        self._stop.set()
        self._queue.put(None)
        self._thread.join(timeout=5)
        self._thread = None

    def emit(self, event_type: str, vin: str, actor_user_id: str,
             recipient_user_id: str, payload: dict | None = None,
             tx_id: str | None = None) -> dict:
        assert event_type in EVENT_TYPES, event_type
        event = {
            "actorUserId": actor_user_id,
            "eventType": event_type,
            "payload": payload or {},
            "recipientUserId": recipient_user_id,
            "timestamp": self.clock(),
            "txId": tx_id,
            "vin": vin,
        }
        with self._lock:
            with open(self.log_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(event, sort_keys=True) + "\n")
        if self.webhook_urls:
            self._queue.put(event)
        return event

    def events(self) -> list[dict]:
        if not self.log_path.exists():
            return []
        return [json.loads(line) for line in
                self.log_path.read_text(encoding="utf-8").splitlines() if line.strip()]

    def _deliver_loop(self) -> None:
        import httpx

        while not self._stop.is_set():
            try:
                event = self._queue.get(timeout=0.2)
            except queue.Empty:
                continue
            if event is None:
                break
            for url in self.webhook_urls:
                for attempt in range(self.max_attempts):
                    try:
                        response = httpx.post(url, json=event, timeout=5.0)
                        if response.status_code < 500:
                            break
                    except Exception as exc:
                        log.warning("webhook %s attempt %d failed: %s",
                                    url, attempt + 1, exc)
                    if not self._stop.wait(self.backoff_base_s * (2 ** attempt)):
                        continue
