"""Background anchoring of content ids to the ledger.

``enqueue`` returns immediately; one worker per process drains the queue
and submits an anchoring transaction per job, so upload latency stays
independent of file count. Jobs survive restarts through an append-only
JSONL journal replayed at startup (enqueued / anchored / failed events).

Failure policy: each attempt that fails marks the job ``failed`` with a
retry count and re-queues it after an exponential backoff (1 s base,
doubling, 3 retries by default); after the last retry the job stays
failed until re-queued manually. ``anchored`` is terminal.

``anchor_delay_s`` injects a per-file delay into the anchor submission
path to model a slow remote store; with it, the synchronous reference
mode (inline anchoring in the request path) exhibits request durations
that grow linearly with file count while this queue keeps them flat.
"""

from __future__ import annotations

import json
import logging
import queue
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from ..ids import new_id

log = logging.getLogger(__name__)

PENDING = "pending"
ANCHORED = "anchored"
FAILED = "failed"


@dataclass
class AnchorJob:
    job_id: str
    cid: str
    vin: str
    ref_kind: str  # document | evidence
    submitter_org: str
    submitter_user: str
    enqueue_time_ms: int
    state: str = PENDING
    retry_count: int = 0
    not_before: float = 0.0  # monotonic seconds; backoff gate


class AnchorQueue:
    """Durable queue + single worker submitting AnchorMedia transactions."""

    def __init__(self, journal_path: str | Path,
                 submit: Callable[[str, str, str, str, str], None],
                 anchor_delay_s: float = 0.0,
                 max_retries: int = 3,
                 backoff_base_s: float = 1.0,
                 clock: Callable[[], int] | None = None):
        """*submit*(org, user, vin, cid, ref_kind) performs the ledger call."""
        self.journal_path = Path(journal_path)
        self.journal_path.parent.mkdir(parents=True, exist_ok=True)
        self._submit = submit
        self.anchor_delay_s = anchor_delay_s
        self.max_retries = max_retries
        self.backoff_base_s = backoff_base_s
        self.clock = clock or (lambda: int(time.time() * 1000))
        self._jobs: dict[str, AnchorJob] = {}
        self._lock = threading.Lock()
        self._queue: "queue.Queue[Optional[str]]" = queue.Queue()
        self._worker: Optional[threading.Thread] = None
        self._stop = threading.Event()
        self._idle = threading.Event()
        self._idle.set()
        self._replay()

    # -- journal ---------------------------------------------------------

    def _journal(self, event: str, job: AnchorJob) -> None:
        record = {
            "cid": job.cid,
            "enqueueTimeMs": job.enqueue_time_ms,
            "event": event,
            "jobId": job.job_id,
            "refKind": job.ref_kind,
            "retryCount": job.retry_count,
            "submitterOrg": job.submitter_org,
            "submitterUser": job.submitter_user,
            "ts": self.clock(),
            "vin": job.vin,
        }
        with open(self.journal_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, sort_keys=True) + "\n")

    def _replay(self) -> None:
        if not self.journal_path.exists():
            return
        for line in self.journal_path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except ValueError:
                continue  # torn tail line
            job = self._jobs.get(rec["jobId"])
            if job is None:
                job = AnchorJob(rec["jobId"], rec["cid"], rec["vin"], rec["refKind"],
                                rec["submitterOrg"], rec["submitterUser"],
                                rec["enqueueTimeMs"])
                self._jobs[job.job_id] = job
            if rec["event"] == "anchored":
                job.state = ANCHORED
            elif rec["event"] == "attempt_failed":
                job.state = FAILED
                job.retry_count = rec.get("retryCount", job.retry_count)
            elif rec["event"] == "requeued":
                job.state = PENDING
        requeued = 0
        for job in self._jobs.values():
            if job.state != ANCHORED:
                job.state = PENDING
                self._queue.put(job.job_id)
                requeued += 1
        if requeued:
            self._idle.clear()
            log.info("anchor queue: requeued %d unfinished jobs", requeued)

    # -- public API ---------------------------------------------------------

    def enqueue(self, cid: str, vin: str, ref_kind: str,
                submitter_org: str, submitter_user: str) -> str:
        job = AnchorJob(new_id(), cid, vin, ref_kind, submitter_org,
                        submitter_user, self.clock())
        with self._lock:
            self._jobs[job.job_id] = job
        self._journal("enqueued", job)
        self._idle.clear()
        self._queue.put(job.job_id)
        return job.job_id

    def job(self, job_id: str) -> Optional[AnchorJob]:
        with self._lock:
            return self._jobs.get(job_id)

    def jobs(self) -> list[AnchorJob]:
        with self._lock:
            return list(self._jobs.values())

    def start(self) -> None:
        if self._worker is not None:
            return
        self._stop.clear()
        self._worker = threading.Thread(target=self._run, name="anchor-worker",
                                        daemon=True)
        self._worker.start()

    def stop(self) -> None:
        if self._worker is None:
            return
        self._stop.set()
        self._queue.put(None)
        self._worker.join(timeout=5)
        self._worker = None

    def wait_idle(self, timeout_s: float) -> bool:
        """Block until no job is pending (anchored or out of retries)."""
        deadline = time.monotonic() + timeout_s
        while time.monotonic() < deadline:
            if self._idle.wait(timeout=min(0.05, max(0.0, deadline - time.monotonic()))):
                return True
        return self._idle.is_set()

    # -- worker ---------------------------------------------------------------

    def _run(self) -> None:
        while not self._stop.is_set():
            try:
                job_id = self._queue.get(timeout=0.1)
            except queue.Empty:
                if self._queue.empty():
                    self._idle.set()
                continue
            if job_id is None:
                break
            job = self.job(job_id)
            if job is None or job.state == ANCHORED:
                continue
            wait = job.not_before - time.monotonic()
            if wait > 0:
                time.sleep(wait)
            if self.anchor_delay_s:
                time.sleep(self.anchor_delay_s)
            try:
                self._submit(job.submitter_org, job.submitter_user, job.vin,
                             job.cid, job.ref_kind)
            except Exception as exc:
                job.retry_count += 1
                job.state = FAILED
                self._journal("attempt_failed", job)
                if job.retry_count <= self.max_retries:
                    job.state = PENDING
                    job.not_before = time.monotonic() + (
                        self.backoff_base_s * (2 ** (job.retry_count - 1))
                    )
                    self._journal("requeued", job)
                    self._queue.put(job.job_id)
                else:
                    log.warning("anchor job %s failed permanently: %s",
                                job.job_id, exc)
            else:
                job.state = ANCHORED
                self._journal("anchored", job)
            if self._queue.empty():
                self._idle.set()
