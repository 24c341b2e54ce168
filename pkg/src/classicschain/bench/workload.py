"""Load generation: open-loop (paced) and closed-loop (fixed workers).

Open loop dispatches on a token-bucket schedule regardless of response
times; latency is measured from the scheduled dispatch instant, so queue
buildup at saturation shows up as latency, exactly like an arrival
process hitting a slow server. Closed loop runs a fixed worker count
back-to-back.
"""

from __future__ import annotations

import random
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

from ..errors import EngineError
from .report import OK, Collector, Sample, aggregate

OpTable = dict[str, Callable[[int], None]]  # op name -> callable(iteration)


@dataclass
class WorkloadSpec:
    target: str = "ledger-direct"  # ledger-direct | rest
    mix: dict[str, float] = field(default_factory=lambda: {"read_card": 1.0})
    mode: str = "open"             # open | closed
    send_rate: float = 10.0        # tx/s (open loop)
    concurrency: int = 16          # workers (closed) / pool size (open)
    duration_s: float = 10.0
    payload: dict = field(default_factory=dict)
    seed: int = 0

    def validate(self) -> None:
        if not self.mix:
            raise ValueError("mix must not be empty")
        total = sum(self.mix.values())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"mix weights must sum to 1, got {total}")
        if self.mode == "open" and self.send_rate <= 0:
            raise ValueError("send_rate must be positive")
        if self.mode not in ("open", "closed"):
            raise ValueError(f"unknown mode {self.mode!r}")

    @classmethod
    def from_dict(cls, raw: dict) -> "WorkloadSpec":
        spec = cls(
            target=raw.get("target", "ledger-direct"),
            mix={k: float(v) for k, v in raw.get("mix", {"read_card": 1.0}).items()},
            mode=raw.get("mode", "open"),
            send_rate=float(raw.get("sendRate", 10.0)),
            concurrency=int(raw.get("concurrency", 16)),
            duration_s=float(raw.get("durationS", 10.0)),
            payload=raw.get("payload", {}),
            seed=int(raw.get("seed", 0)),
        )
        spec.validate()
        return spec


def _pick(rng: random.Random, mix: dict[str, float]) -> str:
    roll = rng.random()
    acc = 0.0
    for op, weight in sorted(mix.items()):
        acc += weight
        if roll <= acc:
            return op
    return sorted(mix)[-1]


def run_workload(spec: WorkloadSpec, ops: OpTable,
                 collector: Collector | None = None) -> dict:
    """Execute the workload; returns the aggregated report (raw samples
    are available from the collector)."""
    spec.validate()
    unknown = set(spec.mix) - set(ops)
    if unknown:
        raise ValueError(f"workload references unknown operations {sorted(unknown)}")
    collector = collector or Collector()
    if spec.mode == "open":
        _run_open(spec, ops, collector)
    else:
        _run_closed(spec, ops, collector)
    report = aggregate(collector.samples(), spec.duration_s)
    report["spec"] = {
        "mix": spec.mix, "mode": spec.mode, "sendRate": spec.send_rate,
        "concurrency": spec.concurrency, "target": spec.target,
    }
    return report


def _execute(op_name: str, fn: Callable[[int], None], iteration: int,
             scheduled_ms: float, collector: Collector) -> None:
    # Latency runs from the scheduled dispatch instant: open-loop queueing
    # at saturation is latency, not hidden backpressure.
    try:
        fn(iteration)
        status = OK
    except EngineError as exc:
        status = exc.code
    except Exception:
        status = "ERROR"
    end = time.perf_counter() * 1000
    collector.record(Sample(int(scheduled_ms), op_name, end - scheduled_ms, status))


def _run_open(spec: WorkloadSpec, ops: OpTable, collector: Collector) -> None:
    rng = random.Random(spec.seed)
    interval_ms = 1000.0 / spec.send_rate
    n_dispatch = int(spec.duration_s * spec.send_rate)
    pool = ThreadPoolExecutor(max_workers=spec.concurrency)
    start_ms = time.perf_counter() * 1000
    for i in range(n_dispatch):
        scheduled = start_ms + i * interval_ms
        delay = scheduled - time.perf_counter() * 1000
        if delay > 0:
            time.sleep(delay / 1000)
        op_name = _pick(rng, spec.mix)
        pool.submit(_execute, op_name, ops[op_name], i, scheduled, collector)
    pool.shutdown(wait=True)


def _run_closed(spec: WorkloadSpec, ops: OpTable, collector: Collector) -> None:
    deadline = time.perf_counter() + spec.duration_s
    counter = [0]
    counter_lock = threading.Lock()

    def worker(worker_id: int) -> None:
        rng = random.Random(spec.seed * 1000 + worker_id)
        while time.perf_counter() < deadline:
            with counter_lock:
                iteration = counter[0]
                counter[0] += 1
            op_name = _pick(rng, spec.mix)
            _execute(op_name, ops[op_name], iteration,
                     time.perf_counter() * 1000, collector)

    threads = [threading.Thread(target=worker, args=(w,))
               for w in range(spec.concurrency)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
