"""Raw sample log and deterministic aggregation.

The raw log is the ground truth (CSV schema ``ts,op,latency_ms,status``);
aggregation is a pure function of the samples, so a report can always be
reproduced bit-exactly from its log.
"""

from __future__ import annotations

import csv
import threading
from dataclasses import dataclass
from pathlib import Path

OK = "ok"


@dataclass(frozen=True)
class Sample:
    ts_ms: int          # dispatch timestamp
    op: str
    latency_ms: float
    status: str         # "ok" or an error code


class Collector:
    def __init__(self):
        self._lock = threading.Lock()
        self._samples: list[Sample] = []

    def record(self, sample: Sample) -> None:
        with self._lock:
            self._samples.append(sample)

    def samples(self) -> list[Sample]:
        with self._lock:
            return sorted(self._samples, key=lambda s: (s.ts_ms, s.op, s.latency_ms))


def _percentile(sorted_values: list[float], q: float) -> float:
    if not sorted_values:
        return 0.0
    idx = max(0, min(len(sorted_values) - 1, round(q * (len(sorted_values) - 1))))
    return sorted_values[idx]


def aggregate(samples: list[Sample], duration_s: float) -> dict:
    """Per-operation stats plus 1-second buckets.

    Throughput divides completions by the measured span (first dispatch
    to last completion), so queue drain after the dispatch window cannot
    inflate it. The span is derived from the samples alone, keeping the
    report reproducible from the raw log.
    """
    per_op: dict[str, dict] = {}
    buckets: dict[int, int] = {}
    t0 = min((s.ts_ms for s in samples), default=0)
    t_end = max((s.ts_ms + s.latency_ms for s in samples), default=0)
    span_s = max((t_end - t0) / 1000, 1e-9) if samples else duration_s
    for s in samples:
        stats = per_op.setdefault(s.op, {"attempted": 0, "succeeded": 0,
                                         "failed": 0, "latencies": []})
        stats["attempted"] += 1
        if s.status == OK:
            stats["succeeded"] += 1
            stats["latencies"].append(s.latency_ms)
        else:
            stats["failed"] += 1
        buckets[(s.ts_ms - t0) // 1000] = buckets.get((s.ts_ms - t0) // 1000, 0) + 1
    out_ops = {}
    for op, stats in sorted(per_op.items()):
        lats = sorted(stats["latencies"])
        out_ops[op] = {
            "attempted": stats["attempted"],
            "succeeded": stats["succeeded"],
            "failed": stats["failed"],
            "throughputTps": round(stats["succeeded"] / span_s, 3),
            "latencyMs": {
                "min": round(lats[0], 3) if lats else 0.0,
                "avg": round(sum(lats) / len(lats), 3) if lats else 0.0,
                "p95": round(_percentile(lats, 0.95), 3),
                "max": round(lats[-1], 3) if lats else 0.0,
            },
        }
    total_attempted = sum(o["attempted"] for o in out_ops.values())
    return {
        "durationS": duration_s,
        "measuredSpanS": round(span_s, 3),
        "operations": out_ops,
        "perSecondDispatch": {str(k): v for k, v in sorted(buckets.items())},
        "totals": {
            "attempted": total_attempted,
            "succeeded": sum(o["succeeded"] for o in out_ops.values()),
            "failed": sum(o["failed"] for o in out_ops.values()),
        },
    }


def write_csv(samples: list[Sample], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["ts", "op", "latency_ms", "status"])
        for s in samples:
            writer.writerow([s.ts_ms, s.op, f"{s.latency_ms:.3f}", s.status])


def read_csv(path: str | Path) -> list[Sample]:
    samples = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            samples.append(Sample(int(row["ts"]), row["op"],
                                  float(row["latency_ms"]), row["status"]))
    return samples


def render_summary(report: dict, header: str = "") -> str:
    lines = []
    if header:
        lines.append(header)
    lines.append(f"duration: {report['durationS']:.1f}s  "
                 f"attempted={report['totals']['attempted']} "
                 f"succeeded={report['totals']['succeeded']} "
                 f"failed={report['totals']['failed']}")
    lines.append(f"{'operation':<24}{'tps':>8}{'ok':>8}{'fail':>6}"
                 f"{'min':>9}{'avg':>9}{'p95':>9}{'max':>9}")
    for op, stats in report["operations"].items():
        lat = stats["latencyMs"]
        lines.append(
            f"{op:<24}{stats['throughputTps']:>8.1f}{stats['succeeded']:>8}"
            f"{stats['failed']:>6}{lat['min']:>9.1f}{lat['avg']:>9.1f}"
            f"{lat['p95']:>9.1f}{lat['max']:>9.1f}"
        )
    return "\n".join(lines)
