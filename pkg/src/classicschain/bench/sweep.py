"""Saturation sweeps: drive one operation over a rising rate ladder.

Max sustained TPS is the highest offered rate the system absorbed:
success ratio at least 0.99 and measured throughput at least 95% of the
offered rate. Absolute numbers are hardware-bound; the shape (reads
saturating far above writes, write latency exceeding read latency) is
what carries over between environments.
"""

from __future__ import annotations

from .report import Collector
from .workload import WorkloadSpec, run_workload

SUCCESS_RATIO_FLOOR = 0.99
THROUGHPUT_FLOOR = 0.95


def sweep_saturation(op_name: str, rates: list[float], ops: dict,
                     duration_s: float = 10.0, concurrency: int = 64,
                     seed: int = 0) -> dict:
    """Run *op_name* open-loop at each rate; returns curve + max sustained."""
    if sorted(rates) != list(rates):
        raise ValueError("rates must be non-decreasing")
    curve = []
    max_sustained = 0.0
    for rate in rates:
        spec = WorkloadSpec(mix={op_name: 1.0}, mode="open", send_rate=rate,
                            concurrency=concurrency, duration_s=duration_s,
                            seed=seed)
        report = run_workload(spec, ops, Collector())
        stats = report["operations"].get(op_name, {
            "attempted": 0, "succeeded": 0, "failed": 0, "throughputTps": 0.0,
            "latencyMs": {"min": 0, "avg": 0, "p95": 0, "max": 0},
        })
        attempted = stats["attempted"]
        ratio = stats["succeeded"] / attempted if attempted else 0.0
        point = {
            "offeredRate": rate,
            "throughputTps": stats["throughputTps"],
            "successRatio": round(ratio, 4),
            "failed": stats["failed"],
            "latencyMs": stats["latencyMs"],
        }
        curve.append(point)
        if ratio >= SUCCESS_RATIO_FLOOR and \
                stats["throughputTps"] >= THROUGHPUT_FLOOR * rate:
            max_sustained = max(max_sustained, rate)
    return {"curve": curve, "maxSustainedTps": max_sustained, "op": op_name}


def render_curve(result: dict) -> str:
    lines = [f"saturation sweep: {result['op']} "
             f"(max sustained {result['maxSustainedTps']:.0f} tx/s)"]
    lines.append(f"{'rate':>8}{'tput':>10}{'ok%':>8}{'fail':>6}{'avg ms':>10}{'p95 ms':>10}")
    for p in result["curve"]:
        lines.append(f"{p['offeredRate']:>8.0f}{p['throughputTps']:>10.1f}"
                     f"{p['successRatio'] * 100:>8.2f}{p['failed']:>6}"
                     f"{p['latencyMs']['avg']:>10.1f}{p['latencyMs']['p95']:>10.1f}")
    return "\n".join(lines)
