"""Synchronous vs background anchoring: mean upload duration by file count.

Builds one gateway per mode (same injected per-file anchor delay, which
stands in for a slow remote pin service) and times N multipart step
uploads per cell. Background anchoring keeps the request duration flat
in file count; inline anchoring grows linearly.
"""

from __future__ import annotations

import io
import json
import statistics
import time

from .report import Sample


def _upload_once(client, vin: str, headers: dict, n_files: int, nonce: str) -> float:
    files = [
        ("files", (f"{nonce}-{i}.jpg",
                   io.BytesIO(f"payload-{nonce}-{i}".encode() * 64), "image/jpeg"))
        for i in range(n_files)
    ]
    data = {"metadata": json.dumps({"title": f"bench {nonce}",
                                    "activityType": "other"})}
    t0 = time.perf_counter()
    response = client.post(f"/classics/{vin}/restorations", data=data,
                           files=files, headers=headers)
    elapsed = time.perf_counter() - t0
    if response.status_code >= 400:
        raise RuntimeError(f"upload failed: {response.status_code} {response.text[:200]}")
    return elapsed


def measure_mode(client, new_vin, headers: dict, file_counts: list[int],
                 requests_per_cell: int, mode_name: str,
                 samples: list[Sample] | None = None) -> dict[int, dict]:
    """*new_vin*() must return a registered vehicle not used before; a
    fresh vehicle per upload keeps background anchor transactions from
    conflicting with the next upload's step transaction."""
    out = {}
    for n_files in file_counts:
        durations = []
        for i in range(requests_per_cell):
            vin = new_vin()
            elapsed = _upload_once(client, vin, headers, n_files,
                                   f"{mode_name}-{n_files}-{i}")
            durations.append(elapsed)
            if samples is not None:
                samples.append(Sample(int(time.time() * 1000),
                                      f"upload_{n_files}f_{mode_name}",
                                      elapsed * 1000, "ok"))
        out[n_files] = {
            "meanS": round(statistics.mean(durations), 3),
            "minS": round(min(durations), 3),
            "maxS": round(max(durations), 3),
            "requests": requests_per_cell,
        }
    return out


def compare_anchor_modes(make_client, file_counts: list[int],
                         requests_per_cell: int = 30) -> dict:
    """*make_client*(mode) yields (client, new_vin, headers, cleanup) for
    a gateway running in that anchor mode."""
    table: dict[str, dict] = {}
    for mode in ("sync", "async"):
        client, new_vin, headers, cleanup = make_client(mode)
        try:
            table[mode] = measure_mode(client, new_vin, headers, file_counts,
                                       requests_per_cell, mode)
        finally:
            cleanup()
    return {"fileCounts": list(file_counts), "modes": table,
            "requestsPerCell": requests_per_cell}


def render_comparison(result: dict) -> str:
    lines = ["mean upload duration (s) by file count: inline vs background anchoring",
             f"({result['requestsPerCell']} requests per cell; injected per-file "
             "anchor delay models the remote store)"]
    lines.append(f"{'files':>6}{'sync':>10}{'async':>10}")
    for n in result["fileCounts"]:
        sync_mean = result["modes"]["sync"][n]["meanS"]
        async_mean = result["modes"]["async"][n]["meanS"]
        lines.append(f"{n:>6}{sync_mean:>10.2f}{async_mean:>10.2f}")
    return "\n".join(lines)
