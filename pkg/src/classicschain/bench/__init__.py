from .report import Sample, aggregate, read_csv, render_summary, write_csv
from .workload import WorkloadSpec, run_workload
from .targets import LedgerDirectTarget, RestTarget
from .sweep import sweep_saturation
from .anchors import compare_anchor_modes

__all__ = [
    "LedgerDirectTarget",
    "RestTarget",
    "Sample",
    "WorkloadSpec",
    "aggregate",
    "compare_anchor_modes",
    "read_csv",
    "render_summary",
    "run_workload",
    "sweep_saturation",
    "write_csv",
]
