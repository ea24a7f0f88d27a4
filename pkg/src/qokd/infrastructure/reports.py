"""
Report writers: JSON (the full report) and CSV (the per-record table).
"""

import json
import sys
from pathlib import Path
from typing import Any

import numpy as np

from qokd.analytics.export import (
    ATTACK_COLUMNS,
    DILUTION_COLUMNS,
    RUN_COLUMNS,
    TABLE1_COLUMNS,
    TABLE2_COLUMNS,
    csv_text,
)
from qokd.core.exceptions import ValidationError
from qokd.domain.entities import ExperimentReport

__all__ = ["REPORT_COLUMNS", "render_report", "write_report"]

REPORT_COLUMNS: dict[str, tuple[str, ...]] = {
    "run": RUN_COLUMNS,
    "table1": TABLE1_COLUMNS,
    "table2": TABLE2_COLUMNS,
    "dilution": DILUTION_COLUMNS,
    "attack": ATTACK_COLUMNS,
}


def _json_default(value: Any) -> Any:
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def render_report(report: ExperimentReport, fmt: str = "json", include_timing: bool = False) -> str:
    """
    Render a report as text.

    JSON keys are sorted so that two runs of the same config give identical
    output once timing is left out.
    """
    if fmt == "json":
        return json.dumps(report.to_dict(include_timing), indent=2, sort_keys=True, default=_json_default) + "\n"
    if fmt == "csv":
        return csv_text(report.records, REPORT_COLUMNS[report.experiment])
    raise ValidationError(f"Unknown report format: {fmt}", parameter="format", value=fmt)


def write_report(report: ExperimentReport, out: str | Path | None, fmt: str = "json", include_timing: bool = True) -> None:
    """Write to out, or to stdout when out is None or '-'."""
    text = render_report(report, fmt, include_timing)
    if out is None or str(out) == "-":
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="") as f:
        f.write(text)
