"""
CSV export for analytics rows.

Column sets are fixed per table so that files from different runs line up.
"""

import csv
from io import StringIO
from typing import Any, Iterable, Sequence, TextIO

from qokd.core.limits import sanitize_csv_cell

__all__ = [
    "TABLE1_COLUMNS",
    "TABLE2_COLUMNS",
    "DILUTION_COLUMNS",
    "ATTACK_COLUMNS",
    "RUN_COLUMNS",
    "write_csv",
    "csv_text",
]

TABLE1_COLUMNS = (
    "N", "k", "p", "runs", "average", "std_error", "at_least_one",
    "expected", "z", "linear_average", "printed_average", "printed_at_least_one",
)
TABLE2_COLUMNS = (
    "N", "M", "k", "p", "nobit", "nobit_percent", "cond_avg",
    "printed_nobit_percent", "printed_cond_avg", "note",
)
DILUTION_COLUMNS = ("trial", "r", "random_shift", "optimal_shift", "greedy", "greedy_shifts")
ATTACK_COLUMNS = (
    "model", "segment", "N", "k", "runs", "measured", "expected", "baseline",
    "std_error", "z", "ratio", "expected_ratio", "flag_rate",
)
RUN_COLUMNS = (
    "run", "seed", "status", "reason", "restarts", "rounds", "db_index",
    "retrieved_bit", "expected_bit", "correct", "messages", "digest",
)


def _cell(value: Any) -> Any:
    if value is None:
        return ""
    if isinstance(value, str):
        return sanitize_csv_cell(value)
    return value


def write_csv(rows: Iterable[dict[str, Any]], columns: Sequence[str], stream: TextIO) -> None:
    """Write rows with exactly the given columns; missing cells are empty."""
    writer = csv.DictWriter(stream, fieldnames=list(columns), extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({c: _cell(row.get(c)) for c in columns})


def csv_text(rows: Iterable[dict[str, Any]], columns: Sequence[str]) -> str:
    output = StringIO()
    write_csv(rows, columns, output)
    return output.getvalue()
