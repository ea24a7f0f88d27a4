"""
Output formatters for CLI.
"""

from rich.console import Console
from rich.table import Table

from qokd.domain.entities import ExperimentReport

__all__ = ["render_summary", "SUMMARY_COLUMNS", "VERBOSE_COLUMNS"]

# (record key, header, style) per experiment
SUMMARY_COLUMNS: dict[str, list[tuple[str, str, str]]] = {
    "run": [
        ("run", "Run", "dim"),
        ("status", "Status", ""),
        ("reason", "Reason", "yellow"),
        ("restarts", "Restarts", ""),
        ("db_index", "b", "dim"),
        ("retrieved_bit", "Bit", "cyan"),
        ("correct", "Correct", ""),
    ],
    "table1": [
        ("N", "N", "cyan"),
        ("k", "k", "cyan"),
        ("p", "p", ""),
        ("average", "Average", "green"),
        ("std_error", "SE", "dim"),
        ("at_least_one", "At least one", "green"),
        ("expected", "N·p^k", ""),
        ("z", "z", ""),
        ("printed_average", "Printed", "dim"),
        ("printed_at_least_one", "Printed ≥1", "dim"),
    ],
    "table2": [
        ("N", "N", "cyan"),
        ("M", "M", "cyan"),
        ("k", "k", "cyan"),
        ("cond_avg", "Average", "green"),
        ("nobit", "No bit", ""),
        ("nobit_percent", "No bit %", "green"),
        ("printed_cond_avg", "Printed avg", "dim"),
        ("printed_nobit_percent", "Printed %", "dim"),
    ],
    "attack": [
        ("model", "Model", "cyan"),
        ("segment", "Segment", ""),
        ("k", "k", "cyan"),
        ("measured", "Measured", "green"),
        ("expected", "Expected", ""),
        ("baseline", "Honest", "dim"),
        ("z", "z", ""),
        ("ratio", "Ratio", "green"),
        ("expected_ratio", "Expected ratio", ""),
        ("flag_rate", "Flag rate", "yellow"),
    ],
}

VERBOSE_COLUMNS: dict[str, list[tuple[str, str, str]]] = {
    "table1": [("linear_average", "Linear avg", "dim")],
    "run": [("digest", "Digest", "dim")],
}

# run reports can be long; the summary shows the head only
MAX_SUMMARY_ROWS = 20


def _format(value: object) -> str:
    match value:
        case None:
            return "-"
        case bool():
            return "[green]yes[/green]" if value else "[red]no[/red]"
        case float():
            if value == 0 or 1e-3 <= abs(value) < 1e6:
                return f"{value:.4g}" if abs(value) < 1 else f"{value:,.2f}"
            return f"{value:.3e}"
        case int():
            return f"{value:,}" if abs(value) >= 10_000 else str(value)
        case _:
            return str(value)


def _render_aggregates(report: ExperimentReport, console: Console) -> None:
    table = Table(show_header=True, header_style="bold magenta", title="Aggregates")
    table.add_column("Quantity", style="cyan")
    table.add_column("Value", style="green")
    for key, value in report.aggregates.items():
        if isinstance(value, dict):
            value = ", ".join(f"{k}={v}" for k, v in value.items()) or "-"
        table.add_row(key, _format(value))
    console.print(table)


def render_summary(report: ExperimentReport, console: Console, verbose: bool = False) -> None:
    """Render a report as Rich tables: records (when tabular), aggregates, notes."""
    columns = list(SUMMARY_COLUMNS.get(report.experiment, []))
    if verbose:
        columns += VERBOSE_COLUMNS.get(report.experiment, [])

    if columns and report.records:
        table = Table(show_header=True, header_style="bold magenta", title=report.experiment)
        for _, header, style in columns:
            table.add_column(header, style=style or None, justify="right")
        rows = report.records if verbose else report.records[:MAX_SUMMARY_ROWS]
        for record in rows:
            table.add_row(*(_format(record.get(key)) for key, _, _ in columns))
        console.print(table)
        hidden = len(report.records) - len(rows)
        if hidden > 0:
            console.print(f"[dim]... {hidden} more records (use -v or --out)[/dim]")

    _render_aggregates(report, console)
    for note in report.notes:
        console.print(f"[yellow]Note:[/yellow] {note}")
    console.print(
        f"\n[dim]qokd {report.tool_version} · {len(report.records)} records"
        f" · {report.wall_clock_seconds or 0:.2f}s[/dim]"
    )
