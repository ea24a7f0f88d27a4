"""
CLI commands using the application layer use cases.

Every subcommand goes through experiment_command: load the config (file
first, flags on top), run the use case, write the report and show a
summary.
"""

import logging
import warnings
from typing import Any

from rich.console import Console

from qokd.core.exceptions import ConfigurationError, QOKDError, ValidationError
from qokd.application.experiments import make_experiment
from qokd.infrastructure.config import load_experiment_config
from qokd.infrastructure.reports import write_report
from qokd.cli.output import render_summary

__all__ = ["EXIT_OK", "EXIT_ERROR", "EXIT_VALIDATION", "EXIT_ABORT", "experiment_command"]

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VALIDATION = 2
EXIT_ABORT = 3


def experiment_command(
    experiment: str,
    config_path: str | None,
    overrides: dict[str, Any],
    verbose: int,
    quiet: bool,
    console: Console,
    error_console: Console,
) -> int:
    """
    Execute one experiment subcommand.

    The report goes to --out when given, otherwise to stdout. The Rich
    summary is shown only when the report went to a file, so stdout stays
    machine-readable.

    Returns:
        Exit code (0 = success, 2 = invalid parameters, 3 = a session aborted)
    """
    try:
        config = load_experiment_config(experiment, config_path, **overrides)
    except (ValidationError, ConfigurationError) as e:
        error_console.print(f"[red]Configuration error:[/red] {e}")
        return EXIT_VALIDATION

    logger.info("running %s with seed %d", experiment, config.seed)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            report = make_experiment(config).execute()
    except ValidationError as e:
        error_console.print(f"[red]Invalid parameters:[/red] {e}")
        return EXIT_VALIDATION
    except QOKDError as e:
        error_console.print(f"[red]Error:[/red] {e}")
        return EXIT_ERROR

    for w in caught:
        error_console.print(f"[yellow]Warning:[/yellow] {w.message}")

    try:
        write_report(report, config.output, config.format)
    except OSError as e:
        error_console.print(f"[red]Cannot write report:[/red] {e}")
        return EXIT_ERROR

    to_file = config.output not in (None, "-")
    if to_file and not quiet:
        render_summary(report, console, verbose=verbose > 0)
        console.print(f"[dim]Report written to {config.output}[/dim]")

    if report.exit_code == EXIT_ABORT:
        reasons = report.aggregates.get("abort_reasons") or {}
        detail = ", ".join(f"{k}={v}" for k, v in reasons.items())
        error_console.print(f"[yellow]Sessions aborted:[/yellow] {detail or 'see report'}")
    return report.exit_code
