"""
Main CLI entry point for QOKD.

Each subcommand runs one experiment use case and writes its report.
"""

import logging
from typing import Any, Callable

import click
from rich.console import Console
from rich.logging import RichHandler

from qokd import __version__
from qokd.core.limits import DEFAULT_RESTART_CAP
from qokd.exchange.strategies import ALICE_STRATEGIES, BOB_STRATEGIES
from qokd.extraction.schemes import SCHEME_TAGS
from qokd.application.experiments import ATTACK_MODELS
from qokd.infrastructure.transports import TRANSPORTS

console = Console()
error_console = Console(stderr=True)

LOG_LEVELS = {0: logging.WARNING, 1: logging.INFO}


def _configure_logging(verbose: int) -> None:
    logging.basicConfig(
        level=LOG_LEVELS.get(verbose, logging.DEBUG),
        format="%(message)s",
        handlers=[RichHandler(console=error_console, show_path=verbose > 1)],
        force=True,
    )


def common_options(fn: Callable) -> Callable:
    """Options shared by every experiment subcommand; None leaves the config value alone."""
    options = [
        click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
                     help="TOML file with experiment parameters (flags override it)"),
        click.option("--seed", type=int, help="Master seed"),
        click.option("--runs", type=click.IntRange(min=1), help="Number of runs"),
        click.option("--out", "output", help="Report file (default: stdout)"),
        click.option("--format", "report_format", type=click.Choice(["json", "csv"]),
                     help="Report format (default: json)"),
        click.option("--scheme", type=click.Choice(list(SCHEME_TAGS)), help="Extraction scheme"),
        click.option("--n", "n", type=click.IntRange(min=1), help="Oblivious key length N"),
        click.option("--k", "k", type=click.IntRange(min=1), help="Window / combination size k"),
        click.option("--m", "m", type=click.IntRange(min=1), help="Raw key length M (generalized scheme)"),
        click.option("--r", "r", type=click.IntRange(min=1), help="Number of raw keys to combine"),
        click.option("--p", "p", type=click.FloatRange(0.0, 1.0), help="Conclusive probability"),
        click.option("--workers", type=click.IntRange(min=1), help="Worker processes"),
        click.option("--quiet", "-q", is_flag=True, default=False, help="Suppress the summary table"),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def _invoke(ctx: click.Context, experiment: str, config_path: str | None, **overrides: Any) -> None:
    from qokd.cli.commands import experiment_command

    quiet = overrides.pop("quiet", False) or ctx.obj["quiet"]
    if "report_format" in overrides:
        overrides["format"] = overrides.pop("report_format")
    exit_code = experiment_command(
        experiment=experiment,
        config_path=config_path,
        overrides=overrides,
        verbose=ctx.obj["verbose"],
        quiet=quiet,
        console=ctx.obj["console"],
        error_console=ctx.obj["error_console"],
    )
    ctx.exit(exit_code)


@click.group()
@click.version_option(version=__version__, prog_name="qokd")
@click.option("--verbose", "-v", count=True, help="Log progress (-v) or debug detail (-vv) to stderr")
@click.option("--quiet", "-q", is_flag=True, help="Suppress the summary table")
@click.pass_context
def cli(ctx: click.Context, verbose: int, quiet: bool) -> None:
    """
    QOKD - Quantum Oblivious Key Distribution simulator

    Runs SARG04 oblivious key sessions and reproduces the protocol's
    statistics. Reports are JSON or CSV; the same config and seed give
    the same report.

    Examples:

    \b
        qokd run --runs 20 --n 10000 --k 6 --out runs.json
        qokd run --transport tcp --seed 7
        qokd table1 --runs 100 --format csv --out table1.csv
        qokd table2
        qokd dilution --r 3 --known 400 --trials 200
        qokd attack --model bob-bias --n 100000 --runs 20
    """
    _configure_logging(verbose)
    ctx.ensure_object(dict)
    ctx.obj["verbose"] = verbose
    ctx.obj["quiet"] = quiet
    ctx.obj["console"] = console
    ctx.obj["error_console"] = error_console


@cli.command()
@common_options
@click.option("--transport", type=click.Choice(list(TRANSPORTS)), help="Message transport (default: inproc)")
@click.option("--port", type=click.IntRange(0, 65535), help="TCP port (0 picks a free one)")
@click.option("--alice", type=click.Choice(list(ALICE_STRATEGIES)), help="Alice's measurement strategy")
@click.option("--bob", type=click.Choice(list(BOB_STRATEGIES)), help="Bob's state strategy")
@click.option("--restart-cap", type=click.IntRange(min=0),
              help=f"Restarts allowed before aborting (default: {DEFAULT_RESTART_CAP})")
@click.option("--max-raw-qubits", type=click.IntRange(min=1), help="Raw-key memory budget per session")
@click.pass_context
def run(ctx: click.Context, config_path: str | None, **options: Any) -> None:
    """
    Run full oblivious-transfer sessions.

    Each run establishes r oblivious keys, retrieves one database bit and
    checks it against Bob's plaintext. Exits with 3 if any session aborted.

    Examples:

    \b
        qokd run --runs 50 --out runs.json
        qokd run --scheme generalized --n 1000 --k 8 --m 32
        qokd run --restart-cap 0 --n 10 --k 12
    """
    _invoke(ctx, "run", config_path, **options)


@cli.command()
@common_options
@click.pass_context
def table1(ctx: click.Context, config_path: str | None, **options: Any) -> None:
    """
    Survivor counts of the modified scheme.

    Without --n/--k, runs the full grid of (N, k) columns for p = 1/4 and
    the USD conclusive probability. -v adds linear-window averages.

    Examples:

    \b
        qokd table1 --runs 100
        qokd table1 --n 100000 --k 7 --p 0.25
    """
    _invoke(ctx, "table1", config_path, **options)


@cli.command()
@common_options
@click.pass_context
def table2(ctx: click.Context, config_path: str | None, **options: Any) -> None:
    """
    Exact statistics of the generalized scheme.

    For each N and k, finds the smallest M with binom(M, k) >= N and
    reports the conditional average and the chance of no known bit.

    Examples:

    \b
        qokd table2
        qokd table2 --n 100000 --k 6
        qokd table2 --m 24 --k 6 --n 100000
    """
    _invoke(ctx, "table2", config_path, **options)


@cli.command()
@common_options
@click.option("--known", type=click.IntRange(min=1), help="Known bits per key")
@click.option("--trials", type=click.IntRange(min=1), help="Number of trials")
@click.pass_context
def dilution(ctx: click.Context, config_path: str | None, **options: Any) -> None:
    """
    Known bits surviving the combination of r keys.

    Examples:

    \b
        qokd dilution --n 100000 --known 400 --r 2
        qokd dilution --r 4 --trials 50
    """
    _invoke(ctx, "dilution", config_path, **options)


@cli.command()
@common_options
@click.option("--model", type=click.Choice(list(ATTACK_MODELS)), help="Attack to simulate")
@click.pass_context
def attack(ctx: click.Context, config_path: str | None, **options: Any) -> None:
    """
    Cheating strategies against the honest baseline.

    alice-usd compares Alice's known bits under unambiguous discrimination
    with honest measurement. bob-bias counts conclusive streaks in the two
    halves of a split-state attack and runs the detector on it.

    Examples:

    \b
        qokd attack --model alice-usd --n 100000 --runs 20
        qokd attack --model bob-bias --n 100000 --k 6
    """
    _invoke(ctx, "attack", config_path, **options)


def main() -> None:
    """Entry point for the CLI."""
    cli(obj={})


if __name__ == "__main__":
    main()
