"""
Command-line entry point for the phase-space experiment harness
"""

import logging
import sys
from pathlib import Path
from typing import Optional

import click
from dotenv import load_dotenv

from .utils.config import EXIT_MISMATCH, EXIT_NUMERIC, EXIT_OK, EXIT_VALIDATION
from .utils.exceptions import (
    ConfigValidationError,
    MissingBaselineError,
    PhaseCoverError,
    VerificationMismatchError,
)

# Load environment variables from .env file
load_dotenv()


def exit_code_for(error: PhaseCoverError) -> int:
    if isinstance(error, ConfigValidationError):
        return EXIT_VALIDATION
    if isinstance(error, (VerificationMismatchError, MissingBaselineError)):
        return EXIT_MISMATCH
    return EXIT_NUMERIC


def _configure_logging(quiet: bool) -> None:
    logging.basicConfig(level=logging.WARNING if quiet else logging.INFO)


def _fail(error: PhaseCoverError) -> None:
    click.echo(f"Error: {error}", err=True)
    sys.exit(exit_code_for(error))


@click.group()
def main():
    """Discrete phase-space approximation experiments: certificates, norm equivalences, invariants."""


@main.command()
@click.option("--config", "config_path", required=True, help="Config JSON path or bundled fixture name")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False, path_type=Path),
              help="Artifact directory")
@click.option("--threads", type=int, default=None, help="Worker threads (PHASECOVER_THREADS overrides)")
@click.option("--quiet", is_flag=True, help="Only log warnings")
def run(config_path: str, out_dir: Path, threads: Optional[int], quiet: bool):
    """Run an experiment and write certificate, equivalence, invariant and plot-data artifacts."""
    from .core.orchestrator import ExperimentOrchestrator

    _configure_logging(quiet)
    try:
        summary = ExperimentOrchestrator(threads).run(config_path, out_dir)
    except PhaseCoverError as e:
        _fail(e)
        return
    status = "all invariants passed" if summary.invariants_passed else "some invariants failed"
    click.echo(f"Wrote {len(summary.files)} files to {summary.out_dir} (config {summary.config_hash}, {status})")
    sys.exit(EXIT_OK)


@main.command()
@click.option("--config", "config_path", required=True, help="Config JSON path or bundled fixture name")
@click.option("--baseline", required=True, type=click.Path(path_type=Path), help="Baseline artifact directory")
@click.option("--threads", type=int, default=None, help="Worker threads (PHASECOVER_THREADS overrides)")
@click.option("--quiet", is_flag=True, help="Only log warnings")
def verify(config_path: str, baseline: Path, threads: Optional[int], quiet: bool):
    """Recompute an experiment and diff its CSV tables against a baseline directory."""
    from .core.orchestrator import ExperimentOrchestrator

    _configure_logging(quiet)
    try:
        tables = ExperimentOrchestrator(threads).verify(config_path, baseline)
    except PhaseCoverError as e:
        _fail(e)
        return
    click.echo(f"Baseline {baseline} matches ({', '.join(tables)})")
    sys.exit(EXIT_OK)


@main.command("list-fixtures")
def list_fixtures():
    """List the bundled experiment fixtures."""
    from .data.fixtures import FIXTURES, get_available_fixtures

    for name in get_available_fixtures():
        click.echo(f"{name}: {FIXTURES[name]}")


if __name__ == "__main__":
    main()
