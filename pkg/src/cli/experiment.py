"""Experiment CLI commands."""

import click

from src.bench.experiments import all_converged, build_specs, run_experiments
from src.bench.output import emit
from src.errors import RiemoptError

from .options import LINESEARCH_OPTION, build_config, experiment_options


def specs_from_params(command: str, params: dict) -> list:
    """Experiment specs for `run` (one method) or `compare` (both line-searches)."""
    try:
        return build_specs(
            params["problems"],
            params["n"],
            params["p"],
            params["seeds"],
            build_config(params),
            compare=command == "compare",
        )
    except RiemoptError as exc:
        raise click.UsageError(str(exc))


def _execute(ctx: click.Context, command: str, params: dict) -> None:
    specs = specs_from_params(command, params)
    try:
        rows = run_experiments(specs, workers=params["workers"])
        emit(rows, params["fmt"], params["out"])
    except (RiemoptError, OSError) as exc:
        click.echo(f"Error: {exc}", err=True)
        raise click.Abort()

    if not all_converged(rows):
        ctx.exit(2)


@click.command("run")
@experiment_options
@LINESEARCH_OPTION
@click.pass_context
def run_command(ctx, **params):
    """Run one line-search strategy on each instance."""
    _execute(ctx, "run", params)


@click.command()
@experiment_options
@click.pass_context
def compare(ctx, **params):
    """Run standard and modified Armijo on identical instances."""
    _execute(ctx, "compare", params)
