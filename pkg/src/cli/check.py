"""Check CLI command."""

import json
from dataclasses import asdict

import click

from src.bench.checks import SUITES, run_checks


@click.command()
@click.option("--only", multiple=True, type=click.Choice(list(SUITES)), help="Run just this suite (repeatable).")
@click.option("--format", "fmt", type=click.Choice(["table", "json"]), default="table", show_default=True)
@click.pass_context
def check(ctx, only, fmt):
    """Run the property suites and report pass/fail."""
    results = run_checks(list(only))

    if fmt == "json":
        click.echo(json.dumps([asdict(r) for r in results], indent=2))
    else:
        click.echo(f"{'Check':<24} {'Result':<8} {'Time':>7}  Detail")
        click.echo("-" * 90)
        for r in results:
            verdict = "PASS" if r.passed else "FAIL"
            click.echo(f"{r.name:<24} {verdict:<8} {r.seconds:>6.2f}s  {r.detail}")

        failed = sum(1 for r in results if not r.passed)
        click.echo("\n" + "-" * 90)
        click.echo(f"Passed: {len(results) - failed}  |  Failed: {failed}")

    if not all(r.passed for r in results):
        ctx.exit(2)
