"""Main CLI entry point."""

import logging
import sys
from typing import Optional

import click

from src.config import load_defaults
from src.errors import RiemoptError

from .check import check
from .experiment import compare, run_command, specs_from_params

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
EXPERIMENT_COMMANDS = ["run", "compare"]


def configure_logging(verbose: int) -> None:
    """Base level from RIEMOPT_LOG_LEVEL, lowered one step per -v."""
    base = logging.getLevelName(load_defaults().log_level)
    level = max(logging.DEBUG, base - 10 * verbose)
    logging.basicConfig(format=LOG_FORMAT, stream=sys.stderr)
    logging.getLogger("src").setLevel(level)


@click.group()
@click.version_option(version="0.1.0")
@click.option("-v", "--verbose", count=True, help="More log output on stderr (-v INFO, -vv DEBUG).")
def cli(verbose):
    """Riemannian Armijo Bench - Newton's method with standard vs. modified Armijo line-searches."""
    configure_logging(verbose)


# Register commands
cli.add_command(run_command)
cli.add_command(compare)
cli.add_command(check)


def parse_cli(argv) -> list:
    """
    Resolve `run` / `compare` arguments into experiment specs without running them.

    Raises click.UsageError (or another ClickException) on malformed flags.
    """
    args = list(argv)
    while args and args[0] in ("-v", "--verbose", "-vv", "-vvv"):
        args.pop(0)
    if not args or args[0] not in EXPERIMENT_COMMANDS:
        raise click.UsageError(f"expected one of: {', '.join(EXPERIMENT_COMMANDS)}")

    name, rest = args[0], args[1:]
    command = cli.get_command(click.Context(cli), name)
    with command.make_context(name, rest) as ctx:
        return specs_from_params(name, ctx.params)


def main(argv: Optional[list] = None) -> int:
    """
    Run the CLI and return the process exit status.

    0 when every run converged (or every check passed), 2 when a run stopped
    at max_iter or on a line-search failure (or a check failed), 1 for usage,
    configuration and I/O errors.
    """
    args = sys.argv[1:] if argv is None else list(argv)
    try:
        rv = cli.main(args, prog_name="riemopt", standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.Abort:
        click.echo("Aborted!", err=True)
        return 1
    except (RiemoptError, OSError) as exc:
        click.echo(f"Error: {exc}", err=True)
        return 1
    return rv if isinstance(rv, int) else 0


if __name__ == "__main__":
    sys.exit(main())
