"""Options shared by the experiment commands."""

import click

from src.config import load_defaults
from src.errors import UsageError
from src.optim.models import DIRECTION_KINDS, HESSIAN_MODELS, LINESEARCH_KINDS, LineSearchParams, SolverConfig
from src.problems.generators import ALIASES, PROBLEMS

PROBLEM_CHOICES = PROBLEMS + list(ALIASES)
OUTPUT_FORMATS = ["csv", "json"]

OPEN_UNIT = click.FloatRange(0.0, 1.0, min_open=True, max_open=True)
POSITIVE = click.FloatRange(0.0, min_open=True)


def _default(name: str):
    # Resolved when the command runs, so .env / environment changes are picked up
    return lambda: getattr(load_defaults(), name)


EXPERIMENT_OPTIONS = [
    click.option(
        "--problem",
        "problems",
        multiple=True,
        default=["rayleigh_sphere"],
        show_default=True,
        type=click.Choice(PROBLEM_CHOICES, case_sensitive=False),
        help="Problem to run (repeatable).",
    ),
    click.option("--n", type=click.IntRange(min=1), default=50, show_default=True, help="Ambient dimension n."),
    click.option(
        "--p", type=click.IntRange(min=1), default=3, show_default=True, help="Stiefel columns (brockett only)."
    ),
    click.option(
        "--seed",
        "seeds",
        multiple=True,
        type=click.IntRange(min=0),
        default=[0],
        show_default=True,
        help="Instance seed (repeatable).",
    ),
    click.option("--beta", type=OPEN_UNIT, default=_default("beta"), help="Backtracking factor in (0, 1)."),
    click.option("--tau", type=OPEN_UNIT, default=_default("tau"), help="Sufficient-decrease constant in (0, 1)."),
    click.option("--tol", type=POSITIVE, default=_default("tol_grad"), help="Stop when |grad f| <= tol."),
    click.option("--max-iter", type=click.IntRange(min=1), default=_default("max_iter"), help="Iteration cap."),
    click.option("--ell-max", type=click.IntRange(min=1), default=_default("ell_max"), help="Backtracking cap."),
    click.option("--nu", type=POSITIVE, default=_default("nu"), help="Lower clamp of the Newton operator."),
    click.option("--rho", type=POSITIVE, default=_default("rho"), help="Upper clamp of the Newton operator."),
    click.option(
        "--direction",
        type=click.Choice(DIRECTION_KINDS),
        default="newton",
        show_default=True,
        help="Search direction.",
    ),
    click.option(
        "--hessian",
        type=click.Choice(HESSIAN_MODELS),
        default="riemannian",
        show_default=True,
        help="Newton model: projected ambient Hessian or with the curvature term.",
    ),
    click.option("--format", "fmt", type=click.Choice(OUTPUT_FORMATS), default="csv", show_default=True),
    click.option("--out", default="-", show_default=True, help="Output file ('-' for stdout)."),
    click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True, help="Parallel runs."),
]

LINESEARCH_OPTION = click.option(
    "--linesearch",
    type=click.Choice(LINESEARCH_KINDS),
    default="modified",
    show_default=True,
    help="Line-search strategy.",
)


def experiment_options(fn):
    """Attach the shared experiment options to a command."""
    for option in reversed(EXPERIMENT_OPTIONS):
        fn = option(fn)
    return fn


def build_config(params: dict) -> SolverConfig:
    """SolverConfig from parsed options; inconsistent values become click usage errors."""
    try:
        return SolverConfig(
            tol_grad=params["tol"],
            max_iter=params["max_iter"],
            nu=params["nu"],
            rho=params["rho"],
            linesearch_kind=params.get("linesearch") or "modified",
            params=LineSearchParams(beta=params["beta"], tau=params["tau"], ell_max=params["ell_max"]),
            direction_kind=params["direction"],
            hessian_model=params["hessian"],
        )
    except UsageError as exc:
        raise click.UsageError(str(exc))
