#!/usr/bin/env python3
"""Compare both line-searches on every bundled problem, seeds 1..5, and write one CSV."""

import sys
from pathlib import Path

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.bench.experiments import build_specs, run_experiments
from src.bench.output import emit
from src.config import load_defaults
from src.optim.models import LineSearchParams, SolverConfig
from src.problems.generators import PROBLEMS

SEEDS = [1, 2, 3, 4, 5]
SIZES = {"rayleigh_sphere": (100, 1), "brockett_stiefel": (10, 3), "quadratic_euclidean": (100, 1)}


def main(out: str = "compare_matrix.csv") -> None:
    defaults = load_defaults()
    config = SolverConfig(
        tol_grad=defaults.tol_grad,
        max_iter=defaults.max_iter,
        nu=defaults.nu,
        rho=defaults.rho,
        params=LineSearchParams(beta=defaults.beta, tau=defaults.tau, ell_max=defaults.ell_max),
    )

    rows = []
    for problem in PROBLEMS:
        n, p = SIZES[problem]
        rows.extend(run_experiments(build_specs([problem], n, p, SEEDS, config, compare=True)))
    emit(rows, "csv", out)
    print(f"Wrote {len(rows)} rows to {out}")


if __name__ == "__main__":
    main(*sys.argv[1:2])
