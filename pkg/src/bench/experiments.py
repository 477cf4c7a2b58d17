"""Build experiment matrices and run them."""

import dataclasses
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable

from src.bench.models import ComparisonRow, ExperimentSpec
from src.errors import UsageError
from src.optim.models import LINESEARCH_KINDS, SolverConfig
from src.optim.solver import run
from src.problems.generators import canonical_problem, generate

logger = logging.getLogger(__name__)


def build_specs(
    problems: Iterable[str],
    n: int,
    p: int,
    seeds: Iterable[int],
    config: SolverConfig,
    compare: bool = False,
) -> list:
    """
    One spec per (problem, seed, method), in that nesting order.

    With compare=True each instance is paired with both line-searches;
    p only applies to brockett_stiefel and is 1 for the other problems.
    """
    configs = (
        [dataclasses.replace(config, linesearch_kind=kind) for kind in LINESEARCH_KINDS] if compare else [config]
    )
    specs = []
    for problem in problems:
        problem = canonical_problem(problem)
        columns = p if problem == "brockett_stiefel" else 1
        for seed in seeds:
            for cfg in configs:
                specs.append(ExperimentSpec(problem=problem, n=n, p=columns, seed=seed, config=cfg))
    if not specs:
        raise UsageError("no experiments to run")
    return specs


def run_experiment(spec: ExperimentSpec) -> ComparisonRow:
    instance = generate(spec.problem, spec.n, spec.p, spec.seed)

    started = time.perf_counter()
    trace = run(instance.objective, instance.manifold, instance.x0, spec.config)
    elapsed = time.perf_counter() - started

    last = trace.records[-1]
    counters = trace.counters
    row = ComparisonRow(
        spec_id=spec.spec_id,
        method=spec.method,
        problem=spec.problem,
        n=spec.n,
        p=spec.p,
        seed=spec.seed,
        status=trace.status,
        iterations=trace.iterations,
        f_final=last.f_value,
        grad_norm_final=last.grad_norm,
        ambient_f_evals=counters.ambient_f_evals,
        retraction_evals=counters.retraction_evals,
        retracted_f_evals=counters.retracted_f_evals,
        gradient_evals=counters.gradient_evals,
        hessian_builds=counters.hessian_builds,
        wall_time_s=elapsed,
    )
    if row.status == "converged":
        logger.info("%s %s: converged in %d iterations (%.2fs)", row.spec_id, row.method, row.iterations, elapsed)
    else:
        logger.warning("%s %s: %s after %d iterations", row.spec_id, row.method, row.status, row.iterations)
    return row


def run_experiments(specs: list, workers: int = 1) -> list:
    """Run every spec; rows come back in spec order whatever the worker count."""
    if workers < 1:
        raise UsageError(f"workers must be >= 1, got {workers}")
    if workers == 1 or len(specs) <= 1:
        return [run_experiment(spec) for spec in specs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_experiment, specs))


def all_converged(rows: list) -> bool:
    return all(row.status == "converged" for row in rows)
