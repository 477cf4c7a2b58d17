"""
Full-scale convergence and cost runs.

=== MENTOR NOTES ===

These tests run the solver on the sizes the benchmark is meant for, so
they take tens of seconds and carry the `slow` marker:

    pytest -m "not slow"      # quick loop while developing
    pytest                    # everything

Why the modified line-search can only save retractions here
-----------------------------------------------------------
The Rayleigh quotient is homogeneous of degree 2, so with R_x(v) =
(x + v) / |x + v| and tangent p:

    f(x + alpha p) = (1 + alpha^2 |p|^2) f(R_x(alpha p))

Whenever the Armijo bound is negative, a retracted point that passes
also passes the ambient test. The two strategies then accept the same
steps, and every ambient rejection is a retraction the standard search
had to pay for.

===================
"""

import pytest

from src.bench.checks import armijo_holds, run_checks
from src.bench.experiments import build_specs, run_experiments
from src.optim.models import LineSearchParams, SolverConfig
from src.optim.solver import run
from src.problems.generators import generate

pytestmark = pytest.mark.slow

SEEDS = range(21, 31)


@pytest.mark.parametrize("seed", SEEDS)
def test_rayleigh_sphere_99_converges_to_smallest_eigenvalue(seed):
    instance = generate("rayleigh_sphere", 99, 1, seed)

    trace = run(instance.objective, instance.manifold, instance.x0, SolverConfig(max_iter=100))

    assert trace.status == "converged"
    assert abs(trace.records[-1].f_value - instance.objective.optimal_value) <= 1e-8


@pytest.mark.parametrize("seed", range(1, 11))
def test_brockett_stiefel_10_3_reaches_optimal_value(seed):
    instance = generate("brockett_stiefel", 10, 3, seed)

    trace = run(instance.objective, instance.manifold, instance.x0, SolverConfig(max_iter=100))

    assert trace.status == "converged"
    assert abs(trace.records[-1].f_value - instance.objective.optimal_value) <= 1e-8


def test_modified_line_search_saves_retractions():
    # Arrange
    config = SolverConfig(params=LineSearchParams(tau=0.9))
    specs = build_specs(["rayleigh_sphere"], 99, 1, SEEDS, config, compare=True)

    # Act
    rows = run_experiments(specs)

    # Assert
    standard, modified = rows[0::2], rows[1::2]
    assert [r.method for r in standard] == ["newton-standard"] * len(SEEDS)
    assert all(m.retraction_evals <= s.retraction_evals for s, m in zip(standard, modified))
    assert any(m.retraction_evals < s.retraction_evals for s, m in zip(standard, modified))


@pytest.mark.parametrize("kind", ["standard", "modified"])
def test_every_accepted_step_satisfies_armijo(kind):
    config = SolverConfig(linesearch_kind=kind, params=LineSearchParams(tau=0.9))
    for seed in SEEDS:
        instance = generate("rayleigh_sphere", 99, 1, seed)

        trace = run(instance.objective, instance.manifold, instance.x0, config)

        assert armijo_holds(trace, 0.9)


def test_all_property_suites_pass():
    results = run_checks()

    assert [r.name for r in results if not r.passed] == []
