"""
Unit tests for the Newton solver and the steepest-descent baseline.

=== MENTOR NOTES ===

A trace holds one record per visited iterate. Records 0..K-1 carry the
step that left the iterate; the last record carries none (ell_k and
alpha_k are None), so a run that converges after one step has two
records and trace.iterations == 1.

The two norm inequalities checked along every trace follow from the
clamped spectrum [nu, rho] of H_k:
  ||p_k|| <= ||g_k|| / nu        (H_k^-1 has norm at most 1/nu)
  ||g_k|| <= rho ||p_k||         (H_k has norm at most rho)

===================
"""

import logging

import numpy as np
import pytest

from src.errors import UsageError
from src.geometry.manifolds import Euclidean, Sphere, check_point
from src.linalg.kernels import inner, norm
from src.linalg.prng import SplitMix64
from src.optim import solver
from src.optim.models import EvalCounters, LineSearchParams, SolverConfig
from src.optim.solver import newton_direction, run, run_steepest, steepest_direction, theoretical_delta
from src.problems.generators import generate
from src.problems.objectives import (
    Objective,
    build_newton_operator,
    make_quadratic_euclidean,
    make_rayleigh_sphere,
    riemannian_gradient,
)


def _flat_plateau():
    """f = 1 everywhere but with a non-zero 'gradient': no step can ever pass Armijo."""
    return Objective(
        name="plateau",
        value=lambda y: 1.0,
        euclid_grad=lambda y: np.array([1.0, 0.0]),
        euclid_hess_vec=lambda y, u: np.zeros(2),
    )


class TestNewtonDirection:
    """Tests for newton_direction."""

    def test_identity_operator_gives_negative_gradient(self):
        obj, M = make_quadratic_euclidean([1.0, 1.0]), Euclidean(2)
        x = M.point([0.3, -0.7])
        g = riemannian_gradient(obj, M, x)

        p = newton_direction(build_newton_operator(obj, M, x), g)

        np.testing.assert_array_equal(p.coords, -g.coords)

    def test_diagonal_quadratic_by_hand(self, quadratic24):
        obj, M = quadratic24
        x = M.point([1.0, 1.0])
        g = riemannian_gradient(obj, M, x)

        p = newton_direction(build_newton_operator(obj, M, x), g)

        np.testing.assert_array_equal(g.coords, [2.0, 4.0])
        np.testing.assert_array_equal(p.coords, [-1.0, -1.0])

    def test_residual_and_descent_on_random_operator(self, rng, random_symmetric):
        obj, M = make_rayleigh_sphere(random_symmetric(rng, 12)), Sphere(12)
        stream = SplitMix64(17)
        for _ in range(10):
            x = M.random_point(stream)
            g = riemannian_gradient(obj, M, x)
            op = build_newton_operator(obj, M, x, nu=1e-3, rho=1e6, curvature=True)

            p = newton_direction(op, g)

            H = op.basis @ op.matrix @ op.basis.T
            assert norm(H @ p.coords + g.coords) <= 1e-9 * max(1.0, g.norm())
            assert inner(g.coords, p.coords) <= -1e-3 * p.norm() ** 2
            assert M.tangent_residual(x.coords, p.coords) <= 1e-12 * max(1.0, p.norm())

    def test_gradient_from_other_point_raises(self, quadratic24):
        obj, M = quadratic24
        op = build_newton_operator(obj, M, M.point([1.0, 1.0]))
        g = riemannian_gradient(obj, M, M.point([2.0, 0.0]))

        with pytest.raises(UsageError):
            newton_direction(op, g)

    def test_steepest_direction_negates(self, quadratic24):
        obj, M = quadratic24
        g = riemannian_gradient(obj, M, M.point([1.0, -1.0]))

        np.testing.assert_array_equal(steepest_direction(g).coords, [-2.0, 4.0])


class TestRun:
    """Tests for run."""

    def test_quadratic_converges_in_one_newton_step(self, quadratic24):
        # Arrange
        obj, M = quadratic24
        config = SolverConfig(linesearch_kind="modified", params=LineSearchParams(beta=0.5, tau=0.5))

        # Act
        trace = run(obj, M, M.point([1.0, 1.0]), config)

        # Assert
        assert trace.status == "converged"
        assert trace.iterations == 1
        assert len(trace.records) == 2
        assert (trace.records[0].ell_k, trace.records[0].alpha_k) == (0, 1.0)
        assert (trace.records[1].ell_k, trace.records[1].alpha_k) == (None, None)
        np.testing.assert_array_equal(trace.final_point.coords, [0.0, 0.0])
        assert trace.counters == EvalCounters(
            ambient_f_evals=1, retraction_evals=1, retracted_f_evals=1, gradient_evals=2, hessian_builds=1
        )

    def test_stationary_start_exits_immediately(self):
        obj, M = make_rayleigh_sphere(np.diag([1.0, 3.0])), Sphere(2)

        trace = run(obj, M, M.point([0.0, 1.0]))

        assert trace.status == "converged"
        assert trace.iterations == 0
        assert len(trace.records) == 1
        assert trace.counters == EvalCounters(gradient_evals=1)

    def test_max_iter_stops_with_partial_trace(self):
        instance = generate("rayleigh_sphere", 20, 1, 4)

        trace = run(instance.objective, instance.manifold, instance.x0, SolverConfig(max_iter=2, tol_grad=1e-300))

        assert trace.status == "max_iter"
        assert trace.iterations == 2
        assert len(trace.records) == 3
        assert trace.records[-1].alpha_k is None

    def test_linesearch_failure_keeps_partial_trace(self, caplog):
        M = Euclidean(2)

        with caplog.at_level(logging.WARNING, logger="src.optim.solver"):
            trace = run(_flat_plateau(), M, M.point([0.0, 0.0]), SolverConfig(linesearch_kind="modified"))

        assert trace.status == "linesearch_failed"
        assert len(trace.records) == 1
        assert trace.records[0].ell_k is None
        assert trace.counters.ambient_f_evals == 61
        assert trace.counters.retraction_evals == 0
        assert "found no step" in caplog.text

    def test_rayleigh_reaches_smallest_eigenvalue(self):
        instance = generate("rayleigh_sphere", 50, 1, 8)

        trace = run(instance.objective, instance.manifold, instance.x0)

        assert trace.status == "converged"
        assert abs(trace.records[-1].f_value - instance.objective.optimal_value) <= 1e-8
        assert trace.records[-1].grad_norm <= 1e-8

    @pytest.mark.parametrize("kind", ["standard", "modified"])
    def test_trace_invariants(self, kind):
        instance = generate("rayleigh_sphere", 30, 1, 1)
        config = SolverConfig(linesearch_kind=kind)

        trace = run(instance.objective, instance.manifold, instance.x0, config)

        steps = [r for r in trace.records if r.alpha_k is not None]
        assert steps
        for current, following in zip(trace.records, trace.records[1:]):
            assert following.f_value <= current.f_value + config.params.tau * current.alpha_k * current.slope
        for r in steps:
            assert r.direction_norm <= r.grad_norm / config.nu * (1.0 + 1e-9)
            assert r.grad_norm <= config.rho * r.direction_norm + 1e-9
        counters = [r.counters_cumulative for r in trace.records]
        assert all(
            later.retraction_evals >= earlier.retraction_evals and later.gradient_evals > earlier.gradient_evals
            for earlier, later in zip(counters, counters[1:])
        )
        assert check_point(instance.manifold, trace.final_point)

    @pytest.mark.parametrize("kind", ["standard", "modified"])
    @pytest.mark.parametrize("family, n, p", [("rayleigh_sphere", 30, 1), ("brockett_stiefel", 10, 3)])
    def test_every_iterate_is_feasible(self, monkeypatch, family, n, p, kind):
        # Arrange
        instance = generate(family, n, p, 3)
        accepted = []
        search = solver.get_linesearch(kind)

        def recording(*args, **kwargs):
            outcome = search(*args, **kwargs)
            accepted.append(outcome.next_point)
            return outcome

        monkeypatch.setattr(solver, "get_linesearch", lambda _kind: recording)

        # Act
        trace = run(instance.objective, instance.manifold, instance.x0, SolverConfig(linesearch_kind=kind))

        # Assert
        assert trace.status == "converged"
        assert len(accepted) == trace.iterations
        assert all(check_point(instance.manifold, x, 1e-10) for x in accepted)

    @pytest.mark.parametrize("kind", ["standard", "modified"])
    @pytest.mark.parametrize("n, p, seed", [(10, 3, 7), (6, 2, 1), (20, 4, 9)])
    def test_brockett_converges_below_rounding_level_of_f(self, n, p, seed, kind):
        # The last steps decrease f by far less than the rounding error of f itself
        instance = generate("brockett_stiefel", n, p, seed)

        trace = run(
            instance.objective,
            instance.manifold,
            instance.x0,
            SolverConfig(linesearch_kind=kind, max_iter=100),
        )

        assert trace.status == "converged"
        assert trace.records[-1].grad_norm <= 1e-8
        assert abs(trace.records[-1].f_value - instance.objective.optimal_value) <= 1e-8

    @pytest.mark.parametrize("direction", ["newton", "steepest"])
    def test_euclidean_trajectories_identical_across_line_searches(self, direction):
        instance = generate("quadratic_euclidean", 6, 1, 2)

        traces = [
            run(
                instance.objective,
                instance.manifold,
                instance.x0,
                SolverConfig(linesearch_kind=kind, direction_kind=direction),
            )
            for kind in ["standard", "modified"]
        ]

        standard, modified = ([(r.f_value, r.ell_k, r.alpha_k) for r in t.records] for t in traces)
        assert standard == modified
        np.testing.assert_array_equal(traces[0].final_point.coords, traces[1].final_point.coords)

    def test_infeasible_start_raises(self):
        obj, M = make_rayleigh_sphere(np.diag([1.0, 3.0])), Sphere(2)

        with pytest.raises(UsageError):
            run(obj, M, Sphere(3).point([1.0, 0.0, 0.0]))

    def test_completion_is_logged(self, quadratic24, caplog):
        obj, M = quadratic24

        with caplog.at_level(logging.INFO, logger="src.optim.solver"):
            run(obj, M, M.point([1.0, 1.0]))

        assert "converged after 1 steps" in caplog.text


class TestRunSteepest:
    """Tests for run_steepest."""

    def test_isotropic_quadratic_matches_newton(self):
        obj, M = make_quadratic_euclidean([1.0, 1.0]), Euclidean(2)
        x0 = M.point([3.0, -4.0])

        newton = run(obj, M, x0)
        steepest = run_steepest(obj, M, x0)

        def path(trace):
            return [(r.f_value, r.grad_norm, r.ell_k, r.alpha_k) for r in trace.records]

        assert path(newton) == path(steepest)
        assert steepest.counters.hessian_builds == 0

    def test_needs_at_least_as_many_steps_as_newton(self):
        instance = generate("rayleigh_sphere", 9, 1, 3)

        newton = run(instance.objective, instance.manifold, instance.x0)
        steepest = run_steepest(instance.objective, instance.manifold, instance.x0)

        assert newton.status == "converged"
        assert steepest.iterations >= newton.iterations

    def test_stationary_start_exits_immediately(self):
        obj, M = make_quadratic_euclidean([1.0, 2.0]), Euclidean(2)

        trace = run_steepest(obj, M, M.point([0.0, 0.0]))

        assert trace.status == "converged"
        assert trace.iterations == 0


class TestSolverConfig:
    """Tests for SolverConfig validation."""

    def test_method_label(self):
        assert SolverConfig().method == "newton-modified"
        assert SolverConfig(linesearch_kind="standard", direction_kind="steepest").method == "steepest-standard"

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"tol_grad": 0.0},
            {"max_iter": 0},
            {"nu": 0.0},
            {"nu": 2.0, "rho": 1.0},
            {"linesearch_kind": "wolfe"},
            {"direction_kind": "bfgs"},
            {"hessian_model": "exact"},
        ],
    )
    def test_invalid_values_raise_usage_error(self, kwargs):
        with pytest.raises(UsageError):
            SolverConfig(**kwargs)


class TestTheoreticalDelta:
    """Tests for theoretical_delta."""

    def test_capped_at_one(self):
        assert theoretical_delta(1.0, 0.5, 1.0) == 1.0

    def test_large_lipschitz_constant(self):
        assert theoretical_delta(1.0, 0.5, 100.0) == pytest.approx(0.01)

    def test_decreases_as_tau_approaches_one(self):
        deltas = [theoretical_delta(1.0, tau, 100.0) for tau in [0.5, 0.9, 0.99, 0.999999]]

        assert all(later < earlier for earlier, later in zip(deltas, deltas[1:]))
        assert deltas[-1] > 0.0

    @pytest.mark.parametrize("args", [(0.0, 0.5, 1.0), (1.0, 1.0, 1.0), (1.0, 0.5, 0.0)])
    def test_invalid_arguments_raise_usage_error(self, args):
        with pytest.raises(UsageError):
            theoretical_delta(*args)

    def test_steps_below_delta_pass_ambient_test(self, rng):
        obj, M = make_quadratic_euclidean([2.0, 100.0]), Euclidean(2)
        tau, beta = 0.5, 0.5
        for _ in range(20):
            x = M.point(rng.standard_normal(2))
            g = riemannian_gradient(obj, M, x)
            p = steepest_direction(g)
            delta = theoretical_delta(1.0, tau, obj.lipschitz_bound)
            f0 = obj.value(x.coords)
            slope = inner(g.coords, p.coords)

            for ell in range(31):
                alpha = beta**ell
                if alpha <= delta:
                    assert obj.value(x.coords + alpha * p.coords) <= f0 + tau * alpha * slope
