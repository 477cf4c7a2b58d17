"""
Newton's method on a manifold with Armijo backtracking.

Each iteration builds the clamped Newton operator at x_k, solves
H_k[p_k] = -grad f(x_k) in tangent coordinates, runs the configured
line-search along p_k and moves to the accepted retracted point.
"""

import dataclasses
import logging
from typing import Optional

import numpy as np

from src.errors import DegenerateInputError, LineSearchFailure, SolverError, UsageError
from src.geometry.manifolds import Manifold, ManifoldPoint, TangentVector, check_point
from src.linalg.kernels import norm, solve_spd
from src.optim.linesearch import get_linesearch
from src.optim.models import EvalCounters, IterationRecord, SolverConfig, SolverTrace
from src.problems.objectives import NewtonOperator, Objective, build_newton_operator, riemannian_gradient

logger = logging.getLogger(__name__)

NEWTON_RESIDUAL_TOL = 1e-9


def newton_direction(op: NewtonOperator, g: TangentVector) -> TangentVector:
    """Solve H p = -g in the tangent basis of op; p is a descent direction."""
    if g.base is not op.base and not np.array_equal(g.base.coords, op.base.coords):
        raise UsageError("gradient and Newton operator live at different points")

    B = op.basis
    c = B.T @ g.coords
    try:
        y = solve_spd(op.matrix, -c)
    except DegenerateInputError as exc:
        raise SolverError(f"Newton system could not be solved: {exc}") from exc

    residual = norm(op.matrix @ y + c)
    if residual > NEWTON_RESIDUAL_TOL * max(1.0, norm(c)):
        logger.warning("Newton residual %.3e above %.0e", residual, NEWTON_RESIDUAL_TOL)
    return TangentVector(B @ y, g.base)


def steepest_direction(g: TangentVector) -> TangentVector:
    return TangentVector(-g.coords, g.base)


def run(obj: Objective, M: Manifold, x0: ManifoldPoint, config: Optional[SolverConfig] = None) -> SolverTrace:
    """
    Iterate until ||grad f|| <= tol_grad, max_iter steps, or a line-search failure.

    The trace holds one record per visited iterate. The last record carries
    no step (ell_k and alpha_k are None); on line-search failure its counters
    include the work spent by the failed search.
    """
    config = config or SolverConfig()
    if not isinstance(x0, ManifoldPoint) or x0.manifold != M or not check_point(M, x0):
        raise UsageError(f"starting point is not a feasible point of {M}")

    search = get_linesearch(config.linesearch_kind)
    curvature = config.hessian_model == "riemannian"

    counters = EvalCounters()
    records = []
    x = x0
    f = obj.value(x.coords)
    status = "max_iter"

    for k in range(config.max_iter + 1):
        g = riemannian_gradient(obj, M, x)
        counters += EvalCounters(gradient_evals=1)
        grad_norm = g.norm()

        if grad_norm <= config.tol_grad:
            status = "converged"
            records.append(IterationRecord(k, f, grad_norm, None, None, counters))
            break
        if k == config.max_iter:
            records.append(IterationRecord(k, f, grad_norm, None, None, counters))
            break

        if config.direction_kind == "newton":
            op = build_newton_operator(obj, M, x, config.nu, config.rho, curvature=curvature)
            counters += EvalCounters(hessian_builds=1)
            p = newton_direction(op, g)
        else:
            p = steepest_direction(g)

        try:
            outcome = search(obj, M, x, p, g, config.params, f0=f)
        except LineSearchFailure as exc:
            counters += exc.counters or EvalCounters()
            records.append(IterationRecord(k, f, grad_norm, None, None, counters, direction_norm=p.norm()))
            logger.warning("iteration %d: %s (|grad| = %.3e)", k, exc, grad_norm)
            status = "linesearch_failed"
            break

        counters += outcome.counters_delta
        records.append(
            IterationRecord(
                k,
                f,
                grad_norm,
                outcome.ell_k,
                outcome.alpha_k,
                counters,
                direction_norm=p.norm(),
                slope=outcome.slope,
                exact_rejections=outcome.exact_rejections,
            )
        )
        logger.debug(
            "k=%d f=%.17g |grad|=%.3e ell=%d alpha=%.3g", k, f, grad_norm, outcome.ell_k, outcome.alpha_k
        )
        x, f = outcome.next_point, outcome.f_next

    logger.info(
        "%s %s on %s: %s after %d steps, f=%.17g, %s",
        config.method,
        obj.name,
        M,
        status,
        len(records) - 1,
        f,
        counters.as_dict(),
    )
    return SolverTrace(records=records, status=status, final_point=x)


def run_steepest(obj: Objective, M: Manifold, x0: ManifoldPoint, config: Optional[SolverConfig] = None) -> SolverTrace:
    """Steepest-descent baseline: same loop and line-searches with p = -grad f."""
    config = config or SolverConfig()
    return run(obj, M, x0, dataclasses.replace(config, direction_kind="steepest"))


def theoretical_delta(nu: float, tau: float, L: float) -> float:
    """Step size below which the ambient Armijo test always holds: min(1, 2 nu (1 - tau) / L)."""
    if not nu > 0.0:
        raise UsageError(f"nu must be positive, got {nu}")
    if not (0.0 < tau < 1.0):
        raise UsageError(f"tau must lie in (0, 1), got {tau}")
    if not L > 0.0:
        raise UsageError(f"L must be positive, got {L}")
    return min(1.0, 2.0 * nu * (1.0 - tau) / L)
