"""
Armijo backtracking on a manifold.

Both strategies try alpha = beta^ell for ell = 0, 1, 2, ... and accept the
first step whose retracted point satisfies

    f(R_x(alpha p)) <= f(x) + tau * alpha * <g, p>

The modified strategy first checks the same inequality at the ambient point
x + alpha p and only retracts when that cheap test holds.

Near a minimizer tau * alpha * <g, p> drops below the rounding error of f
itself. Objectives that provide a difference form `change(x, y)` are
therefore tested on f(y) - f(x) directly, with stored coordinates moved
back onto the manifold to first order (see objective_change).
"""

import logging
from typing import Callable, Optional

import numpy as np

from src.errors import LineSearchFailure, UsageError
from src.geometry.manifolds import (
    FEASIBILITY_TOL,
    Manifold,
    ManifoldPoint,
    TangentVector,
    ambient_move,
    check_tangent,
    retract,
)
from src.linalg.kernels import inner, max_norm
from src.optim.models import EvalCounters, LineSearchOutcome, LineSearchParams, Trial
from src.problems.objectives import Objective

logger = logging.getLogger(__name__)


def _descent_slope(M: Manifold, x: ManifoldPoint, p: TangentVector, g: TangentVector) -> float:
    if not check_tangent(M, x, p, FEASIBILITY_TOL * max(1.0, max_norm(p.coords))):
        raise UsageError("search direction is not tangent at x")
    slope = inner(g.coords, p.coords)
    if not slope < 0.0:
        raise UsageError(f"search direction is not a descent direction: <g, p> = {slope:.3e}")
    return slope


def _offset_value(obj: Objective, M: Manifold, z: np.ndarray) -> float:
    # f(z) - f(closest manifold point to z), first order
    return inner(obj.euclid_grad(z), M.normal_offset(z))


def _sufficient_decrease(
    obj: Objective,
    M: Manifold,
    x: np.ndarray,
    y: np.ndarray,
    f0: float,
    step: float,
    base_offset: float,
    on_manifold: bool,
) -> tuple[bool, float]:
    """Armijo test f(y) - f(x) <= step; returns (passed, f(y))."""
    if obj.change is None:
        f_y = obj.value(y)
        return f_y <= f0 + step, f_y
    delta = obj.change(x, y) + base_offset
    if on_manifold:
        delta -= _offset_value(obj, M, y)
    return delta <= step, f0 + delta


def objective_change(obj: Objective, M: Manifold, x: ManifoldPoint, y, on_manifold: bool = True) -> float:
    """
    f(y) - f(x) as the line-searches see it.

    Stored coordinates of a point sit a rounding error off the manifold, and
    the normal part of the Euclidean gradient turns that error into a change
    of f around 1e-15. x, and y when on_manifold is set, are taken back to
    the manifold to first order before differencing. Objectives without a
    difference form fall back to value(y) - value(x).
    """
    y = y.coords if isinstance(y, ManifoldPoint) else np.asarray(y, dtype=float).ravel()
    if obj.change is None:
        return obj.value(y) - obj.value(x.coords)
    base_offset = _offset_value(obj, M, x.coords)
    _, f_y = _sufficient_decrease(obj, M, x.coords, y, 0.0, 0.0, base_offset, on_manifold)
    return f_y


def armijo_standard(
    obj: Objective,
    M: Manifold,
    x: ManifoldPoint,
    p: TangentVector,
    g: TangentVector,
    params: LineSearchParams,
    f0: Optional[float] = None,
) -> LineSearchOutcome:
    """Retract and evaluate f at every trial step."""
    slope = _descent_slope(M, x, p, g)
    if f0 is None:
        f0 = obj.value(x.coords)
    base_offset = _offset_value(obj, M, x.coords) if obj.change is not None else 0.0

    retractions = 0
    trials = []
    for ell in range(params.ell_max + 1):
        alpha = params.beta**ell
        step = params.tau * alpha * slope
        y = retract(M, x, p.scaled(alpha))
        retractions += 1
        passed, f_y = _sufficient_decrease(obj, M, x.coords, y.coords, f0, step, base_offset, True)
        trials.append(Trial(ell=ell, alpha=alpha, cheap_passed=None, exact_passed=passed))
        if passed:
            return LineSearchOutcome(
                ell_k=ell,
                alpha_k=alpha,
                next_point=y,
                f_next=f_y,
                counters_delta=EvalCounters(retraction_evals=retractions, retracted_f_evals=retractions),
                slope=slope,
                trials=tuple(trials),
            )
        logger.debug("standard: ell=%d rejected (f=%.17g, bound=%.17g)", ell, f_y, f0 + step)

    raise LineSearchFailure(
        f"standard Armijo found no step within ell_max={params.ell_max}",
        counters=EvalCounters(retraction_evals=retractions, retracted_f_evals=retractions),
        ell=params.ell_max,
    )


def armijo_modified(
    obj: Objective,
    M: Manifold,
    x: ManifoldPoint,
    p: TangentVector,
    g: TangentVector,
    params: LineSearchParams,
    f0: Optional[float] = None,
) -> LineSearchOutcome:
    """
    Two-stage test: f(x + alpha p) first, the retraction only if that passes.

    A step that passes the cheap test but fails the exact one is rejected
    and backtracking continues at ell + 1 with the cheap test again.
    """
    slope = _descent_slope(M, x, p, g)
    if f0 is None:
        f0 = obj.value(x.coords)
    base_offset = _offset_value(obj, M, x.coords) if obj.change is not None else 0.0

    ambient_evals = 0
    retractions = 0
    exact_rejections = 0
    trials = []
    for ell in range(params.ell_max + 1):
        alpha = params.beta**ell
        step = params.tau * alpha * slope

        ambient_evals += 1
        cheap, _ = _sufficient_decrease(obj, M, x.coords, ambient_move(x, alpha, p), f0, step, base_offset, False)
        if not cheap:
            trials.append(Trial(ell=ell, alpha=alpha, cheap_passed=False, exact_passed=None))
            logger.debug("modified: ell=%d rejected by the ambient test", ell)
            continue

        y = retract(M, x, p.scaled(alpha))
        retractions += 1
        passed, f_y = _sufficient_decrease(obj, M, x.coords, y.coords, f0, step, base_offset, True)
        if passed:
            trials.append(Trial(ell=ell, alpha=alpha, cheap_passed=True, exact_passed=True))
            return LineSearchOutcome(
                ell_k=ell,
                alpha_k=alpha,
                next_point=y,
                f_next=f_y,
                counters_delta=EvalCounters(
                    ambient_f_evals=ambient_evals,
                    retraction_evals=retractions,
                    retracted_f_evals=retractions,
                ),
                slope=slope,
                trials=tuple(trials),
                exact_rejections=exact_rejections,
            )
        exact_rejections += 1
        trials.append(Trial(ell=ell, alpha=alpha, cheap_passed=True, exact_passed=False))
        logger.debug("modified: ell=%d passed the ambient test, rejected after retraction", ell)

    raise LineSearchFailure(
        f"modified Armijo found no step within ell_max={params.ell_max}",
        counters=EvalCounters(
            ambient_f_evals=ambient_evals,
            retraction_evals=retractions,
            retracted_f_evals=retractions,
        ),
        ell=params.ell_max,
    )


LINESEARCHES: dict[str, Callable[..., LineSearchOutcome]] = {
    "standard": armijo_standard,
    "modified": armijo_modified,
}


def get_linesearch(kind: str) -> Callable[..., LineSearchOutcome]:
    try:
        return LINESEARCHES[kind]
    except KeyError:
        raise UsageError(f"unknown line-search {kind!r} (expected one of {', '.join(LINESEARCHES)})")


def approx_error_ratio(obj: Objective, M: Manifold, x: ManifoldPoint, p: TangentVector, alpha: float) -> float:
    """E(alpha) / alpha with E(alpha) = |f(x + alpha p) - f(R_x(alpha p))|."""
    off_manifold = obj.value(ambient_move(x, alpha, p))
    on_manifold = obj.value(retract(M, x, p.scaled(alpha)).coords)
    return abs(off_manifold - on_manifold) / alpha
