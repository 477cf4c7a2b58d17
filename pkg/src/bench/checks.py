"""
Property suites behind the `check` command.

Each suite runs at desk scale (a few seconds) and reports pass/fail with a
one-line detail. The same properties are exercised at full scale by the
test suite.
"""

import dataclasses
import logging
import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from src.errors import UsageError
from src.geometry.manifolds import (
    Euclidean,
    Manifold,
    ManifoldPoint,
    Sphere,
    Stiefel,
    TangentVector,
    ambient_move,
    retract,
)
from src.linalg.kernels import inner, max_norm, norm, sym_eig, thin_qr
from src.linalg.prng import SplitMix64
from src.optim.linesearch import approx_error_ratio, armijo_modified, armijo_standard
from src.optim.models import LineSearchParams, SolverConfig
from src.optim.solver import newton_direction, run, steepest_direction, theoretical_delta
from src.problems.generators import generate
from src.problems.objectives import (
    Objective,
    build_newton_operator,
    make_brockett_stiefel,
    make_quadratic_euclidean,
    make_rayleigh_sphere,
    riemannian_gradient,
)

logger = logging.getLogger(__name__)

CHECK_SEED = 20240601


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


SUITES: dict[str, Callable[[], tuple]] = {}


def suite(name: str):
    def register(fn):
        SUITES[name] = fn
        return fn

    return register


# ============== Instrumentation ==============


class CountingObjective:
    """Wraps an Objective and counts evaluations of f, direct or in difference form."""

    def __init__(self, inner_obj: Objective):
        self.inner = inner_obj
        self.value_calls = 0
        change = self._change if inner_obj.change is not None else None
        self.objective = dataclasses.replace(inner_obj, value=self._value, change=change)

    def _value(self, x):
        self.value_calls += 1
        return self.inner.value(x)

    def _change(self, x, y):
        self.value_calls += 1
        return self.inner.change(x, y)


class CountingManifold(Manifold):
    """Delegates to another manifold and counts retractions."""

    def __init__(self, inner_manifold: Manifold):
        self.inner = inner_manifold
        self.kind = inner_manifold.kind
        self.retractions = 0

    def __str__(self) -> str:
        return f"Counting[{self.inner}]"

    @property
    def ambient_dim(self):
        return self.inner.ambient_dim

    @property
    def intrinsic_dim(self):
        return self.inner.intrinsic_dim

    def point_residual(self, x):
        return self.inner.point_residual(x)

    def tangent_residual(self, x, v):
        return self.inner.tangent_residual(x, v)

    def project(self, x, u):
        return self.inner.project(x, u)

    def retract(self, x, v):
        self.retractions += 1
        return self.inner.retract(x, v)

    def weingarten(self, x, u, egrad):
        return self.inner.weingarten(x, u, egrad)

    def normal_offset(self, x):
        return self.inner.normal_offset(x)

    def sample(self, stream):
        return self.inner.sample(stream)

    def projector_matrix(self, x):
        return self.inner.projector_matrix(x)

    def adopt(self, x: ManifoldPoint) -> ManifoldPoint:
        return ManifoldPoint(x.coords, self)


def unit_tangent(M: Manifold, x: ManifoldPoint, stream: SplitMix64) -> TangentVector:
    v = M.random_tangent(x, stream)
    return v.scaled(1.0 / v.norm())


def positive_definite(stream: SplitMix64, n: int) -> np.ndarray:
    """I + G G^T / n: symmetric with spectrum in [1, ~5]."""
    G = stream.standard_normal((n, n))
    return np.eye(n) + (G @ G.T) / n


def _small_instances(stream: SplitMix64) -> list:
    return [
        (make_rayleigh_sphere(positive_definite(stream, 10) - 3.0 * np.eye(10)), Sphere(10)),
        (make_brockett_stiefel(positive_definite(stream, 8) - 3.0 * np.eye(8), np.diag([1.0, 2.0])), Stiefel(8, 2)),
        (make_quadratic_euclidean([1.0, 4.0, 9.0, 25.0]), Euclidean(4)),
    ]


# ============== Suites ==============


@suite("retraction_axioms")
def check_retraction_axioms(points: int = 20) -> tuple:
    stream = SplitMix64(CHECK_SEED)
    failures = 0
    worst_center = 0.0
    for M in [Sphere(2), Sphere(10), Sphere(100), Stiefel(4, 2), Stiefel(10, 3)]:
        for _ in range(points):
            x = M.random_point(stream)
            center = max_norm(retract(M, x, M.zero_tangent(x)).coords - x.coords)
            worst_center = max(worst_center, center)
            v = unit_tangent(M, x, stream)
            errors = [norm((retract(M, x, v.scaled(t)).coords - x.coords) / t - v.coords) for t in (1e-3, 1e-5)]
            if center > 1e-14 or 50.0 * errors[1] > errors[0]:
                failures += 1
    return failures == 0, f"{failures} failures over {5 * points} points, worst |R_x(0) - x| = {worst_center:.1e}"


@suite("gradient_consistency")
def check_gradient_consistency(pairs: int = 10) -> tuple:
    stream = SplitMix64(CHECK_SEED + 1)
    failures = 0
    for obj, M in _small_instances(stream):
        for _ in range(pairs):
            x = M.random_point(stream)
            p = unit_tangent(M, x, stream)
            g = riemannian_gradient(obj, M, x)
            derivative = inner(g.coords, p.coords)
            if abs(derivative - inner(obj.euclid_grad(x.coords), p.coords)) > 1e-10:
                failures += 1
                continue
            f0 = obj.value(x.coords)
            errors = [
                abs((obj.value(retract(M, x, p.scaled(t)).coords) - f0) / t - derivative) for t in (1e-3, 1e-5)
            ]
            if errors[1] > 0.05 * errors[0] + 1e-8:
                failures += 1
    return failures == 0, f"{failures} failures over {3 * pairs} (x, p) pairs"


def _orthonormal_pair(M: Stiefel, stream: SplitMix64) -> tuple:
    Q, _ = thin_qr(stream.standard_normal((M.n, 2 * M.p)))
    x = M.point(Q[:, : M.p].ravel())
    return x, TangentVector(Q[:, M.p:].ravel(), x)


@suite("approx_error_ratio")
def check_approx_error_ratio() -> tuple:
    stream = SplitMix64(CHECK_SEED + 2)
    alphas = [10.0**-j for j in range(1, 6)]
    sphere = Sphere(10)
    stiefel = Stiefel(10, 3)

    curved = []
    x = sphere.random_point(stream)
    curved.append((make_rayleigh_sphere(positive_definite(stream, 10)), sphere, x, unit_tangent(sphere, x, stream)))
    x, v = _orthonormal_pair(stiefel, stream)
    curved.append((make_brockett_stiefel(positive_definite(stream, 10), np.diag([1.0, 2.0, 3.0])), stiefel, x, v))

    failures = 0
    for obj, M, x, p in curved:
        ratios = [approx_error_ratio(obj, M, x, p, a) for a in alphas]
        if any(later > 1.1 * earlier for earlier, later in zip(ratios, ratios[1:])):
            failures += 1

    flat = Euclidean(4)
    quad = make_quadratic_euclidean([1.0, 2.0, 3.0, 4.0])
    x = flat.random_point(stream)
    p = unit_tangent(flat, x, stream)
    if any(approx_error_ratio(quad, flat, x, p, a) != 0.0 for a in alphas):
        failures += 1
    return failures == 0, f"{failures} non-monotone or non-zero sequences out of 3"


@suite("step_bound")
def check_step_bound(starts: int = 50, tau: float = 0.5, beta: float = 0.5) -> tuple:
    stream = SplitMix64(CHECK_SEED + 3)
    obj = make_quadratic_euclidean([2.0, 100.0])
    M = Euclidean(2)
    violations = 0
    trials = 0
    for _ in range(starts):
        x = M.random_point(stream)
        g = riemannian_gradient(obj, M, x)
        f0 = obj.value(x.coords)
        op = build_newton_operator(obj, M, x)
        nu_newton = float(sym_eig(op.matrix)[0][0])
        for p, nu in [(newton_direction(op, g), nu_newton), (steepest_direction(g), 1.0)]:
            delta = theoretical_delta(nu, tau, obj.lipschitz_bound)
            slope = inner(g.coords, p.coords)
            for ell in range(31):
                alpha = beta**ell
                if alpha > delta:
                    continue
                trials += 1
                if not obj.value(ambient_move(x, alpha, p)) <= f0 + tau * alpha * slope:
                    violations += 1
    return violations == 0, f"{violations} cheap-test rejections below delta over {trials} trial steps"


@suite("euclidean_equivalence")
def check_euclidean_equivalence(seeds: int = 20) -> tuple:
    mismatches = 0
    for seed in range(1, seeds + 1):
        instance = generate("quadratic_euclidean", 8, 1, seed)
        for direction in ["newton", "steepest"]:
            traces = {
                kind: run(
                    instance.objective,
                    instance.manifold,
                    instance.x0,
                    SolverConfig(linesearch_kind=kind, direction_kind=direction, max_iter=200),
                )
                for kind in ["standard", "modified"]
            }
            standard, modified = traces["standard"], traces["modified"]
            steps = [[(r.ell_k, r.alpha_k, r.f_value) for r in t.records] for t in (standard, modified)]
            same_points = np.array_equal(standard.final_point.coords, modified.final_point.coords)
            same_work = modified.counters.ambient_f_evals == standard.counters.retracted_f_evals
            if steps[0] != steps[1] or not same_points or not same_work:
                mismatches += 1
    return mismatches == 0, f"{mismatches} mismatching pairs over {2 * seeds} runs"


@suite("convergence")
def check_convergence(seeds: int = 3, n: int = 30) -> tuple:
    failures = []
    for problem, dims in [("rayleigh_sphere", (n, 1)), ("brockett_stiefel", (10, 3))]:
        for seed in range(1, seeds + 1):
            instance = generate(problem, dims[0], dims[1], seed)
            trace = run(instance.objective, instance.manifold, instance.x0, SolverConfig(max_iter=100))
            gap = abs(trace.records[-1].f_value - instance.objective.optimal_value)
            if trace.status != "converged" or gap > 1e-8:
                failures.append(f"{problem}/s{seed}: {trace.status}, gap {gap:.1e}")
    detail = "; ".join(failures) if failures else f"{2 * seeds} runs converged to the optimal value"
    return not failures, detail


def armijo_holds(trace, tau: float) -> bool:
    """Re-check f_{k+1} <= f_k + tau alpha_k <g_k, p_k> along a trace."""
    for current, following in zip(trace.records, trace.records[1:]):
        if not following.f_value <= current.f_value + tau * current.alpha_k * current.slope:
            return False
    return True


@suite("retraction_savings")
def check_retraction_savings(seeds: int = 5, n: int = 30, tau: float = 0.9) -> tuple:
    worse = 0
    strict = 0
    unsound = 0
    for seed in range(1, seeds + 1):
        instance = generate("rayleigh_sphere", n, 1, seed)
        traces = {}
        for kind in ["standard", "modified"]:
            config = SolverConfig(linesearch_kind=kind, params=LineSearchParams(tau=tau))
            traces[kind] = run(instance.objective, instance.manifold, instance.x0, config)
            if not armijo_holds(traces[kind], tau):
                unsound += 1
        spent = {kind: t.counters.retraction_evals for kind, t in traces.items()}
        if spent["modified"] > spent["standard"]:
            worse += 1
        elif spent["modified"] < spent["standard"]:
            strict += 1
    passed = worse == 0 and strict > 0 and unsound == 0
    return passed, f"modified retracted less on {strict}/{seeds} seeds, more on {worse}; {unsound} unsound traces"


def _count_linesearch(strategy, obj, M, x, p, params) -> tuple:
    counting_obj = CountingObjective(obj)
    counting_m = CountingManifold(M)
    cx = counting_m.adopt(x)
    g = riemannian_gradient(obj, counting_m, cx)
    f0 = obj.value(x.coords)
    outcome = strategy(counting_obj.objective, counting_m, cx, TangentVector(p.coords, cx), g, params, f0=f0)
    return outcome, counting_obj.value_calls, counting_m.retractions


@suite("counter_exactness")
def check_counter_exactness(pairs: int = 10) -> tuple:
    stream = SplitMix64(CHECK_SEED + 4)
    discrepancies = 0
    calls = 0
    for obj, M in _small_instances(stream):
        for _ in range(pairs):
            x = M.random_point(stream)
            g = riemannian_gradient(obj, M, x)
            p = TangentVector(-g.coords, x)
            for params in [LineSearchParams(), LineSearchParams(beta=0.5, tau=0.9)]:
                outcome, f_calls, retractions = _count_linesearch(armijo_standard, obj, M, x, p, params)
                c = outcome.counters_delta
                expected = outcome.ell_k + 1
                consistent = c.retraction_evals == c.retracted_f_evals == retractions == f_calls == expected
                if not consistent or c.ambient_f_evals:
                    discrepancies += 1

                outcome, f_calls, retractions = _count_linesearch(armijo_modified, obj, M, x, p, params)
                c = outcome.counters_delta
                f0 = obj.value(x.coords)
                slope = inner(g.coords, p.coords)
                cheap_passes = sum(
                    obj.value(ambient_move(x, params.beta**ell, p)) <= f0 + params.tau * params.beta**ell * slope
                    for ell in range(outcome.ell_k + 1)
                )
                if not (
                    c.ambient_f_evals == outcome.ell_k + 1
                    and c.retraction_evals == c.retracted_f_evals == retractions == cheap_passes
                    and f_calls == c.ambient_f_evals + c.retracted_f_evals
                ):
                    discrepancies += 1
                calls += 2
    return discrepancies == 0, f"{discrepancies} discrepancies over {calls} line-searches"


def run_checks(names: Optional[list] = None) -> list:
    """Run the named suites (all of them by default) in registration order."""
    selected = list(SUITES) if not names else list(names)
    unknown = [name for name in selected if name not in SUITES]
    if unknown:
        raise UsageError(f"unknown check(s): {', '.join(unknown)}")

    results = []
    for name in selected:
        started = time.perf_counter()
        passed, detail = SUITES[name]()
        elapsed = time.perf_counter() - started
        if not passed:
            logger.warning("check %s failed: %s", name, detail)
        results.append(CheckResult(name=name, passed=bool(passed), detail=detail, seconds=elapsed))
    return results
