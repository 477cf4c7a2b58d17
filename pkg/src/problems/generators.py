"""
Seeded benchmark instances.

Every instance is drawn from a single SplitMix64(seed) stream: the problem
matrices first, then the starting point. Two specs with the same problem,
dimensions and seed therefore share A (or D) and x0 bit for bit.

    rayleigh_sphere      A = (G + G^T)/2, G an n x n standard-normal draw
    brockett_stiefel     A as above, N = diag(1, 2, ..., p)
    quadratic_euclidean  D_i = 10^(2 u_i), u_i uniform in [0, 1)  (log-uniform in [1, 100])

Starting points: sphere = normalized normal vector; Stiefel = Q factor of
an n x p normal draw; Euclidean = normal vector.
"""

from dataclasses import dataclass

import numpy as np

from src.errors import UsageError
from src.geometry.manifolds import Euclidean, Manifold, ManifoldPoint, Sphere, Stiefel
from src.linalg.prng import SplitMix64
from src.problems.objectives import (
    Objective,
    make_brockett_stiefel,
    make_quadratic_euclidean,
    make_rayleigh_sphere,
)

PROBLEMS = ["rayleigh_sphere", "brockett_stiefel", "quadratic_euclidean"]

# Short names accepted on the command line
ALIASES = {
    "rayleigh": "rayleigh_sphere",
    "brockett": "brockett_stiefel",
    "quadratic": "quadratic_euclidean",
}


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    problem: str
    objective: Objective
    manifold: Manifold
    x0: ManifoldPoint


def canonical_problem(name: str) -> str:
    """Resolve a problem name or alias; raises UsageError for unknown names."""
    key = name.strip().lower()
    key = ALIASES.get(key, key)
    if key not in PROBLEMS:
        raise UsageError(f"unknown problem {name!r} (expected one of {', '.join(PROBLEMS)})")
    return key


def symmetric_normal(stream: SplitMix64, n: int) -> np.ndarray:
    G = stream.standard_normal((n, n))
    return 0.5 * (G + G.T)


def log_uniform_diagonal(stream: SplitMix64, n: int, low_exp: float = 0.0, high_exp: float = 2.0) -> np.ndarray:
    return np.array([10.0 ** (low_exp + (high_exp - low_exp) * stream.uniform()) for _ in range(n)])


def generate(problem: str, n: int, p: int = 1, seed: int = 0) -> ProblemInstance:
    """Build the objective, manifold and starting point of a seeded instance."""
    problem = canonical_problem(problem)
    stream = SplitMix64(seed)

    if problem == "rayleigh_sphere":
        manifold = Sphere(n)
        objective = make_rayleigh_sphere(symmetric_normal(stream, n))
    elif problem == "brockett_stiefel":
        manifold = Stiefel(n, p)
        objective = make_brockett_stiefel(
            symmetric_normal(stream, n), np.diag(np.arange(1.0, p + 1.0))
        )
    else:
        manifold = Euclidean(n)
        objective = make_quadratic_euclidean(log_uniform_diagonal(stream, n))

    x0 = manifold.random_point(stream)
    return ProblemInstance(problem=problem, objective=objective, manifold=manifold, x0=x0)
