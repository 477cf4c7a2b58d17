"""
Pytest configuration and fixtures for the Riemannian Armijo bench tests.

=== MENTOR NOTES ===

Two kinds of randomness
-----------------------
The library draws every benchmark instance from its own documented
SplitMix64 stream, so a seed means the same instance everywhere.

Tests that only need "some random matrix" use numpy's default_rng
instead. That keeps the oracle (numpy) independent from the code under
test (our SplitMix64 + kernels): if both shared one generator, a bug in
the generator could hide a bug in the math.

Oracles
-------
A test is only as good as the thing it compares against. The oracles used
in this suite are:
  - numpy.linalg (qr, eigvalsh, solve) for the hand-written kernels
  - exact rational arithmetic (fractions.Fraction) for tiny line-searches
  - finite differences for gradients
  - eigenvalue formulas for the optimal values of Rayleigh / Brockett

Counting wrappers
-----------------
The line-search counters are checked against wrappers that count calls
to f and to the retraction directly (src.bench.checks), so a counter that
is merely self-consistent but wrong still fails.

===================
"""

import numpy as np
import pytest

from src.geometry.manifolds import Euclidean, Sphere, Stiefel
from src.problems.objectives import make_brockett_stiefel, make_quadratic_euclidean, make_rayleigh_sphere


@pytest.fixture
def rng():
    """A fresh, seeded numpy generator per test."""
    return np.random.default_rng(20240601)


@pytest.fixture
def random_symmetric():
    """Factory: (G + G^T) / 2 from a numpy generator."""

    def make(rng, n):
        G = rng.standard_normal((n, n))
        return 0.5 * (G + G.T)

    return make


@pytest.fixture
def random_spd():
    """Factory: well-conditioned SPD matrix I + G G^T / (4 n)."""

    def make(rng, n):
        G = rng.standard_normal((n, n))
        return np.eye(n) + (G @ G.T) / (4 * n)

    return make


@pytest.fixture
def rayleigh9(rng, random_symmetric):
    """Rayleigh quotient on Sphere(9) with a random symmetric A."""
    A = random_symmetric(rng, 9)
    return make_rayleigh_sphere(A), Sphere(9), A


@pytest.fixture
def brockett83(rng, random_symmetric):
    """Brockett cost on Stiefel(8, 3) with N = diag(1, 2, 3)."""
    A = random_symmetric(rng, 8)
    return make_brockett_stiefel(A, np.diag([1.0, 2.0, 3.0])), Stiefel(8, 3), A


@pytest.fixture
def quadratic24():
    """f(x) = 1/2 (2 x1^2 + 4 x2^2) on Euclidean(2)."""
    return make_quadratic_euclidean([2.0, 4.0]), Euclidean(2)


@pytest.fixture
def clean_env(monkeypatch, tmp_path):
    """Remove every RIEMOPT_* variable and return a path for a scratch .env file."""
    for name in [
        "RIEMOPT_BETA",
        "RIEMOPT_TAU",
        "RIEMOPT_TOL",
        "RIEMOPT_MAX_ITER",
        "RIEMOPT_NU",
        "RIEMOPT_RHO",
        "RIEMOPT_ELL_MAX",
        "RIEMOPT_LOG_LEVEL",
    ]:
        # setenv first so teardown also removes values that load_dotenv writes
        monkeypatch.setenv(name, "placeholder")
        monkeypatch.delenv(name)
    return tmp_path / ".env"
