"""Unit tests for seeded problem instances."""

import numpy as np
import pytest

from src.errors import UsageError
from src.geometry.manifolds import Euclidean, Sphere, Stiefel, check_point
from src.linalg.prng import SplitMix64
from src.problems.generators import (
    ALIASES,
    PROBLEMS,
    canonical_problem,
    generate,
    log_uniform_diagonal,
    symmetric_normal,
)


class TestCanonicalProblem:
    """Tests for canonical_problem."""

    @pytest.mark.parametrize("alias, name", sorted(ALIASES.items()))
    def test_aliases_resolve(self, alias, name):
        assert canonical_problem(alias) == name

    def test_full_names_and_case_are_accepted(self):
        assert canonical_problem("Brockett_Stiefel") == "brockett_stiefel"
        assert [canonical_problem(name) for name in PROBLEMS] == PROBLEMS

    def test_unknown_problem_raises_usage_error(self):
        with pytest.raises(UsageError, match="unknown problem"):
            canonical_problem("rosenbrock")


class TestGenerate:
    """Tests for generate."""

    @pytest.mark.parametrize(
        "problem, n, p, manifold",
        [
            ("rayleigh", 7, 1, Sphere(7)),
            ("brockett", 6, 2, Stiefel(6, 2)),
            ("quadratic", 5, 1, Euclidean(5)),
        ],
    )
    def test_manifold_and_feasible_start(self, problem, n, p, manifold):
        instance = generate(problem, n, p, seed=3)

        assert instance.problem == canonical_problem(problem)
        assert instance.manifold == manifold
        assert check_point(manifold, instance.x0)

    def test_same_seed_same_instance(self):
        a = generate("brockett", 6, 2, seed=9)
        b = generate("brockett", 6, 2, seed=9)
        x = a.x0.coords

        np.testing.assert_array_equal(a.x0.coords, b.x0.coords)
        assert a.objective.value(x) == b.objective.value(x)
        assert a.objective.optimal_value == b.objective.optimal_value

    def test_different_seeds_differ(self):
        a = generate("rayleigh", 8, seed=1)
        b = generate("rayleigh", 8, seed=2)

        assert not np.array_equal(a.x0.coords, b.x0.coords)

    def test_matrix_is_drawn_before_start_point(self):
        stream = SplitMix64(5)
        A = symmetric_normal(stream, 4)
        x0 = Sphere(4).random_point(stream)

        instance = generate("rayleigh", 4, seed=5)

        np.testing.assert_array_equal(instance.x0.coords, x0.coords)
        assert instance.objective.value(x0.coords) == pytest.approx(float(x0.coords @ A @ x0.coords), abs=1e-14)

    def test_brockett_weights_are_one_to_p(self):
        instance = generate("brockett", 5, 3, seed=4)
        stream = SplitMix64(4)
        A = symmetric_normal(stream, 5)

        expected = float(np.dot(np.linalg.eigvalsh(A)[:3], [3.0, 2.0, 1.0]))

        assert instance.objective.optimal_value == pytest.approx(expected, abs=1e-10)

    def test_quadratic_diagonal_is_positive(self):
        instance = generate("quadratic", 10, seed=6)

        assert instance.objective.optimal_value == 0.0
        assert 1.0 <= instance.objective.lipschitz_bound <= 100.0

    def test_invalid_dimensions_raise_usage_error(self):
        with pytest.raises(UsageError):
            generate("brockett", 3, 4, seed=0)


class TestDraws:
    """Tests for the matrix helpers."""

    def test_symmetric_normal_is_symmetric(self):
        A = symmetric_normal(SplitMix64(1), 6)

        np.testing.assert_array_equal(A, A.T)

    def test_log_uniform_diagonal_range(self):
        D = log_uniform_diagonal(SplitMix64(2), 200)

        assert D.min() >= 1.0 and D.max() < 100.0
        assert D.shape == (200,)
