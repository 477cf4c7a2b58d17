"""Objective functions on the ambient space and the Riemannian calculus built on them."""

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from src.errors import DegenerateInputError, UsageError
from src.geometry.manifolds import (
    Manifold,
    ManifoldPoint,
    TangentVector,
    project_tangent,
    tangent_basis,
)
from src.linalg.kernels import (
    SYMMETRY_TOL,
    as_matrix,
    as_vector,
    ldl,
    max_norm,
    sym_eig,
    symmetrize,
    tolerance,
)

DEFAULT_NU = 1e-3
DEFAULT_RHO = 1e6


@dataclass(frozen=True)
class Objective:
    """
    f: R^n -> R with its Euclidean derivatives.

    f must be defined on the whole ambient space: the modified line-search
    evaluates it at x + alpha p, which is off the manifold.
    """

    name: str
    value: Callable[[np.ndarray], float]
    euclid_grad: Callable[[np.ndarray], np.ndarray]
    euclid_hess_vec: Callable[[np.ndarray, np.ndarray], np.ndarray]
    lipschitz_bound: Optional[float] = None  # L of grad f; used by tests only
    optimal_value: Optional[float] = None  # known minimum over the manifold, if any
    change: Optional[Callable[[np.ndarray, np.ndarray], float]] = None  # f(y) - f(x) without cancellation


@dataclass(frozen=True, eq=False)
class NewtonOperator:
    base: ManifoldPoint
    basis: np.ndarray  # ambient_dim x intrinsic_dim, orthonormal columns
    matrix: np.ndarray  # intrinsic_dim x intrinsic_dim, symmetric, spectrum in [nu, rho]
    clamp_range: tuple[float, float]
    clamped: bool  # whether any eigenvalue had to be moved


def _exact_sum(terms: np.ndarray) -> float:
    # Correctly rounded sum; Armijo differences near a minimizer are smaller
    # than the rounding error of a plain dot product.
    return math.fsum(np.ravel(terms).tolist())


def _symmetric(A, name: str) -> np.ndarray:
    A = as_matrix(A, name)
    if A.shape[0] != A.shape[1]:
        raise UsageError(f"{name} must be square, got {A.shape}")
    asym = max_norm(A - A.T)
    if asym > tolerance(SYMMETRY_TOL, max_norm(A)):
        raise UsageError(f"{name} is not symmetric: |A - A^T|_max = {asym:.3e}")
    return symmetrize(A)


# ============== Test objectives ==============


def make_rayleigh_sphere(A) -> Objective:
    """f(x) = x^T A x; its minimum over the unit sphere is the smallest eigenvalue of A."""
    A = _symmetric(A, "A")
    eigenvalues, _ = sym_eig(A)

    def value(x):
        return _exact_sum(A * np.outer(x, x))

    def grad(x):
        return 2.0 * (A @ x)

    def hess_vec(x, u):
        return 2.0 * (A @ u)

    def change(x, y):
        return _exact_sum(A * np.outer(y - x, y + x))

    return Objective(
        name="rayleigh_sphere",
        value=value,
        euclid_grad=grad,
        euclid_hess_vec=hess_vec,
        change=change,
        lipschitz_bound=2.0 * max(abs(eigenvalues[0]), abs(eigenvalues[-1])),
        optimal_value=float(eigenvalues[0]),
    )


def make_brockett_stiefel(A, N) -> Objective:
    """
    Brockett cost f(X) = trace(X^T A X N) on flattened n x p matrices.

    N must be diagonal with strictly increasing positive entries. The
    minimum over St(n, p) pairs the smallest eigenvalues of A with the
    largest weights of N.
    """
    A = _symmetric(A, "A")
    N = as_matrix(N, "N")
    n, p = A.shape[0], N.shape[0]
    if N.shape != (p, p) or p > n:
        raise UsageError(f"N must be p x p with p <= {n}, got {N.shape}")
    weights = np.diag(N).copy()
    if max_norm(N - np.diag(weights)) > 0.0:
        raise UsageError("N must be diagonal")
    if np.any(weights <= 0.0) or np.any(np.diff(weights) <= 0.0):
        raise UsageError(f"N needs strictly increasing positive diagonal, got {weights}")

    eigenvalues, _ = sym_eig(A)

    def value(x):
        X = np.reshape(x, (n, p))
        return _exact_sum(A * ((X * weights) @ X.T))

    def grad(x):
        X = np.reshape(x, (n, p))
        return (2.0 * (A @ X) * weights).ravel()

    def hess_vec(x, u):
        U = np.reshape(u, (n, p))
        return (2.0 * (A @ U) * weights).ravel()

    def change(x, y):
        X, Y = np.reshape(x, (n, p)), np.reshape(y, (n, p))
        return _exact_sum(A * (((Y - X) * weights) @ (Y + X).T))

    return Objective(
        name="brockett_stiefel",
        value=value,
        euclid_grad=grad,
        euclid_hess_vec=hess_vec,
        change=change,
        lipschitz_bound=2.0 * max(abs(eigenvalues[0]), abs(eigenvalues[-1])) * float(weights[-1]),
        optimal_value=float(np.dot(eigenvalues[:p], weights[::-1])),
    )


def make_quadratic_euclidean(D) -> Objective:
    """f(x) = 1/2 sum D_i x_i^2 with D_i > 0; minimizer at the origin, L = max D_i."""
    D = as_vector(D, "D")
    if np.any(D <= 0.0):
        raise UsageError(f"D must be positive, got {D}")

    def value(x):
        return 0.5 * _exact_sum(D * x * x)

    def grad(x):
        return D * x

    def hess_vec(x, u):
        return D * u

    def change(x, y):
        return 0.5 * _exact_sum(D * (y - x) * (y + x))

    return Objective(
        name="quadratic_euclidean",
        value=value,
        euclid_grad=grad,
        euclid_hess_vec=hess_vec,
        change=change,
        lipschitz_bound=float(np.max(D)),
        optimal_value=0.0,
    )


# ============== Riemannian calculus ==============


def riemannian_gradient(obj: Objective, M: Manifold, x: ManifoldPoint) -> TangentVector:
    """grad f(x) = P_x(nabla f(x)) under the induced metric."""
    return project_tangent(M, x, obj.euclid_grad(x.coords))


def _spectrum_within(H: np.ndarray, nu: float, rho: float) -> bool:
    eye = np.eye(H.shape[0])
    try:
        ldl(H - nu * eye)
        ldl(rho * eye - H)
    except DegenerateInputError:
        return False
    return True


def clamp_spectrum(H: np.ndarray, nu: float, rho: float) -> tuple[np.ndarray, bool]:
    """
    Replace every eigenvalue of symmetric H by min(max(lambda, nu), rho).

    Returns (matrix, clamped). H is returned untouched when its spectrum
    already lies in [nu, rho].
    """
    if _spectrum_within(H, nu, rho):
        return H, False
    eigenvalues, V = sym_eig(H)
    clipped = np.clip(eigenvalues, nu, rho)
    if np.array_equal(clipped, eigenvalues):
        return H, False
    return symmetrize((V * clipped) @ V.T), True


def build_newton_operator(
    obj: Objective,
    M: Manifold,
    x: ManifoldPoint,
    nu: float = DEFAULT_NU,
    rho: float = DEFAULT_RHO,
    curvature: bool = False,
) -> NewtonOperator:
    """
    H_k in tangent coordinates: clamp(sym(B^T hess f B)), B = tangent_basis(M, x).

    With curvature=True the Weingarten term of M is added before
    symmetrizing, which turns the projected Hessian into the Riemannian
    Hessian of f on M.
    """
    if not (0.0 < nu <= rho):
        raise UsageError(f"need 0 < nu <= rho, got nu={nu}, rho={rho}")

    B = tangent_basis(M, x)
    egrad = obj.euclid_grad(x.coords) if curvature else None
    columns = []
    for j in range(B.shape[1]):
        u = B[:, j]
        hu = obj.euclid_hess_vec(x.coords, u)
        if curvature:
            hu = hu + M.weingarten(x.coords, u, egrad)
        columns.append(hu)
    H = symmetrize(B.T @ np.column_stack(columns))

    matrix, clamped = clamp_spectrum(H, nu, rho)
    return NewtonOperator(base=x, basis=B, matrix=matrix, clamp_range=(nu, rho), clamped=clamped)
