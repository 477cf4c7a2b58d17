"""
Riemannian submanifolds of R^n handled purely in ambient coordinates.

Points and tangent vectors are float64 arrays in the embedding space; the
metric is the Euclidean inner product restricted to each tangent space.
Stiefel points are n x p matrices stored flattened in row-major order so
every module works with 1-D arrays.
"""

from dataclasses import dataclass

import numpy as np

from src.errors import DegenerateInputError, UsageError
from src.linalg.kernels import exact_dot, gram_residual, max_norm, norm, symmetrize, thin_qr
from src.linalg.prng import SplitMix64

AmbientVector = np.ndarray

FEASIBILITY_TOL = 1e-10
# smallest acceptable |R_jj| / max |R_jj| when orthonormalizing a projected candidate basis
BASIS_CONDITION = 1e-6
BASIS_ATTEMPTS = 8


@dataclass(frozen=True, eq=False)
class ManifoldPoint:
    coords: AmbientVector
    manifold: "Manifold"


@dataclass(frozen=True, eq=False)
class TangentVector:
    coords: AmbientVector
    base: ManifoldPoint

    def scaled(self, alpha: float) -> "TangentVector":
        return TangentVector(alpha * self.coords, self.base)

    def norm(self) -> float:
        return norm(self.coords)


class Manifold:
    """
    Base class for embedded submanifolds.

    Subclasses implement the residuals, the orthogonal projector onto the
    tangent space, the retraction and the Weingarten correction on raw
    ambient arrays; the module-level functions below add validation and
    wrap results in ManifoldPoint / TangentVector.
    """

    kind: str = "manifold"

    @property
    def ambient_dim(self) -> int:
        raise NotImplementedError

    @property
    def intrinsic_dim(self) -> int:
        raise NotImplementedError

    def point_residual(self, x: AmbientVector) -> float:
        raise NotImplementedError

    def tangent_residual(self, x: AmbientVector, v: AmbientVector) -> float:
        raise NotImplementedError

    def project(self, x: AmbientVector, u: AmbientVector) -> AmbientVector:
        raise NotImplementedError

    def retract(self, x: AmbientVector, v: AmbientVector) -> AmbientVector:
        raise NotImplementedError

    def weingarten(self, x: AmbientVector, u: AmbientVector, egrad: AmbientVector) -> AmbientVector:
        """Curvature term W(u) with Hess f(x)[u] = P_x(hess f(x)[u] + W(u))."""
        raise NotImplementedError

    def normal_offset(self, x: AmbientVector) -> AmbientVector:
        """x minus its closest point on the manifold, to first order in the feasibility residual."""
        raise NotImplementedError

    def sample(self, stream) -> AmbientVector:
        raise NotImplementedError

    def projector_matrix(self, x: AmbientVector) -> np.ndarray:
        """Dense matrix of the tangent projector at x, built column by column."""
        eye = np.eye(self.ambient_dim)
        return np.column_stack([self.project(x, eye[:, i]) for i in range(self.ambient_dim)])

    # ---- constructors ----

    def point(self, coords, tol: float = FEASIBILITY_TOL) -> ManifoldPoint:
        x = np.array(coords, dtype=float).ravel()
        if x.shape != (self.ambient_dim,):
            raise UsageError(f"{self} expects {self.ambient_dim} ambient coordinates, got {x.shape}")
        if not np.all(np.isfinite(x)):
            raise UsageError("point has non-finite coordinates")
        residual = self.point_residual(x)
        if residual > tol:
            raise UsageError(f"point is not on {self}: residual {residual:.3e}")
        return ManifoldPoint(x, self)

    def random_point(self, stream=None) -> ManifoldPoint:
        stream = stream if stream is not None else SplitMix64(0)
        return ManifoldPoint(self.sample(stream), self)

    def random_tangent(self, x: ManifoldPoint, stream=None) -> TangentVector:
        stream = stream if stream is not None else SplitMix64(0)
        return project_tangent(self, x, stream.standard_normal(self.ambient_dim))

    def zero_tangent(self, x: ManifoldPoint) -> TangentVector:
        return TangentVector(np.zeros(self.ambient_dim), x)


@dataclass(frozen=True)
class Euclidean(Manifold):
    n: int

    kind = "euclidean"

    def __post_init__(self):
        if self.n < 1:
            raise UsageError(f"Euclidean(n) needs n >= 1, got {self.n}")

    def __str__(self) -> str:
        return f"Euclidean({self.n})"

    @property
    def ambient_dim(self) -> int:
        return self.n

    @property
    def intrinsic_dim(self) -> int:
        return self.n

    def point_residual(self, x):
        return 0.0

    def tangent_residual(self, x, v):
        return 0.0

    def project(self, x, u):
        return np.array(u, dtype=float)

    def retract(self, x, v):
        return x + v

    def weingarten(self, x, u, egrad):
        return np.zeros_like(u)

    def normal_offset(self, x):
        return np.zeros_like(x)

    def sample(self, stream):
        return np.asarray(stream.standard_normal(self.n), dtype=float)

    def projector_matrix(self, x):
        return np.eye(self.n)


@dataclass(frozen=True)
class Sphere(Manifold):
    """Unit sphere {x in R^n : |x| = 1}."""

    n: int

    kind = "sphere"

    def __post_init__(self):
        if self.n < 2:
            raise UsageError(f"Sphere(n) needs n >= 2, got {self.n}")

    def __str__(self) -> str:
        return f"Sphere({self.n})"

    @property
    def ambient_dim(self) -> int:
        return self.n

    @property
    def intrinsic_dim(self) -> int:
        return self.n - 1

    def point_residual(self, x):
        return abs(norm(x) - 1.0)

    def tangent_residual(self, x, v):
        return abs(float(x @ v))

    def project(self, x, u):
        return u - (x @ u) * x

    def retract(self, x, v):
        y = x + v
        return y / norm(y)

    def weingarten(self, x, u, egrad):
        return -(x @ egrad) * u

    def normal_offset(self, x):
        return 0.5 * exact_dot(x, x, 1.0) * x

    def sample(self, stream):
        y = np.asarray(stream.standard_normal(self.n), dtype=float)
        return y / norm(y)

    def projector_matrix(self, x):
        return np.eye(self.n) - np.outer(x, x)


@dataclass(frozen=True)
class Stiefel(Manifold):
    """n x p matrices with orthonormal columns, flattened row-major."""

    n: int
    p: int

    kind = "stiefel"

    def __post_init__(self):
        if not (self.n >= self.p >= 1):
            raise UsageError(f"Stiefel(n, p) needs n >= p >= 1, got ({self.n}, {self.p})")
        if self.intrinsic_dim < 1:
            raise UsageError(f"Stiefel({self.n}, {self.p}) has no tangent directions")

    def __str__(self) -> str:
        return f"Stiefel({self.n}, {self.p})"

    @property
    def ambient_dim(self) -> int:
        return self.n * self.p

    @property
    def intrinsic_dim(self) -> int:
        return self.n * self.p - self.p * (self.p + 1) // 2

    def as_matrix(self, x: AmbientVector) -> np.ndarray:
        return np.reshape(x, (self.n, self.p))

    def point_residual(self, x):
        X = self.as_matrix(x)
        return max_norm(X.T @ X - np.eye(self.p))

    def tangent_residual(self, x, v):
        X, V = self.as_matrix(x), self.as_matrix(v)
        XtV = X.T @ V
        return max_norm(XtV + XtV.T)

    def project(self, x, u):
        X, U = self.as_matrix(x), self.as_matrix(u)
        return (U - X @ symmetrize(X.T @ U)).ravel()

    def retract(self, x, v):
        Q, _ = thin_qr(self.as_matrix(x + v))
        return Q.ravel()

    def weingarten(self, x, u, egrad):
        X, U, G = self.as_matrix(x), self.as_matrix(u), self.as_matrix(egrad)
        return (-U @ symmetrize(X.T @ G)).ravel()

    def normal_offset(self, x):
        X = self.as_matrix(x)
        return 0.5 * (X @ gram_residual(X)).ravel()

    def sample(self, stream):
        G = np.asarray(stream.standard_normal((self.n, self.p)), dtype=float)
        Q, _ = thin_qr(G)
        return Q.ravel()


# ============== Operations ==============


def _coords(x) -> np.ndarray:
    return x.coords if isinstance(x, (ManifoldPoint, TangentVector)) else np.asarray(x, dtype=float).ravel()


def _require_point(M: Manifold, x: ManifoldPoint) -> None:
    if not isinstance(x, ManifoldPoint):
        raise UsageError("expected a ManifoldPoint")
    if x.manifold != M:
        raise UsageError(f"point belongs to {x.manifold}, not {M}")
    if not check_point(M, x):
        raise UsageError(f"point is not feasible on {M}: residual {M.point_residual(x.coords):.3e}")


def _require_tangent(M: Manifold, x: ManifoldPoint, v: TangentVector) -> None:
    if not isinstance(v, TangentVector):
        raise UsageError("expected a TangentVector")
    if v.base is not x and not np.array_equal(v.base.coords, x.coords):
        raise UsageError("tangent vector is attached to a different base point")
    if v.coords.shape != (M.ambient_dim,):
        raise UsageError(f"tangent vector has shape {v.coords.shape}, expected ({M.ambient_dim},)")
    residual = M.tangent_residual(x.coords, v.coords)
    if residual > FEASIBILITY_TOL * max(1.0, max_norm(v.coords)):
        raise UsageError(f"vector is not tangent at x: residual {residual:.3e}")


def check_point(M: Manifold, x, tol: float = FEASIBILITY_TOL) -> bool:
    """True iff x lies on M up to the feasibility residual `tol`."""
    coords = _coords(x)
    if coords.shape != (M.ambient_dim,) or not np.all(np.isfinite(coords)):
        return False
    return M.point_residual(coords) <= tol


def check_tangent(M: Manifold, x, v, tol: float = FEASIBILITY_TOL) -> bool:
    """True iff v lies in the tangent space at x up to the residual `tol`."""
    xc, vc = _coords(x), _coords(v)
    if xc.shape != (M.ambient_dim,) or vc.shape != (M.ambient_dim,):
        return False
    return M.tangent_residual(xc, vc) <= tol


def project_tangent(M: Manifold, x: ManifoldPoint, u) -> TangentVector:
    """Orthogonal projection of an ambient vector onto T_x M."""
    _require_point(M, x)
    u = np.asarray(u, dtype=float).ravel()
    if u.shape != (M.ambient_dim,):
        raise UsageError(f"ambient vector has shape {u.shape}, expected ({M.ambient_dim},)")
    return TangentVector(M.project(x.coords, u), x)


def retract(M: Manifold, x: ManifoldPoint, v: TangentVector) -> ManifoldPoint:
    """R_x(v); R_x(0) returns x unchanged."""
    _require_point(M, x)
    _require_tangent(M, x, v)
    if not np.any(v.coords):
        return ManifoldPoint(x.coords.copy(), M)
    y = M.retract(x.coords, v.coords)
    if not np.all(np.isfinite(y)):
        raise DegenerateInputError(f"retraction on {M} produced non-finite coordinates")
    return ManifoldPoint(y, M)


def ambient_move(x: ManifoldPoint, alpha: float, p: TangentVector) -> AmbientVector:
    """x + alpha p computed in the embedding space; generally off the manifold."""
    if not alpha > 0.0:
        raise UsageError(f"alpha must be positive, got {alpha}")
    return x.coords + alpha * p.coords


def tangent_basis(M: Manifold, x: ManifoldPoint, seed: int = 0) -> np.ndarray:
    """
    Orthonormal basis of T_x M as the columns of an ambient_dim x intrinsic_dim matrix.

    The projector is applied to the first intrinsic_dim coordinate axes and
    the result orthonormalized by thin QR. When that candidate is degenerate at x
    (e.g. x on a coordinate axis) seeded Gaussian candidates are tried instead,
    so the basis is a deterministic function of x.
    """
    _require_point(M, x)
    if isinstance(M, Euclidean):
        return np.eye(M.n)

    P = M.projector_matrix(x.coords)
    d = M.intrinsic_dim
    candidate = np.eye(M.ambient_dim)[:, :d]
    stream = SplitMix64(seed)
    for _ in range(BASIS_ATTEMPTS):
        try:
            Q, R = thin_qr(P @ candidate)
        except DegenerateInputError:
            Q = None
        if Q is not None:
            diag = np.abs(np.diag(R))
            if np.min(diag) >= BASIS_CONDITION * np.max(diag):
                return Q
        candidate = stream.standard_normal((M.ambient_dim, d))
    raise DegenerateInputError(f"could not build a tangent basis on {M}")


def make_manifold(kind: str, n: int, p: int = 1) -> Manifold:
    """Build a manifold from its kind name ('euclidean', 'sphere', 'stiefel')."""
    if kind == "euclidean":
        return Euclidean(n)
    if kind == "sphere":
        return Sphere(n)
    if kind == "stiefel":
        return Stiefel(n, p)
    raise UsageError(f"unknown manifold kind {kind!r}")
