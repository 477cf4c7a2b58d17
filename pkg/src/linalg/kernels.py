"""
Dense linear-algebra kernels.

Vectors and matrices are float64 numpy arrays (1-D and 2-D). The
factorizations here (Householder thin QR, cyclic Jacobi eigensolver,
LDL^T) are unblocked and written out in full, so a given input always
produces the same factors regardless of the LAPACK build numpy links to.
Problem sizes are small (n <= 500).
"""

import math
from functools import lru_cache

import numpy as np

from src.errors import DegenerateInputError, UsageError

# Tolerances are relative to the max-norm of the input with this absolute floor.
ABS_FLOOR = 1e-14
RANK_TOL = 1e-14
SYMMETRY_TOL = 1e-10
MAX_JACOBI_SWEEPS = 100
SPLITTER = 134217729.0  # 2**27 + 1

DenseVector = np.ndarray
DenseMatrix = np.ndarray


def tolerance(rel: float, scale: float) -> float:
    """Relative tolerance `rel * scale`, never below ABS_FLOOR."""
    return max(rel * scale, ABS_FLOOR)


def as_vector(u, name: str = "vector") -> DenseVector:
    arr = np.asarray(u, dtype=float)
    if arr.ndim != 1:
        raise UsageError(f"{name} must be 1-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise UsageError(f"{name} has non-finite entries")
    return arr


def as_matrix(A, name: str = "matrix") -> DenseMatrix:
    arr = np.asarray(A, dtype=float)
    if arr.ndim != 2:
        raise UsageError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise UsageError(f"{name} has non-finite entries")
    return arr


def _as_square(S, name: str) -> DenseMatrix:
    S = as_matrix(S, name)
    if S.shape[0] != S.shape[1]:
        raise UsageError(f"{name} must be square, got shape {S.shape}")
    return S


def _check_finite(arr: np.ndarray, what: str) -> np.ndarray:
    if not np.all(np.isfinite(arr)):
        raise DegenerateInputError(f"{what} produced non-finite entries")
    return arr


def max_norm(A) -> float:
    arr = np.asarray(A, dtype=float)
    return float(np.max(np.abs(arr))) if arr.size else 0.0


def norm(u) -> float:
    """Euclidean norm of a vector (Frobenius norm of a matrix)."""
    return float(np.linalg.norm(u))


def inner(u, v) -> float:
    """Standard inner product sum(u_i * v_i)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise UsageError(f"dimension mismatch: {u.shape} vs {v.shape}")
    return float(np.dot(u.ravel(), v.ravel()))


def _split(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Veltkamp split: hi carries the top 26 bits, so hi * hi is exact
    c = SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def exact_dot(u, v, shift: float = 0.0) -> float:
    """
    sum(u_i * v_i) - shift with a single rounding at the end.

    Each product is split into its rounded value and the exact rounding
    error (Dekker's two-product), and everything is summed with fsum. A
    Gram entry like |x|^2 - 1 then keeps its digits below 1e-16.
    """
    u = as_vector(np.ravel(u), "u")
    v = as_vector(np.ravel(v), "v")
    if u.shape != v.shape:
        raise UsageError(f"dimension mismatch: {u.shape} vs {v.shape}")
    prod = u * v
    uh, ul = _split(u)
    vh, vl = _split(v)
    err = ul * vl - (((prod - uh * vh) - ul * vh) - uh * vl)
    return math.fsum(np.concatenate([prod, err, [-shift]]).tolist())


def gram_residual(X) -> DenseMatrix:
    """X^T X - I for a tall matrix, each entry from exact_dot."""
    X = as_matrix(X, "X")
    p = X.shape[1]
    E = np.empty((p, p))
    for i in range(p):
        for j in range(i, p):
            E[i, j] = E[j, i] = exact_dot(X[:, i], X[:, j], 1.0 if i == j else 0.0)
    return E


def symmetrize(M) -> DenseMatrix:
    M = np.asarray(M, dtype=float)
    return 0.5 * (M + M.T)


# ============== Thin QR ==============


def thin_qr(A) -> tuple[DenseMatrix, DenseMatrix]:
    """
    Householder thin QR of a tall matrix, A = Q R.

    Q is n x p with orthonormal columns and R is p x p upper triangular
    with a strictly positive diagonal, which makes the factorization
    unique for full-rank A.
    """
    A = as_matrix(A, "A")
    n, p = A.shape
    if n < p:
        raise UsageError(f"thin_qr needs rows >= cols, got {A.shape}")

    R = A.copy()
    reflectors = []
    for j in range(p):
        x = R[j:, j]
        normx = np.linalg.norm(x)
        if normx == 0.0:
            reflectors.append(None)
            continue
        v = x.copy()
        v[0] += math.copysign(normx, x[0])
        v /= np.linalg.norm(v)
        R[j:, j:] -= 2.0 * np.outer(v, v @ R[j:, j:])
        reflectors.append(v)

    R = np.triu(R[:p, :])

    # Accumulate Q = H_0 H_1 ... H_{p-1} applied to the first p columns of I
    Q = np.eye(n, p)
    for j in range(p - 1, -1, -1):
        v = reflectors[j]
        if v is None:
            continue
        Q[j:, :] -= 2.0 * np.outer(v, v @ Q[j:, :])

    signs = np.where(np.diag(R) < 0.0, -1.0, 1.0)
    Q = Q * signs
    R = R * signs[:, None]

    tol = tolerance(RANK_TOL, max_norm(A))
    diag = np.abs(np.diag(R))
    if p and np.min(diag) < tol:
        raise DegenerateInputError(
            f"matrix is rank deficient: |R_jj| = {np.min(diag):.3e} below {tol:.1e}"
        )
    return _check_finite(Q, "thin_qr"), _check_finite(R, "thin_qr")


# ============== Symmetric eigendecomposition ==============


@lru_cache(maxsize=64)
def _round_robin(d: int) -> tuple:
    """
    Pair orderings for parallel cyclic Jacobi.

    Every round holds disjoint (p, q) pairs; the d-1 (or d) rounds together
    visit every off-diagonal pair exactly once.
    """
    m = d + (d % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        top = players[: m // 2]
        bottom = players[m // 2:][::-1]
        pairs = [(min(a, b), max(a, b)) for a, b in zip(top, bottom) if a < d and b < d]
        rounds.append(
            (np.array([a for a, _ in pairs], dtype=int), np.array([b for _, b in pairs], dtype=int))
        )
        players = [players[0], players[-1]] + players[1:-1]
    return tuple(rounds)


def _jacobi_round(W: DenseMatrix, V: DenseMatrix, P: np.ndarray, Q: np.ndarray) -> int:
    """Apply one round of disjoint Jacobi rotations in place. Returns rotations applied."""
    app = W[P, P]
    aqq = W[Q, Q]
    apq = W[P, Q]
    active = np.abs(apq) > np.finfo(float).eps * np.sqrt(np.abs(app * aqq))
    if not np.any(active):
        return 0
    P, Q = P[active], Q[active]
    app, aqq, apq = app[active], aqq[active], apq[active]

    theta = (aqq - app) / (2.0 * apq)
    abs_theta = np.abs(theta)
    sign = np.where(theta >= 0.0, 1.0, -1.0)
    with np.errstate(over="ignore"):
        t = sign / (abs_theta + np.sqrt(abs_theta * abs_theta + 1.0))
    t = np.where(abs_theta > 1e150, 0.5 / theta, t)
    c = 1.0 / np.sqrt(t * t + 1.0)
    s = t * c

    WP, WQ = W[:, P], W[:, Q]
    W[:, P] = WP * c - WQ * s
    W[:, Q] = WP * s + WQ * c
    WP, WQ = W[P, :], W[Q, :]
    W[P, :] = c[:, None] * WP - s[:, None] * WQ
    W[Q, :] = s[:, None] * WP + c[:, None] * WQ
    VP, VQ = V[:, P], V[:, Q]
    V[:, P] = VP * c - VQ * s
    V[:, Q] = VP * s + VQ * c
    return int(P.size)


def sym_eig(S) -> tuple[DenseVector, DenseMatrix]:
    """
    Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns (eigenvalues ascending, eigenvectors as orthonormal columns)
    such that S V = V diag(eigenvalues).
    """
    S = _as_square(S, "S")
    d = S.shape[0]
    scale = max_norm(S)
    asym = max_norm(S - S.T)
    if asym > tolerance(SYMMETRY_TOL, scale):
        raise UsageError(f"matrix is not symmetric: |S - S^T|_max = {asym:.3e}")

    W = symmetrize(S)
    V = np.eye(d)
    if d > 1:
        rounds = _round_robin(d)
        for _ in range(MAX_JACOBI_SWEEPS):
            rotations = 0
            for P, Q in rounds:
                rotations += _jacobi_round(W, V, P, Q)
            if rotations == 0:
                break
        else:
            raise DegenerateInputError(f"Jacobi sweeps did not converge in {MAX_JACOBI_SWEEPS} sweeps")

    eigenvalues = np.diag(W).copy()
    order = np.argsort(eigenvalues, kind="stable")
    return _check_finite(eigenvalues[order], "sym_eig"), _check_finite(V[:, order], "sym_eig")


# ============== SPD solve ==============


def ldl(S) -> tuple[DenseMatrix, DenseVector]:
    """
    Square-root-free Cholesky S = L diag(d) L^T with unit lower-triangular L.

    Raises DegenerateInputError unless every pivot d_j is positive, i.e.
    unless S is positive definite.
    """
    S = _as_square(S, "S")
    size = S.shape[0]
    L = np.eye(size)
    d = np.zeros(size)
    for j in range(size):
        w = L[j, :j] * d[:j]
        d[j] = S[j, j] - L[j, :j] @ w
        if not d[j] > 0.0:
            raise DegenerateInputError(f"matrix is not positive definite (pivot {j} = {d[j]:.3e})")
        L[j + 1:, j] = (S[j + 1:, j] - L[j + 1:, :j] @ w) / d[j]
    return L, d


def solve_spd(S, b) -> DenseVector:
    """Solve S x = b for symmetric positive definite S via its LDL^T factors."""
    S = _as_square(S, "S")
    b = as_vector(b, "b")
    if S.shape[0] != b.shape[0]:
        raise UsageError(f"dimension mismatch: S is {S.shape}, b has {b.shape[0]} entries")
    asym = max_norm(S - S.T)
    if asym > tolerance(SYMMETRY_TOL, max_norm(S)):
        raise UsageError(f"matrix is not symmetric: |S - S^T|_max = {asym:.3e}")

    L, d = ldl(S)
    size = b.shape[0]
    z = np.zeros(size)
    for i in range(size):
        z[i] = b[i] - L[i, :i] @ z[:i]
    w = z / d
    x = np.zeros(size)
    for i in range(size - 1, -1, -1):
        x[i] = w[i] - L[i + 1:, i] @ x[i + 1:]
    return _check_finite(x, "solve_spd")
