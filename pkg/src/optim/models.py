"""Data models for line-searches and solver runs."""

from dataclasses import asdict, dataclass, field, fields
from typing import Optional

from src.errors import UsageError
from src.geometry.manifolds import ManifoldPoint

LINESEARCH_KINDS = ["standard", "modified"]
DIRECTION_KINDS = ["newton", "steepest"]
HESSIAN_MODELS = ["projected", "riemannian"]
STATUSES = ["converged", "max_iter", "linesearch_failed"]


@dataclass(frozen=True)
class LineSearchParams:
    beta: float = 0.5  # contraction factor
    tau: float = 0.1  # sufficient-decrease constant
    ell_max: int = 60

    def __post_init__(self):
        if not (0.0 < self.beta < 1.0):
            raise UsageError(f"beta must lie in (0, 1), got {self.beta}")
        if not (0.0 < self.tau < 1.0):
            raise UsageError(f"tau must lie in (0, 1), got {self.tau}")
        if self.ell_max < 1:
            raise UsageError(f"ell_max must be >= 1, got {self.ell_max}")


@dataclass(frozen=True)
class EvalCounters:
    ambient_f_evals: int = 0  # f at x + alpha p
    retraction_evals: int = 0
    retracted_f_evals: int = 0  # f at R_x(alpha p)
    gradient_evals: int = 0
    hessian_builds: int = 0

    def __add__(self, other: "EvalCounters") -> "EvalCounters":
        if not isinstance(other, EvalCounters):
            return NotImplemented
        return EvalCounters(**{f.name: getattr(self, f.name) + getattr(other, f.name) for f in fields(self)})

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Trial:
    ell: int
    alpha: float
    cheap_passed: Optional[bool]  # None for the standard strategy
    exact_passed: Optional[bool]  # None when the retraction was skipped


@dataclass(frozen=True, eq=False)
class LineSearchOutcome:
    ell_k: int
    alpha_k: float
    next_point: ManifoldPoint
    f_next: float
    counters_delta: EvalCounters
    slope: float = 0.0  # <g, p>
    trials: tuple = ()
    exact_rejections: int = 0  # cheap test passed, exact test failed


@dataclass(frozen=True)
class SolverConfig:
    tol_grad: float = 1e-8
    max_iter: int = 500
    nu: float = 1e-3
    rho: float = 1e6
    linesearch_kind: str = "modified"
    params: LineSearchParams = field(default_factory=LineSearchParams)
    direction_kind: str = "newton"
    hessian_model: str = "riemannian"  # projected, riemannian

    def __post_init__(self):
        if not self.tol_grad > 0.0:
            raise UsageError(f"tol_grad must be positive, got {self.tol_grad}")
        if self.max_iter < 1:
            raise UsageError(f"max_iter must be >= 1, got {self.max_iter}")
        if not (0.0 < self.nu <= self.rho):
            raise UsageError(f"need 0 < nu <= rho, got nu={self.nu}, rho={self.rho}")
        if self.linesearch_kind not in LINESEARCH_KINDS:
            raise UsageError(f"unknown line-search {self.linesearch_kind!r}")
        if self.direction_kind not in DIRECTION_KINDS:
            raise UsageError(f"unknown direction {self.direction_kind!r}")
        if self.hessian_model not in HESSIAN_MODELS:
            raise UsageError(f"unknown Hessian model {self.hessian_model!r}")

    @property
    def method(self) -> str:
        """Label used in benchmark rows, e.g. 'newton-modified'."""
        return f"{self.direction_kind}-{self.linesearch_kind}"


@dataclass(frozen=True)
class IterationRecord:
    k: int
    f_value: float
    grad_norm: float
    ell_k: Optional[int]  # None on the final record: no line-search was run there
    alpha_k: Optional[float]
    counters_cumulative: EvalCounters
    direction_norm: Optional[float] = None
    slope: Optional[float] = None  # <grad f(x_k), p_k>
    exact_rejections: int = 0


@dataclass(frozen=True, eq=False)
class SolverTrace:
    records: list
    status: str  # converged, max_iter, linesearch_failed
    final_point: ManifoldPoint

    @property
    def iterations(self) -> int:
        """Number of accepted steps."""
        return sum(1 for r in self.records if r.alpha_k is not None)

    @property
    def counters(self) -> EvalCounters:
        return self.records[-1].counters_cumulative if self.records else EvalCounters()
