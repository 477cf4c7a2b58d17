"""Data models for benchmark experiments."""

from dataclasses import dataclass, field

from src.errors import UsageError
from src.optim.models import SolverConfig
from src.problems.generators import canonical_problem

# Column order of every CSV/JSON row
ROW_FIELDS = [
    "spec_id",
    "method",
    "problem",
    "n",
    "p",
    "seed",
    "status",
    "iterations",
    "f_final",
    "grad_norm_final",
    "ambient_f_evals",
    "retraction_evals",
    "retracted_f_evals",
    "gradient_evals",
    "hessian_builds",
    "wall_time_s",
]


@dataclass(frozen=True)
class ExperimentSpec:
    problem: str  # rayleigh_sphere, brockett_stiefel, quadratic_euclidean
    n: int
    p: int = 1  # Stiefel columns; 1 for the other problems
    seed: int = 0
    config: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        object.__setattr__(self, "problem", canonical_problem(self.problem))
        if self.seed < 0:
            raise UsageError(f"seed must be an unsigned integer, got {self.seed}")
        if self.problem == "brockett_stiefel":
            if not (self.n >= self.p >= 1) or self.n * self.p - self.p * (self.p + 1) // 2 < 1:
                raise UsageError(f"brockett_stiefel needs n >= p >= 1 and n > 1, got n={self.n}, p={self.p}")
        elif self.p != 1:
            raise UsageError(f"{self.problem} takes no p, got p={self.p}")
        minimum = 2 if self.problem == "rayleigh_sphere" else 1
        if self.n < minimum:
            raise UsageError(f"{self.problem} needs n >= {minimum}, got {self.n}")

    @property
    def spec_id(self) -> str:
        """Identifies the instance; paired methods share it."""
        return f"{self.problem}-n{self.n}-p{self.p}-s{self.seed}"

    @property
    def method(self) -> str:
        return self.config.method


@dataclass(frozen=True)
class ComparisonRow:
    spec_id: str
    method: str
    problem: str
    n: int
    p: int
    seed: int
    status: str  # converged, max_iter, linesearch_failed
    iterations: int
    f_final: float
    grad_norm_final: float
    ambient_f_evals: int
    retraction_evals: int
    retracted_f_evals: int
    gradient_evals: int
    hessian_builds: int
    wall_time_s: float  # informational only
