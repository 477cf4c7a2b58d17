"""Solver defaults, overridable from the environment or a .env file."""

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, TypeVar

from dotenv import load_dotenv

from src.errors import ConfigError

# .env at the project root
ENV_PATH = Path(__file__).parent.parent / ".env"

LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR"]

T = TypeVar("T")


@dataclass(frozen=True)
class Defaults:
    beta: float = 0.5
    tau: float = 0.1  # small so unit Newton steps are rarely rejected
    tol_grad: float = 1e-8
    max_iter: int = 500
    nu: float = 1e-3
    rho: float = 1e6
    ell_max: int = 60
    log_level: str = "WARNING"


def _read(name: str, parse: Callable[[str], T], default: T) -> T:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return parse(raw.strip())
    except ValueError:
        raise ConfigError(f"{name}={raw!r} is not a valid value")


def _log_level(raw: str) -> str:
    level = raw.upper()
    if level not in LOG_LEVELS:
        raise ValueError(level)
    return level


def load_defaults(env_path: Optional[Path] = ENV_PATH) -> Defaults:
    """
    Resolve solver defaults.

    Precedence: process environment, then the .env file, then the
    built-in values of Defaults. load_dotenv never overrides variables
    that are already set.
    """
    if env_path is not None:
        load_dotenv(env_path)

    base = Defaults()
    return Defaults(
        beta=_read("RIEMOPT_BETA", float, base.beta),
        tau=_read("RIEMOPT_TAU", float, base.tau),
        tol_grad=_read("RIEMOPT_TOL", float, base.tol_grad),
        max_iter=_read("RIEMOPT_MAX_ITER", int, base.max_iter),
        nu=_read("RIEMOPT_NU", float, base.nu),
        rho=_read("RIEMOPT_RHO", float, base.rho),
        ell_max=_read("RIEMOPT_ELL_MAX", int, base.ell_max),
        log_level=_read("RIEMOPT_LOG_LEVEL", _log_level, base.log_level),
    )
