"""Solver option models."""

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field


class FixMethod(str, Enum):
    """Algorithms for the fixed-permutation problem."""

    DUAL = "dual"
    SUBGRADIENT = "subgradient"
    TATONNEMENT = "tatonnement"


class SearchMethod(str, Enum):
    """Algorithms for the search over permutation profiles."""

    EXHAUSTIVE = "exhaustive"
    LOCAL = "local"


class SolverOptions(BaseModel):
    """Options for fixed-permutation solves."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    method: FixMethod = FixMethod.DUAL
    kkt_tol: float = Field(1e-8, gt=0)
    val_tol: float = Field(1e-6, gt=0)
    max_iter: int = Field(200_000, ge=1)
    fix_tol: float = Field(1e-10, gt=0)
    polish_rounds: int = Field(50, ge=1)
    damping: float = Field(0.5, gt=0, le=1)
    min_damping: float = Field(1e-4, gt=0, le=1)
    tatonnement_max_iter: int = Field(5000, ge=1)
    trace: bool = False


class SearchOptions(BaseModel):
    """Options for the search over permutation profiles."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    method: SearchMethod = SearchMethod.EXHAUSTIVE
    budget: int = Field(10_000, ge=1)
    restarts: int = Field(4, ge=0)
    seed: int = 0
    workers: int = Field(1, ge=1)
    max_evaluations: int = Field(2_000, ge=1)
    tie_tol: float = Field(1e-9, ge=0)
    solver: SolverOptions = Field(default_factory=SolverOptions)


class AvgOptions(BaseModel):
    """Options for the average system problem."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kkt_tol: float = Field(1e-8, gt=0)
    max_iter: int = Field(20_000, ge=1)
    polish_rounds: int = Field(3, ge=1)
    tail_tol: float = Field(1e-6, gt=0)


class DualOptions(BaseModel):
    """Options for minimizing the dual function over link prices."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    max_dim: int = Field(6, ge=1)
    grid_budget: int = Field(4_000, ge=1)
    xatol: float = Field(1e-9, gt=0)
    fatol: float = Field(1e-12, gt=0)
    rounds: int = Field(3, ge=1)
    gap_tol: float = Field(1e-6, ge=0)
    avg: AvgOptions = Field(default_factory=AvgOptions)
    search: SearchOptions = Field(default_factory=SearchOptions)


class ReductionOptions(BaseModel):
    """Options for deciding partition instances through the gadget."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    n_max: int = Field(8, ge=1)
    tol: float = Field(1e-6, gt=0)
    search: SearchOptions = Field(default_factory=SearchOptions)
