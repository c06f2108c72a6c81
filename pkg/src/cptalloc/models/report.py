"""Solver reports."""

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from cptalloc.models.instance import NetworkInstance
from cptalloc.models.scheme import (
    FloatArray,
    IntArray,
    LotteryScheme,
    PriceSystem,
    array_to_json,
    float_to_json,
)


def rank_increments(z: FloatArray) -> FloatArray:
    """delta(l) = z(l) - z(l+1) with z(k+1) = 0."""
    return z - np.concatenate([z[:, 1:], np.zeros((z.shape[0], 1))], axis=1)


@dataclass(frozen=True)
class TraceRecord:
    """One iteration of an iterative solver."""

    iteration: int
    value: float
    max_violation: float


@dataclass(frozen=True, eq=False)
class SolveReport:
    """Solution of a fixed-permutation problem with its certificate."""

    value: float
    scheme: LotteryScheme
    prices: PriceSystem
    kkt_residual: float
    iterations: int
    converged: bool
    method: str
    trajectory: list[TraceRecord] = field(default_factory=list)

    @property
    def delta(self) -> FloatArray:
        return rank_increments(self.scheme.z)

    @property
    def budgets(self) -> FloatArray:
        """m(l) = r(l) * delta(l)."""
        return self.prices.r * self.delta

    def to_dict(self) -> dict[str, Any]:
        return {
            "value": float_to_json(self.value),
            "method": self.method,
            "converged": self.converged,
            "iterations": self.iterations,
            "kkt_residual": float_to_json(self.kkt_residual),
            **self.scheme.to_dict(),
            **self.prices.to_dict(),
            "delta": array_to_json(self.delta),
            "m": array_to_json(self.budgets),
        }


@dataclass(frozen=True)
class EquilibriumCheck:
    """Residuals of the market equilibrium conditions."""

    residuals: dict[str, float]
    rates_positive: bool

    @property
    def max_residual(self) -> float:
        worst = max(self.residuals.values(), default=0.0)
        return worst if self.rates_positive else float("inf")

    def is_equilibrium(self, tol: float = 1e-6) -> bool:
        return self.max_residual <= tol

    def to_dict(self) -> dict[str, Any]:
        return {
            "residuals": {name: float_to_json(v) for name, v in self.residuals.items()},
            "rates_positive": self.rates_positive,
            "max_residual": float_to_json(self.max_residual),
        }


@dataclass(frozen=True, eq=False)
class SearchResult:
    """Best permutation profile found by a search."""

    profile: IntArray
    report: SolveReport
    evaluations: int
    method: str

    @property
    def value(self) -> float:
        return self.report.value

    def to_dict(self) -> dict[str, Any]:
        return {
            "method": self.method,
            "evaluations": self.evaluations,
            "pi_star": array_to_json(self.profile),
            "report": self.report.to_dict(),
        }


@dataclass(frozen=True, eq=False)
class DualEvaluation:
    """Value of the dual function at given link prices."""

    value: float
    z: FloatArray
    pi: IntArray
    lam: FloatArray

    @property
    def bounded(self) -> bool:
        return bool(np.isfinite(self.value))

    def to_dict(self) -> dict[str, Any]:
        return {
            "value": float_to_json(self.value),
            "bounded": self.bounded,
            "z": array_to_json(self.z),
            "pi": array_to_json(self.pi),
            "lambda": array_to_json(self.lam),
        }


@dataclass(frozen=True, eq=False)
class DualMinimum:
    """Result of minimizing the dual function."""

    value: float
    evaluation: DualEvaluation
    seed_value: float
    evaluations: int

    @property
    def lam(self) -> FloatArray:
        return self.evaluation.lam

    def to_dict(self) -> dict[str, Any]:
        return {
            "W_ds": float_to_json(self.value),
            "seed_value": float_to_json(self.seed_value),
            "evaluations": self.evaluations,
            "evaluation": self.evaluation.to_dict(),
        }


@dataclass(frozen=True, eq=False)
class GapReport:
    """Primal and dual values of the full system problem."""

    w_ps: float
    w_ds: float
    pi_star: IntArray
    lambda_star: FloatArray
    ordering_consistent: bool | None = None

    @property
    def gap(self) -> float:
        return self.w_ds - self.w_ps

    def to_dict(self) -> dict[str, Any]:
        return {
            "W_ps": self.w_ps,
            "W_ds": self.w_ds,
            "gap": self.gap,
            "pi_star": array_to_json(self.pi_star),
            "lambda_star": array_to_json(self.lambda_star),
            "ordering_consistent": self.ordering_consistent,
        }


@dataclass(frozen=True)
class CaseResult:
    """Case-restricted minimum of the two-player dual example."""

    player1_case: str
    player2_case: str
    value: float
    lam: tuple[float, float]

    def to_dict(self) -> dict[str, Any]:
        return {
            "cases": f"({self.player1_case},{self.player2_case})",
            "value": self.value,
            "lambda": list(self.lam),
        }


@dataclass(frozen=True, eq=False)
class AvgValue:
    """Value of the averaged CPT problem at a given mean allocation."""

    value: float
    z: FloatArray
    multiplier: float


@dataclass(frozen=True, eq=False)
class AvgSolveReport:
    """Solution of the average system problem."""

    value: float
    z: FloatArray
    lambda_bar: FloatArray
    rho_bar: FloatArray
    kkt_residual: float
    iterations: int
    converged: bool
    tail_structure: list[bool | None] = field(default_factory=list)
    note: str = (
        "The relaxed doubly-stochastic problem has the same optimal value; "
        "it is not solved separately."
    )

    @property
    def z_bar(self) -> FloatArray:
        return self.z.mean(axis=1)

    def to_dict(self) -> dict[str, Any]:
        return {
            "W_pa": self.value,
            "z": array_to_json(self.z),
            "z_bar": array_to_json(self.z_bar),
            "lambda_bar": array_to_json(self.lambda_bar),
            "rho_bar": array_to_json(self.rho_bar),
            "kkt_residual": float_to_json(self.kkt_residual),
            "iterations": self.iterations,
            "converged": self.converged,
            "tail_structure": self.tail_structure,
            "note": self.note,
        }


@dataclass(frozen=True, eq=False)
class PartitionGadget:
    """Network instance encoding an integer partition question."""

    integers: tuple[int, ...]
    epsilon: float
    instance: NetworkInstance
    threshold: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "integers": list(self.integers),
            "epsilon": self.epsilon,
            "instance": self.instance.to_json(),
            "T": self.threshold,
        }


@dataclass(frozen=True, eq=False)
class GridOracleResult:
    """Grid brute-force optimum with its a-priori error bound."""

    value: float
    scheme: LotteryScheme
    bound: float
    evaluated: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "value": self.value,
            "bound": float_to_json(self.bound),
            "evaluated": self.evaluated,
            **self.scheme.to_dict(),
        }
