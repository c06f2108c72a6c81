"""Data models for cptalloc."""

from cptalloc.models.agent import (
    AgentSpec,
    ExplicitWeights,
    ValueFamily,
    ValueFunctionSpec,
    WeightingFamily,
    WeightingFunctionSpec,
)
from cptalloc.models.instance import NetworkInstance
from cptalloc.models.options import (
    AvgOptions,
    DualOptions,
    FixMethod,
    ReductionOptions,
    SearchMethod,
    SearchOptions,
    SolverOptions,
)
from cptalloc.models.report import (
    AvgSolveReport,
    AvgValue,
    CaseResult,
    DualEvaluation,
    DualMinimum,
    EquilibriumCheck,
    GapReport,
    GridOracleResult,
    PartitionGadget,
    SearchResult,
    SolveReport,
    TraceRecord,
)
from cptalloc.models.scheme import FloatArray, IntArray, LotteryScheme, PriceSystem

__all__ = [
    "AgentSpec",
    "AvgOptions",
    "AvgSolveReport",
    "AvgValue",
    "CaseResult",
    "DualEvaluation",
    "DualMinimum",
    "DualOptions",
    "EquilibriumCheck",
    "ExplicitWeights",
    "FixMethod",
    "FloatArray",
    "GapReport",
    "GridOracleResult",
    "IntArray",
    "LotteryScheme",
    "NetworkInstance",
    "PartitionGadget",
    "PriceSystem",
    "ReductionOptions",
    "SearchMethod",
    "SearchOptions",
    "SearchResult",
    "SolveReport",
    "SolverOptions",
    "TraceRecord",
    "ValueFamily",
    "ValueFunctionSpec",
    "WeightingFamily",
    "WeightingFunctionSpec",
]
