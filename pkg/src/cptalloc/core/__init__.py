"""Solvers and numerical building blocks for lottery allocation."""

from cptalloc.core.artifacts import ArtifactWriter
from cptalloc.core.avg import solve_sys_avg, v_avg
from cptalloc.core.config import Settings
from cptalloc.core.cpt import cpt_value, decision_weights, lstar, pstar
from cptalloc.core.kernel import IsotonicProblem, isotonic_concave_max
from cptalloc.core.network import is_feasible_allocation, is_feasible_scheme, prices_from_duals
from cptalloc.core.permsearch import dual_minimize, duality_gap, solve_sys
from cptalloc.core.reduction import decide_partition, partition_gadget
from cptalloc.core.solver_fix import check_equilibrium, solve_sys_fix
from cptalloc.core.validation import ValidationResult, validate_instance

__all__ = [
    "ArtifactWriter",
    "IsotonicProblem",
    "Settings",
    "ValidationResult",
    "check_equilibrium",
    "cpt_value",
    "decide_partition",
    "decision_weights",
    "dual_minimize",
    "duality_gap",
    "is_feasible_allocation",
    "is_feasible_scheme",
    "isotonic_concave_max",
    "lstar",
    "partition_gadget",
    "prices_from_duals",
    "pstar",
    "solve_sys",
    "solve_sys_avg",
    "solve_sys_fix",
    "v_avg",
    "validate_instance",
]
