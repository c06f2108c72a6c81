"""Integer partition encoded as a lottery allocation instance."""

import itertools
import logging
from collections.abc import Iterable, Sequence

import numpy as np

from cptalloc.core.exceptions import BudgetExceededError, InvalidInputError
from cptalloc.core.permsearch import solve_sys_exhaustive
from cptalloc.models import (
    AgentSpec,
    ExplicitWeights,
    LotteryScheme,
    NetworkInstance,
    PartitionGadget,
    ReductionOptions,
    SearchResult,
    ValueFunctionSpec,
)

logger = logging.getLogger(__name__)

DEFAULT_EPSILON = 0.1


def _check_integers(integers: Sequence[int]) -> tuple[int, ...]:
    if not integers:
        raise InvalidInputError("At least one integer is required")
    values = tuple(int(c) for c in integers)
    if any(c != original for c, original in zip(values, integers)) or any(c < 1 for c in values):
        raise InvalidInputError(f"Integers must be positive, got {list(integers)}")
    return values


def partition_gadget(integers: Sequence[int], epsilon: float = DEFAULT_EPSILON) -> PartitionGadget:
    """Build the two-outcome network whose optimum reaches T iff a partition exists.

    Player i has a private link of capacity c_i and shares one more link
    of capacity sum(c) / 2 with everyone. All values are linear with
    decision weights (1 - epsilon, epsilon).

    Raises:
        InvalidInputError: If an integer is not positive or epsilon is outside (0, 1/2)
    """
    values = _check_integers(integers)
    if not 0.0 < epsilon < 0.5:
        raise InvalidInputError(f"epsilon must lie in (0, 1/2), got {epsilon}")

    n = len(values)
    total = sum(values)
    agent = AgentSpec(
        value=ValueFunctionSpec.linear(),
        weights=ExplicitWeights(explicit_h=[1.0 - epsilon, epsilon]),
    )
    instance = NetworkInstance(
        capacities=[float(c) for c in values] + [total / 2.0],
        routes=[[i, n] for i in range(n)],
        k=2,
        agents=[agent] * n,
    )
    return PartitionGadget(
        integers=values,
        epsilon=epsilon,
        instance=instance,
        threshold=(1.0 - epsilon) * total,
    )


def partition_witness(gadget: PartitionGadget, subset: Iterable[int]) -> LotteryScheme:
    """Scheme giving each player its full capacity in one outcome.

    Players in ``subset`` take outcome 0, the others outcome 1.
    """
    chosen = set(subset)
    n = len(gadget.integers)
    if not chosen <= set(range(n)):
        raise InvalidInputError(f"Subset indices must lie in 0..{n - 1}")
    z = np.array([[float(c), 0.0] for c in gadget.integers])
    pi = np.array([[0, 1] if i in chosen else [1, 0] for i in range(n)], dtype=np.int64)
    return LotteryScheme(z=z, pi=pi)


def has_partition(integers: Sequence[int]) -> bool:
    """Subset-sum enumeration: can the integers be split into two equal halves?"""
    values = _check_integers(integers)
    total = sum(values)
    if total % 2:
        return False
    half = total // 2
    return any(
        sum(combo) == half
        for size in range(len(values) + 1)
        for combo in itertools.combinations(values, size)
    )


def solve_partition(
    integers: Sequence[int],
    options: ReductionOptions | None = None,
    epsilon: float = DEFAULT_EPSILON,
) -> tuple[PartitionGadget, SearchResult, bool]:
    """Build the gadget, solve it exhaustively and compare with T.

    Returns:
        Tuple of (gadget, search result, partition exists)

    Raises:
        BudgetExceededError: If more than ``options.n_max`` integers are given
    """
    options = options or ReductionOptions()
    if len(integers) > options.n_max:
        raise BudgetExceededError(
            f"{len(integers)} integers exceed n_max = {options.n_max}",
            required=len(integers),
        )
    gadget = partition_gadget(integers, epsilon)
    result = solve_sys_exhaustive(gadget.instance, options.search)
    decision = result.value >= gadget.threshold - options.tol
    logger.info(
        "Gadget for %s: W_ps %.6f vs T %.6f -> %s",
        list(gadget.integers),
        result.value,
        gadget.threshold,
        decision,
    )
    return gadget, result, decision


def decide_partition(
    integers: Sequence[int],
    options: ReductionOptions | None = None,
    epsilon: float = DEFAULT_EPSILON,
) -> bool:
    """Decide integer partition by solving the gadget exhaustively."""
    return solve_partition(integers, options, epsilon)[2]
