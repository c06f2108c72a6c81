"""Grid brute-force references for tiny instances."""

import itertools
import logging
import math

import numpy as np
from numpy.typing import ArrayLike

from cptalloc.core.cpt import agent_weights, evaluate_value
from cptalloc.core.exceptions import BudgetExceededError, InvalidInputError
from cptalloc.core.validation import require_valid
from cptalloc.models import (
    FloatArray,
    GridOracleResult,
    IntArray,
    LotteryScheme,
    NetworkInstance,
    ValueFunctionSpec,
)

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 20_000_000
MAX_PLAYERS = 3
MAX_OUTCOMES = 3
MAX_ISOTONIC_OUTCOMES = 5


def descending_grid(grid_step: float, z_cap: float, k: int) -> FloatArray:
    """All descending k-vectors with entries on the grid 0, step, ..., <= z_cap."""
    if grid_step <= 0:
        raise InvalidInputError(f"Grid step must be positive, got {grid_step}")
    top = int(math.floor(z_cap / grid_step + 1e-9))
    combos = itertools.combinations_with_replacement(range(top, -1, -1), k)
    return np.array(list(combos), dtype=float).reshape(-1, k) * grid_step


def _grid_size(grid_step: float, z_cap: float, k: int) -> int:
    levels = int(math.floor(z_cap / grid_step + 1e-9)) + 1
    return math.comb(levels + k - 1, k)


def grid_brute_force_sys(
    instance: NetworkInstance,
    grid_step: float = 0.01,
    z_cap: float | None = None,
    budget: int = DEFAULT_BUDGET,
) -> GridOracleResult:
    """Grid optimum of the full system problem.

    Every profile is enumerated. All players but the last range over the
    descending grid; the last takes its exact best response, the running
    minimum of the capacity left on its route.

    Returns:
        GridOracleResult whose value lies within ``bound`` below the optimum

    Raises:
        BudgetExceededError: If the instance or grid is too large
    """
    require_valid(instance)
    n, k = instance.num_players, instance.k
    if n > MAX_PLAYERS or k > MAX_OUTCOMES:
        raise BudgetExceededError(f"Grid oracle supports n <= {MAX_PLAYERS}, k <= {MAX_OUTCOMES}")
    cap = max(instance.capacities) if z_cap is None else z_cap

    per_player = _grid_size(grid_step, cap, k)
    profiles = math.factorial(k) ** n
    required = profiles * per_player ** (n - 1)
    if required > budget:
        raise BudgetExceededError(f"Grid oracle needs {required} evaluations", required=required)

    weights = [agent_weights(agent, k) for agent in instance.agents]
    grid = descending_grid(grid_step, cap, k)
    grid_values = [
        evaluate_value(agent.value, grid) @ weights[i] for i, agent in enumerate(instance.agents)
    ]

    # Joint grid points of the enumerated players, as index tuples
    if n > 1:
        mesh = np.meshgrid(*[np.arange(grid.shape[0])] * (n - 1), indexing="ij")
        indices = np.stack([m.ravel() for m in mesh], axis=1)
    else:
        indices = np.zeros((1, 0), dtype=np.int64)

    capacities = np.asarray(instance.capacities, dtype=float)
    last = n - 1
    last_route = instance.routes[last]
    best_value = -math.inf
    best_z: FloatArray | None = None
    best_pi: IntArray | None = None

    for pi in itertools.product(itertools.permutations(range(k)), repeat=n):
        profile = np.array(pi, dtype=np.int64)
        loads = np.zeros((indices.shape[0], instance.num_links, k))
        partial = np.zeros(indices.shape[0])
        for i in range(last):
            z_i = grid[indices[:, i]]
            y_i = z_i[:, profile[i]]
            for j in instance.routes[i]:
                loads[:, j, :] += y_i
            partial += grid_values[i][indices[:, i]]

        remaining = capacities[None, :, None] - loads
        feasible = (remaining >= -1e-12).all(axis=(1, 2))
        if not feasible.any():
            continue

        # Capacity left for the last player at each of its ranks
        by_outcome = remaining[:, last_route, :].min(axis=1)
        by_rank = np.empty_like(by_outcome)
        by_rank[:, profile[last]] = by_outcome
        z_last = np.maximum(np.minimum.accumulate(by_rank, axis=1), 0.0)
        total = partial + evaluate_value(instance.agents[last].value, z_last) @ weights[last]
        total = np.where(feasible, total, -math.inf)

        index = int(np.argmax(total))
        if total[index] > best_value:
            best_value = float(total[index])
            best_z = np.vstack([grid[indices[index, i]] for i in range(last)] + [z_last[index]])
            best_pi = profile

    assert best_z is not None and best_pi is not None
    # Rounding each rank down to the grid costs a concave v at most v(step) - v(0)
    bound = sum(
        (
            float(evaluate_value(agent.value, grid_step) - evaluate_value(agent.value, 0.0))
            for agent in instance.agents[:last]
        ),
        0.0,
    )
    logger.info("Grid oracle value %.6f (bound %.3g) over %d points", best_value, bound, required)
    return GridOracleResult(
        value=best_value,
        scheme=LotteryScheme(z=best_z, pi=best_pi),
        bound=bound,
        evaluated=required,
    )


def grid_brute_force_isotonic(
    h: ArrayLike,
    vf: ValueFunctionSpec,
    prices: ArrayLike,
    grid_step: float,
    z_cap: float,
    budget: int = DEFAULT_BUDGET,
) -> float:
    """Grid maximum of sum h v(z) - sum rho z over descending z in [0, z_cap]."""
    h = np.asarray(h, dtype=float)
    prices = np.asarray(prices, dtype=float)
    k = h.shape[0]
    if k > MAX_ISOTONIC_OUTCOMES:
        raise BudgetExceededError(f"Isotonic grid oracle supports k <= {MAX_ISOTONIC_OUTCOMES}")
    required = _grid_size(grid_step, z_cap, k)
    if required > budget:
        raise BudgetExceededError(
            f"Isotonic grid oracle needs {required} points", required=required
        )
    grid = descending_grid(grid_step, z_cap, k)
    values = evaluate_value(vf, grid) @ h - grid @ prices
    return float(values.max())
