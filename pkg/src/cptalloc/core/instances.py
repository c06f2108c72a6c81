"""Reference instances and seeded random instance generation."""

from collections.abc import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from cptalloc.core.cpt import agent_weights, evaluate_value
from cptalloc.core.network import cyclic_profile
from cptalloc.models import (
    AgentSpec,
    ExplicitWeights,
    FloatArray,
    LotteryScheme,
    NetworkInstance,
    ValueFamily,
    ValueFunctionSpec,
    WeightingFamily,
    WeightingFunctionSpec,
)

EXAMPLE1_PLAYERS = 10
EXAMPLE1_CAPACITY = 10.0
EXAMPLE1_BETA = 0.88
EXAMPLE1_GAMMA = 0.61

# Anti-aligned profile of the two-player example: player 1 ranks outcome 1 first
EXAMPLE2_PROFILE = [[0, 1], [1, 0]]


def example1_instance() -> NetworkInstance:
    """Ten identical power/kt players sharing one link of capacity 10, k = 10."""
    agent = AgentSpec(
        value=ValueFunctionSpec.power(EXAMPLE1_BETA),
        weights=WeightingFunctionSpec.kt(EXAMPLE1_GAMMA),
    )
    return NetworkInstance(
        capacities=[EXAMPLE1_CAPACITY],
        routes=[[0] for _ in range(EXAMPLE1_PLAYERS)],
        k=EXAMPLE1_PLAYERS,
        agents=[agent] * EXAMPLE1_PLAYERS,
    )


def example1_scheme(x: float) -> LotteryScheme:
    """Cyclic lottery: each player wins x in one outcome, the rest is shared equally."""
    n, c = EXAMPLE1_PLAYERS, EXAMPLE1_CAPACITY
    x = min(x, c)
    row = np.full(n, max(c - x, 0.0) / (n - 1))
    row[0] = x
    return LotteryScheme(z=np.tile(row, (n, 1)), pi=cyclic_profile(n, n))


def example1_objective(x: float) -> float:
    """Aggregate CPT value U(x) of the cyclic lottery."""
    instance = example1_instance()
    agent = instance.agents[0]
    h = agent_weights(agent, instance.k)
    z = example1_scheme(x).z[0]
    return EXAMPLE1_PLAYERS * float(np.dot(h, evaluate_value(agent.value, z)))


def example1_scan(step: float = 0.01) -> tuple[float, float, FloatArray]:
    """Scan U(x) over [c/n, c] and refine the best grid point.

    Returns:
        Tuple of (x_star, U(x_star), curve) with curve rows (x, U(x))
    """
    lo = EXAMPLE1_CAPACITY / EXAMPLE1_PLAYERS
    count = int(round((EXAMPLE1_CAPACITY - lo) / step)) + 1
    xs = np.linspace(lo, EXAMPLE1_CAPACITY, count)
    values = np.array([example1_objective(float(x)) for x in xs])
    best = int(np.argmax(values))
    left = float(xs[max(best - 1, 0)])
    right = float(xs[min(best + 1, xs.size - 1)])
    result = minimize_scalar(
        lambda x: -example1_objective(float(x)),
        bounds=(left, right),
        method="bounded",
        options={"xatol": 1e-10},
    )
    x_star, value = float(result.x), -float(result.fun)
    if values[best] > value:
        x_star, value = float(xs[best]), float(values[best])
    return x_star, value, np.column_stack([xs, values])


def example2_instance() -> NetworkInstance:
    """Two players on one link of capacity 2.9 with explicit weights, k = 2."""
    return NetworkInstance(
        capacities=[2.9],
        routes=[[0], [0]],
        k=2,
        agents=[
            AgentSpec(
                value=ValueFunctionSpec.log_affine(a=1.0, b=0.0, s=0.05, c=3.0),
                weights=ExplicitWeights(explicit_h=[1 / 3, 2 / 3]),
            ),
            AgentSpec(
                value=ValueFunctionSpec.log_affine(a=0.4, b=0.6, s=0.05, c=3.0),
                weights=ExplicitWeights(explicit_h=[5 / 6, 1 / 6]),
            ),
        ],
    )


def _random_value(rng: np.random.Generator, family: ValueFamily) -> ValueFunctionSpec:
    if family is ValueFamily.POWER:
        return ValueFunctionSpec.power(float(rng.uniform(0.5, 0.95)))
    if family is ValueFamily.LOG_AFFINE:
        return ValueFunctionSpec.log_affine(
            a=float(rng.uniform(0.5, 2.0)),
            b=float(rng.uniform(0.0, 0.5)),
            s=float(rng.uniform(0.05, 0.5)),
        )
    return ValueFunctionSpec.linear()


def _random_weighting(rng: np.random.Generator, family: WeightingFamily) -> WeightingFunctionSpec:
    if family is WeightingFamily.KT:
        return WeightingFunctionSpec.kt(float(rng.uniform(0.5, 0.95)))
    if family is WeightingFamily.POWER_CONVEX:
        return WeightingFunctionSpec.power_convex(float(rng.uniform(1.2, 2.0)))
    return WeightingFunctionSpec.identity()


def random_instance(
    rng: np.random.Generator,
    max_players: int = 3,
    max_outcomes: int = 3,
    max_links: int = 2,
    families: Sequence[ValueFamily] = (ValueFamily.LOG_AFFINE,),
    weighting: Sequence[WeightingFamily] = (WeightingFamily.KT, WeightingFamily.IDENTITY),
) -> NetworkInstance:
    """Small random instance with non-empty routes and capacities in [1, 3].

    Args:
        rng: Seeded generator
        max_players: Upper bound on n
        max_outcomes: Upper bound on k
        max_links: Upper bound on m
        families: Value families to draw from
        weighting: Weighting families to draw from
    """
    n = int(rng.integers(1, max_players + 1))
    k = int(rng.integers(1, max_outcomes + 1))
    m = int(rng.integers(1, max_links + 1))

    routes = []
    for _ in range(n):
        mask = rng.random(m) < 0.5
        mask[rng.integers(m)] = True
        routes.append([int(j) for j in np.flatnonzero(mask)])

    agents = [
        AgentSpec(
            value=_random_value(rng, families[int(rng.integers(len(families)))]),
            weights=_random_weighting(rng, weighting[int(rng.integers(len(weighting)))]),
        )
        for _ in range(n)
    ]
    return NetworkInstance(
        capacities=[float(c) for c in rng.uniform(1.0, 3.0, size=m)],
        routes=routes,
        k=k,
        agents=agents,
    )
