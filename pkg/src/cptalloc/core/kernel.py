"""Concave one-dimensional and order-constrained maximization.

The isotonic solver is the inner problem of every other solver: given
decision weights h, a value function v and per-rank prices rho, it
maximizes

    sum_l h(l) v(z(l)) - sum_l rho(l) z(l)

over descending z >= 0, optionally with z <= cap, by pooling adjacent
violators. Each pool's level solves (sum h) v'(zeta) = sum rho in closed
form.
"""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import minimize_scalar

from cptalloc.core.cpt import asymptotic_slope, derivative, evaluate_value, is_affine
from cptalloc.core.exceptions import InvalidInputError
from cptalloc.models import FloatArray, ValueFamily, ValueFunctionSpec

logger = logging.getLogger(__name__)

RELATIVE_SLACK = 1e-12
ABSOLUTE_SLACK = 1e-15


class SolveStatus(str, Enum):
    """Outcome of an isotonic solve."""

    OPTIMAL = "optimal"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True, eq=False)
class IsotonicProblem:
    """Weights, value function, per-rank prices and an optional cap.

    Usage:
        problem = IsotonicProblem(h=h, vf=vf, prices=rho)
        solution = isotonic_concave_max(problem)
    """

    h: FloatArray
    vf: ValueFunctionSpec
    prices: FloatArray
    cap: float | None = None

    def __post_init__(self) -> None:
        h = np.asarray(self.h, dtype=float)
        prices = np.asarray(self.prices, dtype=float)
        if h.ndim != 1 or h.shape != prices.shape:
            raise InvalidInputError(
                f"Weights {h.shape} and prices {prices.shape} must be equal-length vectors"
            )
        if (h <= 0).any():
            raise InvalidInputError("Decision weights must be positive")
        if (prices < 0).any():
            raise InvalidInputError("Prices must be nonnegative")
        if self.cap is not None and not self.cap >= 0:
            raise InvalidInputError(f"Cap must be nonnegative, got {self.cap}")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "prices", prices)

    @property
    def k(self) -> int:
        return int(self.h.shape[0])


@dataclass(frozen=True, eq=False)
class IsotonicSolution:
    """Maximizer, ordering duals and objective value."""

    z: FloatArray
    alpha: FloatArray
    value: float
    status: SolveStatus
    cap_dual: float = 0.0
    pools: list[tuple[int, int]] = field(default_factory=list)

    @property
    def bounded(self) -> bool:
        return self.status is SolveStatus.OPTIMAL


def is_unbounded(h: FloatArray, vf: ValueFunctionSpec, prices: FloatArray) -> bool:
    """True when some prefix of ranks earns more per unit than it pays.

    Strictly concave values grow slower than their asymptotic slope, so a
    prefix rate equal to the slope is still unbounded for them; affine
    values need the slope to strictly exceed the rate.
    """
    weight_prefix = np.cumsum(h) * asymptotic_slope(vf)
    rate = np.cumsum(prices)
    if is_affine(vf):
        return bool((rate < weight_prefix * (1.0 - RELATIVE_SLACK)).any())
    return bool((rate <= weight_prefix * (1.0 + RELATIVE_SLACK) + ABSOLUTE_SLACK).any())


def _pool_level(vf: ValueFunctionSpec, weight: float, price: float) -> float:
    """Unconstrained maximizer of weight * v(zeta) - price * zeta.

    Affine values give +inf, 0 (indifferent) or -inf. Log-affine levels
    may be negative; they are clipped once pooling is done.
    """
    slope = asymptotic_slope(vf)
    if is_affine(vf):
        gain = weight * slope
        if gain > price * (1.0 + RELATIVE_SLACK):
            return math.inf
        if gain < price * (1.0 - RELATIVE_SLACK):
            return -math.inf
        return 0.0

    if vf.family is ValueFamily.POWER:
        if price <= 0:
            return math.inf
        beta = vf.param("beta")
        return float((price / (weight * beta)) ** (1.0 / (beta - 1.0)))

    a, b, s = vf.param("a"), vf.param("b"), vf.param("s")
    y = price / weight
    if y <= b:
        return math.inf
    return a / (y - b) - s


def _pool_adjacent_violators(
    h: FloatArray,
    vf: ValueFunctionSpec,
    prices: FloatArray,
) -> list[tuple[int, int, float]]:
    """Pools as (start, stop, level) with non-increasing levels."""
    pools: list[tuple[int, int, float, float, float]] = []
    for index in range(h.shape[0]):
        start, stop = index, index + 1
        weight, price = float(h[index]), float(prices[index])
        level = _pool_level(vf, weight, price)
        while pools and pools[-1][2] < level:
            prev_start, _, _, prev_weight, prev_price = pools.pop()
            start = prev_start
            weight += prev_weight
            price += prev_price
            level = _pool_level(vf, weight, price)
        pools.append((start, stop, level, weight, price))
    return [(start, stop, level) for start, stop, level, _, _ in pools]


def isotonic_concave_max(problem: IsotonicProblem) -> IsotonicSolution:
    """Solve an order-constrained concave maximization exactly.

    Args:
        problem: Weights, value function, prices and optional cap

    Returns:
        IsotonicSolution. When no cap is set and the objective is unbounded
        above, z and value are infinite and status is UNBOUNDED.
    """
    h, vf, prices, cap = problem.h, problem.vf, problem.prices, problem.cap
    k = problem.k

    if cap is None and is_unbounded(h, vf, prices):
        logger.debug("Isotonic problem unbounded at prices %s", prices)
        return IsotonicSolution(
            z=np.full(k, math.inf),
            alpha=np.zeros(k),
            value=math.inf,
            status=SolveStatus.UNBOUNDED,
        )

    upper = math.inf if cap is None else cap
    z = np.empty(k)
    pools = _pool_adjacent_violators(h, vf, prices)
    for start, stop, level in pools:
        z[start:stop] = min(max(level, 0.0), upper)

    # Ordering duals from cumulative stationarity
    marginal = h * derivative(vf, z)
    gap = np.cumsum(prices) - np.cumsum(marginal)
    cap_dual = 0.0
    first_stop = pools[0][1]
    if cap is not None and cap > 0 and z[0] >= cap:
        cap_dual = max(0.0, -float(gap[first_stop - 1]))
    alpha = np.maximum(gap + cap_dual, 0.0)

    value = float(np.dot(h, evaluate_value(vf, z)) - np.dot(prices, z))
    return IsotonicSolution(
        z=z,
        alpha=alpha,
        value=value,
        status=SolveStatus.OPTIMAL,
        cap_dual=cap_dual,
        pools=[(start, stop) for start, stop, _ in pools],
    )


def maximize_1d_concave(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-8,
) -> tuple[float, float]:
    """Maximize a concave scalar function on [lo, hi].

    Returns:
        (x*, f(x*))

    Raises:
        InvalidInputError: If lo > hi
    """
    if lo > hi:
        raise InvalidInputError(f"Empty interval [{lo}, {hi}]")
    if lo == hi:
        return lo, f(lo)

    res = minimize_scalar(
        lambda x: -f(x),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": tol},
    )
    best_x, best_f = float(res.x), -float(res.fun)
    for x in (lo, hi):
        fx = f(x)
        if fx > best_f:
            best_x, best_f = x, fx
    return best_x, best_f
