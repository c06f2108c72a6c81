"""Value functions, probability weighting and CPT valuation.

All functions are pure and accept either scalars or numpy arrays where
noted. Outcomes are gains only; there is no reference point.
"""

import logging
import math
from collections.abc import Sequence

import numpy as np
from numpy.typing import ArrayLike
from scipy.optimize import minimize_scalar

from cptalloc.core.exceptions import (
    InvalidInputError,
    StructureUndefinedError,
    UnsupportedFamilyError,
)
from cptalloc.models import (
    AgentSpec,
    ExplicitWeights,
    FloatArray,
    ValueFamily,
    ValueFunctionSpec,
    WeightingFamily,
    WeightingFunctionSpec,
)

logger = logging.getLogger(__name__)

DERIVATIVE_CLAMP = 1e12
PROBABILITY_TOL = 1e-12
PSTAR_GRID_STEP = 1e-5
PSTAR_TOL = 1e-8
LSTAR_TOL = 1e-12

Weighting = WeightingFunctionSpec | ExplicitWeights


# Value functions


def evaluate_value(vf: ValueFunctionSpec, x: ArrayLike) -> FloatArray:
    """v(x), elementwise."""
    x = np.asarray(x, dtype=float)
    if vf.family is ValueFamily.POWER:
        return np.power(x, vf.param("beta"))
    if vf.family is ValueFamily.LOG_AFFINE:
        a, b, s, c = vf.param("a"), vf.param("b"), vf.param("s"), vf.param("c")
        return a * np.log(x + s) + b * (x + s) + c
    return x.copy()


def derivative(vf: ValueFunctionSpec, x: ArrayLike) -> FloatArray:
    """v'(x), elementwise, clamped at DERIVATIVE_CLAMP."""
    x = np.asarray(x, dtype=float)
    if vf.family is ValueFamily.POWER:
        beta = vf.param("beta")
        if beta == 1.0:
            return np.ones_like(x)
        with np.errstate(divide="ignore"):
            slope = beta * np.power(x, beta - 1.0)
        return np.minimum(slope, DERIVATIVE_CLAMP)
    if vf.family is ValueFamily.LOG_AFFINE:
        a, b, s = vf.param("a"), vf.param("b"), vf.param("s")
        return np.minimum(a / (x + s) + b, DERIVATIVE_CLAMP)
    return np.ones_like(x)


def asymptotic_slope(vf: ValueFunctionSpec) -> float:
    """Limit of v'(x) as x grows."""
    if vf.family is ValueFamily.POWER:
        return 1.0 if vf.param("beta") == 1.0 else 0.0
    if vf.family is ValueFamily.LOG_AFFINE:
        return vf.param("b")
    return 1.0


def is_affine(vf: ValueFunctionSpec) -> bool:
    """True when v' is constant, so v never grows faster than its slope."""
    if vf.family is ValueFamily.POWER:
        return vf.param("beta") == 1.0
    if vf.family is ValueFamily.LOG_AFFINE:
        return vf.param("a") == 0.0
    return True


def is_strictly_concave(vf: ValueFunctionSpec) -> bool:
    return not is_affine(vf)


def marginal_inverse(vf: ValueFunctionSpec, y: float) -> float:
    """Smallest x >= 0 with v'(x) <= y, or inf when v' never drops to y.

    Only defined for strictly concave families.
    """
    if is_affine(vf):
        raise UnsupportedFamilyError("Affine value functions have no marginal inverse")

    if vf.family is ValueFamily.POWER:
        if y <= 0:
            return math.inf
        beta = vf.param("beta")
        return float((y / beta) ** (1.0 / (beta - 1.0)))

    a, b, s = vf.param("a"), vf.param("b"), vf.param("s")
    if y <= b:
        return math.inf
    return max(a / (y - b) - s, 0.0)


def value_eval(vf: ValueFunctionSpec, x: float) -> tuple[float, float, float]:
    """Evaluate a value function.

    Args:
        vf: Value function specification
        x: Nonnegative allocation

    Returns:
        (v(x), v'(x) clamped at DERIVATIVE_CLAMP, asymptotic slope)

    Raises:
        InvalidInputError: If x is negative
    """
    if x < 0:
        raise InvalidInputError(f"Value functions are defined for x >= 0, got {x}")
    return (
        float(evaluate_value(vf, x)),
        float(derivative(vf, x)),
        asymptotic_slope(vf),
    )


# Probability weighting


def weight_array(wf: WeightingFunctionSpec, p: ArrayLike) -> FloatArray:
    """w(p), elementwise, with w(0) = 0 and w(1) = 1 exactly."""
    p = np.asarray(p, dtype=float)
    if wf.family is WeightingFamily.IDENTITY:
        out = p.copy()
    elif wf.family is WeightingFamily.POWER_CONVEX:
        out = np.power(p, wf.param("a"))
    else:
        gamma = wf.param("gamma")
        with np.errstate(divide="ignore", invalid="ignore"):
            num = np.power(p, gamma)
            out = num / np.power(num + np.power(1.0 - p, gamma), 1.0 / gamma)
    out = np.where(p <= 0.0, 0.0, out)
    return np.where(p >= 1.0, 1.0, out)


def weight_eval(wf: WeightingFunctionSpec, p: float) -> float:
    """Evaluate a weighting function at a probability.

    Raises:
        InvalidInputError: If p is outside [0, 1]
    """
    if not 0.0 <= p <= 1.0:
        raise InvalidInputError(f"Probability must be in [0, 1], got {p}")
    return float(weight_array(wf, p))


def decision_weights(wf: Weighting, k: int) -> FloatArray:
    """h(l) = w(l/k) - w((l-1)/k) for l = 1..k, summing to one exactly."""
    if k < 1:
        raise InvalidInputError(f"Outcome count must be at least 1, got {k}")
    if isinstance(wf, ExplicitWeights):
        if len(wf.explicit_h) != k:
            raise InvalidInputError(
                f"explicit_h has {len(wf.explicit_h)} entries but k = {k}"
            )
        return np.asarray(wf.explicit_h, dtype=float)

    cumulative = weight_array(wf, np.arange(k + 1) / k)
    h = np.diff(cumulative)
    h[-1] = 1.0 - cumulative[k - 1]
    return h


def agent_weights(agent: AgentSpec, k: int) -> FloatArray:
    return decision_weights(agent.weights, k)


# CPT valuation


def cpt_value(agent: AgentSpec, prospect: Sequence[tuple[float, float]]) -> float:
    """CPT value of a prospect given as (probability, outcome) pairs.

    Outcomes are ranked from best to worst; equal outcomes are merged so the
    result does not depend on input order or on how mass is split.

    Raises:
        InvalidInputError: On negative inputs, probabilities not summing to
            one, or a non-uniform prospect for an explicit-weights agent
    """
    if not prospect:
        raise InvalidInputError("Prospect cannot be empty")

    probs = np.array([p for p, _ in prospect], dtype=float)
    outcomes = np.array([y for _, y in prospect], dtype=float)
    if (probs < 0).any():
        raise InvalidInputError("Probabilities must be nonnegative")
    if (outcomes < 0).any():
        raise InvalidInputError("Outcomes must be nonnegative")
    total = math.fsum(probs)
    if abs(total - 1.0) > PROBABILITY_TOL:
        raise InvalidInputError(f"Probabilities must sum to 1, got {total!r}")

    if isinstance(agent.weights, ExplicitWeights):
        k = len(agent.weights.explicit_h)
        if len(prospect) != k or np.abs(probs - 1.0 / k).max() > PROBABILITY_TOL:
            raise InvalidInputError(
                "Agents with explicit decision weights only value uniform "
                f"prospects over {k} outcomes"
            )
        z = np.sort(outcomes)[::-1]
        return cpt_value_uniform(agent_weights(agent, k), agent.value, z)

    order = np.argsort(-outcomes, kind="stable")
    levels, starts = np.unique(-outcomes[order], return_index=True)
    masses = np.add.reduceat(probs[order], starts)
    cumulative = np.cumsum(masses)
    cumulative[-1] = 1.0
    w = weight_array(agent.weights, np.concatenate([[0.0], cumulative]))
    d = np.diff(w)
    return float(np.dot(d, evaluate_value(agent.value, -levels)))


def cpt_value_uniform(h: ArrayLike, vf: ValueFunctionSpec, z: ArrayLike) -> float:
    """sum_l h(l) v(z(l)) for a descending allocation vector."""
    h = np.asarray(h, dtype=float)
    z = np.asarray(z, dtype=float)
    if h.shape != z.shape:
        raise InvalidInputError(f"Weights {h.shape} and allocations {z.shape} differ in shape")
    return float(np.dot(h, evaluate_value(vf, z)))


# Concave envelope of the weighting function


def chord_slope(wf: WeightingFunctionSpec, p: ArrayLike) -> FloatArray:
    """g(p) = (1 - w(p)) / (1 - p) on [0, 1)."""
    p = np.asarray(p, dtype=float)
    return (1.0 - weight_array(wf, p)) / (1.0 - p)


def pstar(
    wf: Weighting,
    tol: float = PSTAR_TOL,
    grid_step: float = PSTAR_GRID_STEP,
) -> float:
    """Smallest probability beyond which the concave envelope of w is linear.

    Found as the smallest global minimizer of the chord slope g: a dense
    grid picks the first minimizing point, which a bounded scalar search
    then refines to ``tol``.

    Raises:
        UnsupportedFamilyError: If the agent has explicit weights only
    """
    if isinstance(wf, ExplicitWeights):
        raise UnsupportedFamilyError("p* needs a weighting function, not explicit weights")

    grid = np.arange(0.0, 1.0, grid_step)
    g = chord_slope(wf, grid)
    best = int(np.argmin(g))
    p0, g0 = float(grid[best]), float(g[best])

    lo = max(0.0, p0 - grid_step)
    hi = min(p0 + grid_step, float(grid[-1]))
    if hi > lo:
        res = minimize_scalar(
            lambda p: float(chord_slope(wf, p)),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": tol},
        )
        if float(res.fun) < g0:
            p0 = float(res.x)

    logger.debug("p* for %s: %.10f", wf.family.value, p0)
    return p0


def concave_envelope(
    wf: WeightingFunctionSpec,
    p: ArrayLike,
    p_star: float | None = None,
) -> FloatArray:
    """w*(p): w on [0, p*], then the chord from (p*, w(p*)) to (1, 1)."""
    if p_star is None:
        p_star = pstar(wf)
    p = np.asarray(p, dtype=float)
    w_star = float(weight_array(wf, p_star))
    chord = w_star + (p - p_star) * (1.0 - w_star) / (1.0 - p_star)
    return np.where(p <= p_star, weight_array(wf, p), chord)


def lstar(p_star: float, k: int) -> int:
    """First outcome index (0-based) l with l/k >= p*.

    Raises:
        StructureUndefinedError: If p* > (k-1)/k
    """
    if k < 1:
        raise InvalidInputError(f"Outcome count must be at least 1, got {k}")
    if p_star > (k - 1) / k + LSTAR_TOL:
        raise StructureUndefinedError(
            f"p* = {p_star:.6g} exceeds (k-1)/k = {(k - 1) / k:.6g}; no equal tail is implied"
        )
    for index in range(k):
        if index / k >= p_star - LSTAR_TOL:
            return index
    return k - 1


def weights_table(
    wf: WeightingFunctionSpec,
    step: float = 0.01,
) -> list[tuple[float, float, float]]:
    """Rows (p, w(p), w*(p)) on a grid over [0, 1]."""
    if not 0.0 < step <= 1.0:
        raise InvalidInputError(f"Grid step must be in (0, 1], got {step}")
    count = int(round(1.0 / step))
    grid = np.linspace(0.0, 1.0, count + 1)
    w = weight_array(wf, grid)
    w_star = concave_envelope(wf, grid)
    return [(float(p), float(a), float(b)) for p, a, b in zip(grid, w, w_star)]
