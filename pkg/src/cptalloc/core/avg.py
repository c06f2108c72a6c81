"""The average system problem and the optimal-lottery tail structure.

Link constraints hold only in expectation here, so each player sees one
scalar price rho_bar and the problem decomposes into per-player USER_AVG
problems with uniform per-rank prices rho_bar / k.
"""

import logging

import numpy as np
from numpy.typing import ArrayLike
from scipy.optimize import brentq, linprog, minimize

from cptalloc.core.cpt import (
    agent_weights,
    asymptotic_slope,
    derivative,
    evaluate_value,
    is_affine,
    lstar,
    pstar,
)
from cptalloc.core.exceptions import (
    ConvergenceError,
    InvalidInputError,
    StructureUndefinedError,
    UnboundedProblemError,
)
from cptalloc.core.kernel import IsotonicProblem, isotonic_concave_max
from cptalloc.core.validation import require_valid
from cptalloc.models import (
    AgentSpec,
    AvgOptions,
    AvgSolveReport,
    AvgValue,
    FloatArray,
    NetworkInstance,
)
from cptalloc.models.report import rank_increments

logger = logging.getLogger(__name__)

CAP_FACTOR = 2.0
MEAN_TOL = 1e-9
BRACKET_STEPS = 200


def _uniform_solve(
    agent: AgentSpec, h: FloatArray, rho_bar: float, cap: float | None
) -> FloatArray:
    k = h.shape[0]
    solution = isotonic_concave_max(
        IsotonicProblem(h=h, vf=agent.value, prices=np.full(k, rho_bar / k), cap=cap)
    )
    if not solution.bounded:
        raise UnboundedProblemError(f"USER_AVG unbounded at rho_bar = {rho_bar}")
    return solution.z


def solve_user_avg(agent: AgentSpec, rho_bar: float, k: int) -> FloatArray:
    """Maximize sum h v(z) - (rho_bar / k) sum z over descending z >= 0.

    Raises:
        InvalidInputError: If rho_bar is not positive
        UnboundedProblemError: If rho_bar is below the value's asymptotic slope
    """
    if not rho_bar > 0:
        raise InvalidInputError(f"rho_bar must be positive, got {rho_bar}")
    return _uniform_solve(agent, agent_weights(agent, k), rho_bar, None)


def v_avg(agent: AgentSpec, z_bar: float, k: int) -> AvgValue:
    """Best CPT value over descending lotteries with mean z_bar.

    The mean constraint is priced by a scalar multiplier found by root
    finding; the multiplier is also the derivative of the value in z_bar.
    Where the mean jumps at the root (affine values), the two one-sided
    maximizers are mixed to hit z_bar exactly.
    """
    if z_bar < 0:
        raise InvalidInputError(f"Mean allocation must be nonnegative, got {z_bar}")
    h = agent_weights(agent, k)

    if z_bar == 0:
        z = np.zeros(k)
        prefix = np.cumsum(h) / np.arange(1, k + 1)
        multiplier = k * float(prefix.max()) * float(derivative(agent.value, 0.0))
        value = float(np.dot(h, evaluate_value(agent.value, z)))
        return AvgValue(value=value, z=z, multiplier=multiplier)

    cap = k * z_bar

    def excess(rho_bar: float) -> float:
        return float(_uniform_solve(agent, h, rho_bar, cap).mean()) - z_bar

    hi = 1.0
    for _ in range(BRACKET_STEPS):
        if excess(hi) <= 0:
            break
        hi *= 2.0
    else:
        raise ConvergenceError(f"Could not bracket the multiplier for mean {z_bar}")
    lo = hi / 2.0
    for _ in range(BRACKET_STEPS):
        if excess(lo) >= 0:
            break
        lo /= 2.0
    else:
        raise ConvergenceError(f"Could not bracket the multiplier for mean {z_bar}")

    if excess(lo) == 0:
        root = lo
    else:
        root = brentq(excess, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)

    step = max(abs(root) * 1e-12, 1e-300)
    z_lo = _uniform_solve(agent, h, max(root - step, 0.0), cap)
    z_hi = _uniform_solve(agent, h, root + step, cap)
    mean_lo, mean_hi = float(z_lo.mean()), float(z_hi.mean())
    if mean_lo - mean_hi > MEAN_TOL:
        t = min(max((mean_lo - z_bar) / (mean_lo - mean_hi), 0.0), 1.0)
        z = (1.0 - t) * z_lo + t * z_hi
    else:
        z = _uniform_solve(agent, h, root, cap)
        if z.mean() > 0:
            z = z * (z_bar / z.mean())

    return AvgValue(value=float(np.dot(h, evaluate_value(agent.value, z))), z=z, multiplier=root)


def check_tail_structure(z: ArrayLike, p_star: float, k: int, tol: float = 1e-6) -> bool:
    """True iff z(l*) = ... = z(k) within tol.

    Raises:
        StructureUndefinedError: If p* > (k-1)/k
    """
    z = np.asarray(z, dtype=float)
    if z.shape != (k,):
        raise InvalidInputError(f"Allocation must have {k} entries, got shape {z.shape}")
    start = lstar(p_star, k)
    return bool(np.abs(z[start:] - z[-1]).max() <= tol)


def _tail_verdict(agent: AgentSpec, z: FloatArray, k: int, tol: float) -> bool | None:
    if not agent.has_weighting_function:
        return None
    if is_affine(agent.value):
        logger.warning("Skipping tail-structure check for affine value function")
        return None
    try:
        return check_tail_structure(z, pstar(agent.weights), k, tol)
    except StructureUndefinedError as e:
        logger.debug("No tail verdict: %s", e)
        return None


def avg_kkt_residual(
    instance: NetworkInstance,
    z: ArrayLike,
    lambda_bar: ArrayLike,
) -> float:
    """Largest violation of the optimality conditions of the average problem."""
    z = np.asarray(z, dtype=float)
    lambda_bar = np.asarray(lambda_bar, dtype=float)
    k = instance.k

    capacities = np.asarray(instance.capacities, dtype=float)
    means = z.mean(axis=1)
    loads = np.array([means[users].sum() for users in instance.link_users()])
    slack = capacities - loads

    rho_bar = np.array([lambda_bar[route].sum() for route in instance.routes])
    rates = np.outer(rho_bar / k, np.arange(1, k + 1))
    marginals = np.array(
        [
            agent_weights(agent, k) * derivative(agent.value, z[i])
            for i, agent in enumerate(instance.agents)
        ]
    )
    alpha = rates - np.cumsum(marginals, axis=1)
    delta = rank_increments(z)

    return max(
        max(0.0, float(-slack.min(initial=0.0))),
        max(0.0, float(-delta.min(initial=0.0))),
        max(0.0, float(-lambda_bar.min(initial=0.0))),
        float(np.abs(lambda_bar * slack).max(initial=0.0)),
        max(0.0, float(-alpha.min(initial=0.0))),
        float(np.abs(alpha * delta).max(initial=0.0)),
    )


def _rho_bar(instance: NetworkInstance, lambda_bar: FloatArray) -> FloatArray:
    return np.array([lambda_bar[route].sum() for route in instance.routes])


def _inner(
    instance: NetworkInstance,
    weights: list[FloatArray],
    caps: FloatArray,
    lambda_bar: FloatArray,
) -> tuple[FloatArray, float]:
    rho_bar = _rho_bar(instance, lambda_bar)
    k = instance.k
    z = np.empty((instance.num_players, k))
    total = 0.0
    for i, agent in enumerate(instance.agents):
        solution = isotonic_concave_max(
            IsotonicProblem(
                h=weights[i], vf=agent.value, prices=np.full(k, rho_bar[i] / k), cap=caps[i]
            )
        )
        z[i] = solution.z
        total += solution.value
    return z, total


def _solve_linear_program(
    instance: NetworkInstance,
    weights: list[FloatArray],
) -> tuple[FloatArray, FloatArray]:
    n, m, k = instance.num_players, instance.num_links, instance.k
    cost = np.concatenate(
        [-weights[i] * asymptotic_slope(agent.value) for i, agent in enumerate(instance.agents)]
    )
    link_rows = np.zeros((m, n * k))
    for j, players in enumerate(instance.link_users()):
        for i in players:
            link_rows[j, i * k : (i + 1) * k] = 1.0 / k
    order_rows = np.zeros((n * max(k - 1, 0), n * k))
    for i in range(n):
        for rank in range(k - 1):
            order_rows[i * (k - 1) + rank, i * k + rank + 1] = 1.0
            order_rows[i * (k - 1) + rank, i * k + rank] = -1.0

    res = linprog(
        cost,
        A_ub=np.vstack([link_rows, order_rows]),
        b_ub=np.concatenate(
            [np.asarray(instance.capacities, dtype=float), np.zeros(order_rows.shape[0])]
        ),
        bounds=(0, None),
        method="highs",
    )
    if res.status != 0:
        raise ConvergenceError(f"Linear program failed: {res.message}")
    return np.maximum(res.x.reshape(n, k), 0.0), np.maximum(-res.ineqlin.marginals[:m], 0.0)


def solve_sys_avg(
    instance: NetworkInstance,
    options: AvgOptions | None = None,
) -> AvgSolveReport:
    """Solve the average system problem by dual descent on scalar link prices.

    Args:
        instance: Valid network instance
        options: Solver options (defaults to AvgOptions())

    Returns:
        AvgSolveReport with per-player lotteries, link duals, player prices
        and per-agent tail-structure verdicts
    """
    options = options or AvgOptions()
    require_valid(instance)
    k = instance.k
    weights = [agent_weights(agent, k) for agent in instance.agents]
    logger.info(
        "Solving average problem (%d players, %d links, k=%d)",
        instance.num_players,
        instance.num_links,
        k,
    )

    iterations = 1
    if all(is_affine(agent.value) for agent in instance.agents):
        z, lambda_bar = _solve_linear_program(instance, weights)
    else:
        caps = np.array(
            [CAP_FACTOR * k * instance.route_capacity(i) for i in range(instance.num_players)]
        )
        capacities = np.asarray(instance.capacities, dtype=float)
        users = instance.link_users()

        def dual(x: FloatArray) -> tuple[float, FloatArray]:
            lam = np.maximum(x, 0.0)
            z, total = _inner(instance, weights, caps, lam)
            means = z.mean(axis=1)
            loads = np.array([means[u].sum() for u in users])
            return total + float(lam @ capacities), capacities - loads

        x0 = np.array(
            [
                np.mean(
                    [float(derivative(instance.agents[i].value, capacities[j] / len(u))) for i in u]
                )
                if u
                else 0.0
                for j, u in enumerate(users)
            ]
        )
        iterations = 0
        for _ in range(options.polish_rounds):
            res = minimize(
                dual,
                x0,
                jac=True,
                method="L-BFGS-B",
                bounds=[(0.0, None)] * x0.size,
                options={"maxiter": options.max_iter, "ftol": 1e-15, "gtol": 1e-12},
            )
            iterations += int(res.nit)
            done = np.allclose(res.x, x0, rtol=0.0, atol=1e-14)
            x0 = res.x
            if done:
                break
        lambda_bar = np.maximum(x0, 0.0)
        z, _ = _inner(instance, weights, caps, lambda_bar)

    # Restore the mean link constraints by a common scaling
    means = z.mean(axis=1)
    capacities = np.asarray(instance.capacities, dtype=float)
    loads = np.array([means[u].sum() for u in instance.link_users()])
    over = loads > capacities
    if over.any():
        theta = float((capacities[over] / loads[over]).min())
        logger.debug("Scaling average allocations by %.12f", theta)
        z = z * theta

    residual = avg_kkt_residual(instance, z, lambda_bar)
    converged = residual <= options.kkt_tol
    if not converged:
        logger.warning("Average problem finished with KKT residual %.3e", residual)

    value = float(
        sum(
            np.dot(weights[i], evaluate_value(agent.value, z[i]))
            for i, agent in enumerate(instance.agents)
        )
    )
    verdicts = [
        _tail_verdict(agent, z[i], k, options.tail_tol) for i, agent in enumerate(instance.agents)
    ]
    logger.info("Average problem value %.10f, residual %.2e", value, residual)
    return AvgSolveReport(
        value=value,
        z=z,
        lambda_bar=lambda_bar,
        rho_bar=_rho_bar(instance, lambda_bar),
        kkt_residual=residual,
        iterations=iterations,
        converged=converged,
        tail_structure=verdicts,
    )

