"""Fixed-permutation system problem and its market decomposition.

With the permutation profile fixed, the system problem is a concave
program over per-player descending allocation vectors. It is solved here
three ways:

- dual: quasi-Newton descent on the link duals, each evaluation being one
  exact isotonic solve per player (LP with HiGHS when every value
  function is affine);
- subgradient: projected subgradient steps on the duals, then polished
  by the dual method;
- tatonnement: the network posts rates, users answer with budgets, the
  network solves an Eisenberg-Gale program, until prices settle.

Every report carries the KKT residual of the allocation it returns.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike
from scipy.optimize import linprog, minimize

from cptalloc.core.cpt import (
    agent_weights,
    asymptotic_slope,
    derivative,
    evaluate_value,
    is_affine,
)
from cptalloc.core.exceptions import ConvergenceError, InvalidInputError, UnboundedProblemError
from cptalloc.core.kernel import IsotonicProblem, isotonic_concave_max
from cptalloc.core.network import (
    outcome_loads,
    player_prices,
    prices_from_duals,
    scheme_compose,
    validate_profile,
)
from cptalloc.core.validation import require_valid
from cptalloc.models import (
    AgentSpec,
    EquilibriumCheck,
    FixMethod,
    FloatArray,
    IntArray,
    LotteryScheme,
    NetworkInstance,
    PriceSystem,
    SolveReport,
    SolverOptions,
    TraceRecord,
    ValueFunctionSpec,
    WeightingFunctionSpec,
)
from cptalloc.models.report import rank_increments

logger = logging.getLogger(__name__)

CAP_FACTOR = 2.0
NET_MAX_ITER = 500
ARMIJO = 1e-4
INCREMENT_TOL = 1e-7
TRACE_EVERY = 100
DAMPING_RECOVERY = 1.5


def _weights(instance: NetworkInstance) -> list[FloatArray]:
    return [agent_weights(agent, instance.k) for agent in instance.agents]


def system_value(instance: NetworkInstance, z: FloatArray) -> float:
    """Aggregate CPT value sum_i sum_l h_i(l) v_i(z_i(l))."""
    total = 0.0
    for i, (agent, h) in enumerate(zip(instance.agents, _weights(instance))):
        total += float(np.dot(h, evaluate_value(agent.value, z[i])))
    return total


def _cumulative_marginals(instance: NetworkInstance, z: FloatArray) -> FloatArray:
    """G[i, l] = sum_{s <= l} h_i(s) v_i'(z_i(s))."""
    marginals = np.empty_like(z)
    for i, (agent, h) in enumerate(zip(instance.agents, _weights(instance))):
        marginals[i] = h * derivative(agent.value, z[i])
    return np.cumsum(marginals, axis=1)


def _restore_feasibility(instance: NetworkInstance, scheme: LotteryScheme) -> LotteryScheme:
    """Scale every allocation by one factor so all link loads fit."""
    loads = outcome_loads(instance, scheme_compose(scheme))
    capacities = np.asarray(instance.capacities, dtype=float)[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(loads > capacities, capacities / loads, 1.0)
    theta = float(ratios.min()) if ratios.size else 1.0
    if theta < 1.0:
        logger.debug("Scaling allocations by %.12f to restore feasibility", theta)
        return LotteryScheme(z=scheme.z * theta, pi=scheme.pi)
    return scheme


def kkt_residual(
    instance: NetworkInstance,
    pi: ArrayLike,
    z: ArrayLike,
    lam: ArrayLike,
) -> float:
    """Largest violation of the optimality conditions of the fixed-profile problem.

    Covers primal feasibility, ordering, dual sign, link complementarity
    and the ordering duals alpha = r - G implied by stationarity.
    """
    profile = np.asarray(pi, dtype=np.int64)
    z = np.asarray(z, dtype=float)
    lam = np.asarray(lam, dtype=float)

    loads = outcome_loads(instance, np.take_along_axis(z, profile, axis=1))
    slack = np.asarray(instance.capacities, dtype=float)[:, None] - loads
    delta = rank_increments(z)

    rates = np.cumsum(player_prices(instance, profile, lam), axis=1)
    alpha = rates - _cumulative_marginals(instance, z)

    parts = [
        max(0.0, float(-slack.min(initial=0.0))),
        max(0.0, float(-delta.min(initial=0.0))),
        max(0.0, float(-lam.min(initial=0.0))),
        float(np.abs(lam * slack).max(initial=0.0)),
        max(0.0, float(-alpha.min(initial=0.0))),
        float(np.abs(alpha * delta).max(initial=0.0)),
    ]
    return max(parts)


def build_report(
    instance: NetworkInstance,
    profile: IntArray,
    z: FloatArray,
    lam: FloatArray,
    iterations: int,
    method: str,
    kkt_tol: float,
    trajectory: list[TraceRecord] | None = None,
    converged: bool | None = None,
) -> SolveReport:
    """Assemble a SolveReport with prices, ordering duals and residual.

    ``converged`` defaults to whether the KKT residual meets ``kkt_tol``.
    """
    lam = np.maximum(lam, 0.0)
    scheme = _restore_feasibility(instance, LotteryScheme(z=np.maximum(z, 0.0), pi=profile))
    prices = prices_from_duals(instance, profile, lam)
    alpha = np.maximum(prices.r - _cumulative_marginals(instance, scheme.z), 0.0)
    prices = PriceSystem(lam=prices.lam, rho=prices.rho, r=prices.r, alpha=alpha)

    residual = kkt_residual(instance, profile, scheme.z, lam)
    value = system_value(instance, scheme.z)
    if converged is None:
        converged = residual <= kkt_tol
    if not converged:
        logger.warning("%s solve finished with KKT residual %.3e > %.1e", method, residual, kkt_tol)
    return SolveReport(
        value=value,
        scheme=scheme,
        prices=prices,
        kkt_residual=residual,
        iterations=iterations,
        converged=converged,
        method=method,
        trajectory=trajectory or [],
    )


@dataclass(frozen=True, eq=False)
class _FixedProblem:
    """Dual function of the fixed-profile problem with non-binding caps."""

    instance: NetworkInstance
    profile: IntArray
    weights: list[FloatArray]
    caps: FloatArray

    @classmethod
    def build(cls, instance: NetworkInstance, profile: IntArray) -> "_FixedProblem":
        caps = np.array(
            [CAP_FACTOR * instance.route_capacity(i) for i in range(instance.num_players)]
        )
        return cls(instance, profile, _weights(instance), caps)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.instance.num_links, self.instance.k)

    def inner(self, lam: FloatArray) -> tuple[FloatArray, float]:
        """Per-player maximizers at link duals lam and the summed inner value."""
        rho = player_prices(self.instance, self.profile, lam)
        z = np.empty_like(rho)
        total = 0.0
        for i, agent in enumerate(self.instance.agents):
            solution = isotonic_concave_max(
                IsotonicProblem(h=self.weights[i], vf=agent.value, prices=rho[i], cap=self.caps[i])
            )
            z[i] = solution.z
            total += solution.value
        return z, total

    def dual(self, flat: FloatArray) -> tuple[float, FloatArray]:
        """Dual value and gradient c - load, flattened."""
        lam = np.maximum(flat.reshape(self.shape), 0.0)
        z, total = self.inner(lam)
        capacities = np.asarray(self.instance.capacities, dtype=float)[:, None]
        loads = outcome_loads(self.instance, np.take_along_axis(z, self.profile, axis=1))
        value = total + float((lam * capacities).sum())
        return value, (capacities - loads).ravel()


def initial_duals(instance: NetworkInstance) -> FloatArray:
    """Fair-share starting prices: marginal value at an equal split, spread over k."""
    users = instance.link_users()
    share = np.array(
        [
            min(instance.capacities[j] / len(users[j]) for j in route)
            for route in instance.routes
        ]
    )
    lam = np.zeros((instance.num_links, instance.k))
    for j, players in enumerate(users):
        if not players:
            continue
        marginal = [
            float(derivative(instance.agents[i].value, share[i])) / len(instance.routes[i])
            for i in players
        ]
        lam[j, :] = np.mean(marginal) / instance.k
    return lam


def _polish_residual(problem: _FixedProblem, lam: FloatArray) -> float:
    z, _ = problem.inner(lam)
    scheme = _restore_feasibility(
        problem.instance, LotteryScheme(z=np.maximum(z, 0.0), pi=problem.profile)
    )
    return kkt_residual(problem.instance, problem.profile, scheme.z, lam)


def _solve_dual(
    problem: _FixedProblem,
    options: SolverOptions,
    start: FloatArray | None = None,
) -> tuple[FloatArray, int]:
    """L-BFGS-B on the dual, restarted until the KKT residual meets kkt_tol.

    Restarts stop early when the iteration budget is spent, the iterate
    no longer moves, or ``options.polish_rounds`` restarts have run.
    """
    x0 = (initial_duals(problem.instance) if start is None else start).ravel()
    bounds = [(0.0, None)] * x0.size
    iterations = 0
    for round_index in range(options.polish_rounds):
        res = minimize(
            problem.dual,
            x0,
            jac=True,
            method="L-BFGS-B",
            bounds=bounds,
            options={
                "maxiter": max(options.max_iter - iterations, 1),
                "ftol": 1e-15,
                "gtol": 1e-12,
                "maxcor": 20,
            },
        )
        iterations += int(res.nit)
        stalled = np.allclose(res.x, x0, rtol=0.0, atol=1e-14)
        x0 = res.x
        residual = _polish_residual(problem, np.maximum(x0.reshape(problem.shape), 0.0))
        logger.debug(
            "L-BFGS-B round %d: dual %.12f, residual %.3e after %d iterations (%s)",
            round_index,
            res.fun,
            residual,
            res.nit,
            res.message,
        )
        if residual <= options.kkt_tol or stalled or iterations >= options.max_iter:
            break
    return np.maximum(x0.reshape(problem.shape), 0.0), iterations


def _solve_linear_program(
    instance: NetworkInstance,
    profile: IntArray,
) -> tuple[FloatArray, FloatArray]:
    """Exact solve when every value function is affine."""
    n, m, k = instance.num_players, instance.num_links, instance.k
    weights = _weights(instance)

    cost = np.concatenate(
        [-weights[i] * asymptotic_slope(agent.value) for i, agent in enumerate(instance.agents)]
    )

    link_rows = np.zeros((m * k, n * k))
    for j, players in enumerate(instance.link_users()):
        for outcome in range(k):
            for i in players:
                link_rows[j * k + outcome, i * k + profile[i, outcome]] = 1.0

    order_rows = np.zeros((n * max(k - 1, 0), n * k))
    for i in range(n):
        for rank in range(k - 1):
            row = i * (k - 1) + rank
            order_rows[row, i * k + rank + 1] = 1.0
            order_rows[row, i * k + rank] = -1.0

    a_ub = np.vstack([link_rows, order_rows])
    b_ub = np.concatenate(
        [np.repeat(np.asarray(instance.capacities, dtype=float), k), np.zeros(order_rows.shape[0])]
    )
    res = linprog(cost, A_ub=a_ub, b_ub=b_ub, bounds=(0, None), method="highs")
    if res.status != 0:
        raise ConvergenceError(f"Linear program failed: {res.message}")

    z = np.maximum(res.x.reshape(n, k), 0.0)
    lam = np.maximum(-res.ineqlin.marginals[: m * k].reshape(m, k), 0.0)
    return z, lam


def _solve_subgradient(
    problem: _FixedProblem,
    options: SolverOptions,
) -> tuple[FloatArray, int, list[TraceRecord]]:
    """Diminishing-step projected subgradient on the duals, averaged over the second half."""
    capacities = np.asarray(problem.instance.capacities, dtype=float)
    step0 = 1.0 / float(capacities.max())
    lam = initial_duals(problem.instance)
    running = np.zeros_like(lam)
    averaged = 0
    trajectory: list[TraceRecord] = []

    iteration = 0
    for iteration in range(1, options.max_iter + 1):
        value, grad = problem.dual(lam.ravel())
        grad = grad.reshape(lam.shape)
        violation = float(np.abs(np.where(lam > 0, grad, np.minimum(grad, 0.0))).max())
        if options.trace and (iteration % TRACE_EVERY == 0 or iteration == 1):
            trajectory.append(TraceRecord(iteration, value, violation))
        if violation <= options.kkt_tol:
            break

        lam = np.maximum(lam - step0 / math.sqrt(iteration) * grad, 0.0)
        if iteration > options.max_iter // 2:
            running += lam
            averaged += 1

    if averaged:
        lam = running / averaged
    logger.debug("Subgradient phase ended after %d iterations", iteration)
    return lam, iteration, trajectory


def solve_sys_fix(
    instance: NetworkInstance,
    pi: ArrayLike,
    options: SolverOptions | None = None,
) -> SolveReport:
    """Solve the system problem at a fixed permutation profile.

    Args:
        instance: Valid network instance
        pi: n x k permutation profile (outcome -> rank, 0-based)
        options: Solver options (defaults to SolverOptions())

    Returns:
        SolveReport; ``converged`` is False when the KKT residual stays
        above ``options.kkt_tol``
    """
    options = options or SolverOptions()
    require_valid(instance)
    profile = validate_profile(instance, pi)

    if options.method is FixMethod.TATONNEMENT:
        return tatonnement(instance, profile, options)

    logger.info(
        "Solving fixed profile (%d players, %d links, k=%d) by %s",
        instance.num_players,
        instance.num_links,
        instance.k,
        options.method.value,
    )

    if all(is_affine(agent.value) for agent in instance.agents):
        z, lam = _solve_linear_program(instance, profile)
        report = build_report(instance, profile, z, lam, 1, "lp", options.kkt_tol)
        logger.info("LP value %.10f, residual %.2e", report.value, report.kkt_residual)
        return report

    problem = _FixedProblem.build(instance, profile)
    trajectory: list[TraceRecord] = []
    iterations = 0
    start = None
    if options.method is FixMethod.SUBGRADIENT:
        start, iterations, trajectory = _solve_subgradient(problem, options)

    lam, polish_iterations = _solve_dual(problem, options, start)
    z, _ = problem.inner(lam)
    report = build_report(
        instance,
        profile,
        z,
        lam,
        iterations + polish_iterations,
        options.method.value,
        options.kkt_tol,
        trajectory,
    )
    logger.info("Fixed-profile value %.10f, residual %.2e", report.value, report.kkt_residual)
    return report


def solve_deterministic(
    instance: NetworkInstance,
    options: SolverOptions | None = None,
) -> SolveReport:
    """Best deterministic allocation: the one-outcome problem with identity weighting."""
    agents = [
        AgentSpec(value=agent.value, weights=WeightingFunctionSpec.identity())
        for agent in instance.agents
    ]
    single = NetworkInstance(
        capacities=instance.capacities,
        routes=instance.routes,
        k=1,
        agents=agents,
    )
    return solve_sys_fix(single, np.zeros((instance.num_players, 1), dtype=np.int64), options)


# Market decomposition


def solve_user(r: ArrayLike, h: ArrayLike, vf: ValueFunctionSpec) -> FloatArray:
    """Budgets a user spends given cumulative rates r.

    Substituting delta(l) = m(l) / r(l) turns the user problem into an
    isotonic problem with per-rank prices diff(r).

    Raises:
        InvalidInputError: If r(1) <= 0 or r decreases
        UnboundedProblemError: If the rates are too low for a maximum to exist
    """
    rates = np.asarray(r, dtype=float)
    if rates.ndim != 1 or rates.size == 0:
        raise InvalidInputError("Rates must be a non-empty vector")
    if rates[0] <= 0:
        raise InvalidInputError(f"Rates must satisfy r(1) > 0, got {rates[0]}")
    rho = np.diff(rates, prepend=0.0)
    if (rho < 0).any():
        raise InvalidInputError("Rates must be nondecreasing")

    problem = IsotonicProblem(h=np.asarray(h, dtype=float), vf=vf, prices=rho)
    solution = isotonic_concave_max(problem)
    if not solution.bounded:
        raise UnboundedProblemError(f"User problem unbounded at rates {rates.tolist()}")
    delta = rank_increments(solution.z[None, :])[0]
    return rates * delta


def _user_budgets(
    instance: NetworkInstance,
    weights: list[FloatArray],
    rates: FloatArray,
    caps: FloatArray,
) -> FloatArray:
    """Budgets from capped user problems, so low rates stay bounded."""
    budgets = np.zeros_like(rates)
    rho = np.diff(rates, axis=1, prepend=0.0)
    for i, agent in enumerate(instance.agents):
        solution = isotonic_concave_max(
            IsotonicProblem(
                h=weights[i], vf=agent.value, prices=np.maximum(rho[i], 0.0), cap=caps[i]
            )
        )
        budgets[i] = rates[i] * rank_increments(solution.z[None, :])[0]
    return budgets


def _rate_matrix(instance: NetworkInstance, profile: IntArray) -> FloatArray:
    """B with r = B @ vec(lam): B[(i,t),(j,l)] = 1 if j on route i and pi_i(l) <= t."""
    n, m, k = instance.num_players, instance.num_links, instance.k
    matrix = np.zeros((n * k, m * k))
    for i, route in enumerate(instance.routes):
        for t in range(k):
            outcomes = np.flatnonzero(profile[i] <= t)
            for j in route:
                matrix[i * k + t, j * k + outcomes] = 1.0
    return matrix


def solve_net(
    instance: NetworkInstance,
    pi: ArrayLike,
    m: ArrayLike,
    options: SolverOptions | None = None,
) -> tuple[FloatArray, FloatArray]:
    """Eisenberg-Gale allocation of increments for given budgets.

    Solves the dual in the link prices by projected Newton steps with an
    Armijo backtracking search; increments are then delta = m / r.

    Args:
        instance: Network instance
        pi: n x k permutation profile
        m: n x k nonnegative budgets

    Returns:
        (delta n x k, lam m x k). Zero budgets get zero increments.
    """
    options = options or SolverOptions()
    profile = validate_profile(instance, pi)
    budgets = np.asarray(m, dtype=float)
    if budgets.shape != (instance.num_players, instance.k):
        raise InvalidInputError(f"Budgets must have shape {profile.shape}, got {budgets.shape}")
    if (budgets < 0).any():
        raise InvalidInputError("Budgets must be nonnegative")

    shape = (instance.num_links, instance.k)
    if not budgets.any():
        return np.zeros_like(budgets), np.zeros(shape)

    flat_budgets = budgets.ravel()
    active = flat_budgets > 0
    matrix = _rate_matrix(instance, profile)[active]
    weights = flat_budgets[active]
    capacities = np.repeat(np.asarray(instance.capacities, dtype=float), instance.k)

    def objective(lam: FloatArray) -> float:
        rates = matrix @ lam
        if (rates <= 0).any():
            return math.inf
        return float(lam @ capacities - weights @ np.log(rates))

    lam = np.full(capacities.size, weights.sum() / (instance.k * capacities.sum()))
    stop = 1e-12 * max(1.0, float(capacities.max()))
    value = objective(lam)

    for iteration in range(NET_MAX_ITER):
        rates = matrix @ lam
        grad = capacities - matrix.T @ (weights / rates)
        projected = lam - np.maximum(lam - grad, 0.0)
        if np.abs(projected).max() <= stop:
            break

        bound = (lam <= 1e-15) & (grad > 0)
        free = ~bound
        hessian = matrix[:, free].T @ ((weights / rates**2)[:, None] * matrix[:, free])
        ridge = 1e-12 * (1.0 + float(np.diag(hessian).max(initial=0.0)))
        direction = np.zeros_like(lam)
        direction[free] = -np.linalg.solve(hessian + ridge * np.eye(hessian.shape[0]), grad[free])

        step = 1.0
        while step > 1e-20:
            candidate = np.maximum(lam + step * direction, 0.0)
            candidate_value = objective(candidate)
            if candidate_value <= value + ARMIJO * float(grad @ (candidate - lam)):
                break
            step *= 0.5
        else:
            logger.debug("NET line search stalled after %d iterations", iteration)
            break
        lam, value = candidate, candidate_value

    rates = matrix @ lam
    delta = np.zeros_like(flat_budgets)
    delta[active] = weights / rates
    return delta.reshape(budgets.shape), lam.reshape(shape)


def tatonnement(
    instance: NetworkInstance,
    pi: ArrayLike,
    options: SolverOptions | None = None,
) -> SolveReport:
    """Iterate posted rates, user budgets and network allocation to a fixed point.

    Each round users answer the posted rates with budgets, the network
    solves its Eisenberg-Gale program for those budgets, and the posted
    duals move a damped step toward the network's. The damping halves
    whenever the price change grows and recovers when it shrinks.

    Prices need not be unique, so the stopping rule looks at the
    allocation: the value changes by less than ``options.fix_tol`` and
    the KKT residual at the network's or the posted prices is within
    ``options.val_tol``.
    """
    options = options or SolverOptions()
    require_valid(instance)
    profile = validate_profile(instance, pi)
    weights = _weights(instance)
    caps = np.array([CAP_FACTOR * instance.route_capacity(i) for i in range(instance.num_players)])

    lam = initial_duals(instance)
    eta = options.damping
    previous_value = math.nan
    previous_gap = math.inf
    residual = math.inf
    trajectory: list[TraceRecord] = []
    z = np.zeros((instance.num_players, instance.k))
    converged = False

    iteration = 0
    for iteration in range(1, options.tatonnement_max_iter + 1):
        rates = np.cumsum(player_prices(instance, profile, lam), axis=1)
        budgets = _user_budgets(instance, weights, rates, caps)
        delta, lam_net = solve_net(instance, profile, budgets, options)
        z = np.cumsum(delta[:, ::-1], axis=1)[:, ::-1]

        value = system_value(instance, z)
        gap = float(np.abs(lam_net - lam).max())
        # Any price vector passing the KKT test certifies z
        certificate, residual = lam_net, math.inf
        for prices in (lam_net, lam):
            candidate = kkt_residual(instance, profile, np.maximum(z, 0.0), prices)
            if candidate < residual:
                certificate, residual = prices, candidate
        trajectory.append(TraceRecord(iteration, value, residual))
        logger.debug(
            "Tatonnement %d: value %.12f, price change %.3e, residual %.3e",
            iteration,
            value,
            gap,
            residual,
        )

        if abs(value - previous_value) < options.fix_tol and residual <= options.val_tol:
            converged = True
            lam = certificate
            break

        if gap > previous_gap:
            eta = max(eta / 2.0, options.min_damping)
        else:
            eta = min(eta * DAMPING_RECOVERY, options.damping)
        lam = (1.0 - eta) * lam + eta * lam_net
        previous_value, previous_gap = value, gap

    if not converged:
        logger.warning(
            "Tatonnement did not settle within %d rounds (residual %.3e)",
            options.tatonnement_max_iter,
            residual,
        )

    report = build_report(
        instance,
        profile,
        z,
        lam,
        iteration,
        FixMethod.TATONNEMENT.value,
        options.kkt_tol,
        trajectory if options.trace or not converged else [],
        converged=converged,
    )
    logger.info("Tatonnement value %.10f after %d rounds", report.value, iteration)
    return report


def check_equilibrium(
    instance: NetworkInstance,
    pi: ArrayLike,
    report: SolveReport,
) -> EquilibriumCheck:
    """Residuals of the market equilibrium conditions at a reported solution.

    Residuals:
        user_foc: user first-order conditions, G(l) <= r(l) with equality
            where the increment is positive
        net_stationarity: increments returned by the network for the
            reported budgets against the reported increments
        budget: total budgets against total priced capacity
        increments: negative increments
        feasibility: link overload
        complementarity: lam times link slack
    """
    profile = validate_profile(instance, pi)
    z = report.scheme.z
    lam = report.prices.lam
    rates = np.cumsum(player_prices(instance, profile, lam), axis=1)
    delta = rank_increments(z)
    rates_positive = bool((rates[:, 0] > 0).all())

    gap = _cumulative_marginals(instance, z) - rates
    positive = delta > INCREMENT_TOL
    user_foc = max(
        float(np.maximum(gap, 0.0).max(initial=0.0)),
        float(np.abs(np.where(positive, gap, 0.0)).max(initial=0.0)),
    )

    budgets = rates * np.maximum(delta, 0.0)
    if rates_positive:
        net_delta, _ = solve_net(instance, profile, budgets)
        net_stationarity = float(np.abs(net_delta - np.maximum(delta, 0.0)).max(initial=0.0))
    else:
        net_stationarity = math.inf

    capacities = np.asarray(instance.capacities, dtype=float)[:, None]
    loads = outcome_loads(instance, np.take_along_axis(z, profile, axis=1))
    residuals = {
        "user_foc": user_foc,
        "net_stationarity": net_stationarity,
        "budget": abs(float(budgets.sum() - (lam * capacities).sum())),
        "increments": max(0.0, float(-delta.min(initial=0.0))),
        "feasibility": max(0.0, float((loads - capacities).max(initial=0.0))),
        "complementarity": float(np.abs(lam * (capacities - loads)).max(initial=0.0)),
    }
    check = EquilibriumCheck(residuals=residuals, rates_positive=rates_positive)
    logger.info("Equilibrium check: max residual %.3e", check.max_residual)
    return check
