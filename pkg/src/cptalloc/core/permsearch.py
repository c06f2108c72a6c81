"""Search over permutation profiles, the dual function and the duality gap.

Player 0's permutation is fixed to the identity throughout: relabeling all
outcomes at once changes neither objective nor constraints.
"""

import itertools
import logging
import math
from collections.abc import Callable, Iterator
from concurrent.futures import ProcessPoolExecutor
from functools import partial

import numpy as np
from numpy.typing import ArrayLike
from scipy.optimize import minimize

from cptalloc.core.avg import solve_sys_avg
from cptalloc.core.cpt import agent_weights, evaluate_value
from cptalloc.core.exceptions import BudgetExceededError, InvalidInputError
from cptalloc.core.instances import example2_instance
from cptalloc.core.kernel import IsotonicProblem, isotonic_concave_max
from cptalloc.core.network import cyclic_profile, scheme_compose, validate_profile
from cptalloc.core.solver_fix import solve_sys_fix
from cptalloc.core.validation import require_valid
from cptalloc.models import (
    CaseResult,
    DualEvaluation,
    DualMinimum,
    DualOptions,
    FloatArray,
    GapReport,
    IntArray,
    LotteryScheme,
    NetworkInstance,
    SearchMethod,
    SearchOptions,
    SearchResult,
    SolveReport,
    SolverOptions,
)

logger = logging.getLogger(__name__)


# Profiles


def profile_count(n: int, k: int) -> int:
    """Number of profiles with player 0 fixed: (k!)^(n-1)."""
    return math.factorial(k) ** max(n - 1, 0)


def enumerate_profiles(n: int, k: int) -> Iterator[IntArray]:
    """Profiles in lexicographic order, player 0 on the identity."""
    identity = tuple(range(k))
    for rest in itertools.product(itertools.permutations(range(k)), repeat=max(n - 1, 0)):
        yield np.array((identity, *rest)[:n], dtype=np.int64).reshape(n, k)


def _evaluate(instance: NetworkInstance, options: SolverOptions, profile: IntArray) -> SolveReport:
    return solve_sys_fix(instance, profile, options)


def _evaluate_all(
    instance: NetworkInstance,
    profiles: list[IntArray],
    options: SearchOptions,
) -> list[SolveReport]:
    evaluate = partial(_evaluate, instance, options.solver)
    if options.workers > 1 and len(profiles) > 1:
        with ProcessPoolExecutor(max_workers=options.workers) as pool:
            chunksize = max(1, len(profiles) // (4 * options.workers))
            return list(pool.map(evaluate, profiles, chunksize=chunksize))
    return [evaluate(profile) for profile in profiles]


# Primal search


def solve_sys_exhaustive(
    instance: NetworkInstance,
    options: SearchOptions | None = None,
) -> SearchResult:
    """Best fixed-profile value over every profile.

    Ties keep the lexicographically smallest profile, whatever the worker
    count.

    Raises:
        BudgetExceededError: If (k!)^(n-1) exceeds ``options.budget``
    """
    options = options or SearchOptions()
    require_valid(instance)
    n, k = instance.num_players, instance.k
    count = profile_count(n, k)
    if count > options.budget:
        raise BudgetExceededError(
            f"{count} profiles exceed the budget of {options.budget}; use local search",
            required=count,
        )

    profiles = list(enumerate_profiles(n, k))
    logger.info("Evaluating %d profiles with %d worker(s)", count, options.workers)
    reports = _evaluate_all(instance, profiles, options)

    best = 0
    for index, report in enumerate(reports):
        if report.value > reports[best].value + options.tie_tol:
            best = index
    logger.info("Best profile %s with value %.10f", profiles[best].tolist(), reports[best].value)
    return SearchResult(
        profile=profiles[best],
        report=reports[best],
        evaluations=count,
        method=SearchMethod.EXHAUSTIVE.value,
    )


def _random_profile(rng: np.random.Generator, n: int, k: int) -> IntArray:
    rows = [np.arange(k)] + [rng.permutation(k) for _ in range(n - 1)]
    return np.array(rows, dtype=np.int64)


def solve_sys_localsearch(
    instance: NetworkInstance,
    options: SearchOptions | None = None,
) -> SearchResult:
    """Hill-climb over profiles by swapping two entries of one player's row.

    Starts from the cyclic profile, then from ``options.restarts`` seeded
    random profiles; only strictly improving moves are taken.
    """
    options = options or SearchOptions(method=SearchMethod.LOCAL)
    require_valid(instance)
    n, k = instance.num_players, instance.k
    rng = np.random.default_rng(options.seed)

    cache: dict[bytes, SolveReport] = {}

    def evaluate(profile: IntArray) -> SolveReport:
        key = profile.tobytes()
        if key not in cache:
            cache[key] = solve_sys_fix(instance, profile, options.solver)
        return cache[key]

    starts = [cyclic_profile(n, k)] + [_random_profile(rng, n, k) for _ in range(options.restarts)]
    best_profile, best_report = starts[0], evaluate(starts[0])

    for start_index, start in enumerate(starts):
        current, current_report = start, evaluate(start)
        improved = True
        while improved and len(cache) < options.max_evaluations:
            improved = False
            moves = itertools.product(range(1, n), itertools.combinations(range(k), 2))
            for player, (a, b) in moves:
                if len(cache) >= options.max_evaluations:
                    break
                neighbor = current.copy()
                neighbor[player, [a, b]] = neighbor[player, [b, a]]
                report = evaluate(neighbor)
                if report.value > current_report.value + options.tie_tol:
                    current, current_report = neighbor, report
                    improved = True
                    break
        logger.debug("Start %d settled at %.10f", start_index, current_report.value)
        if current_report.value > best_report.value + options.tie_tol:
            best_profile, best_report = current, current_report

    logger.info("Local search best %.10f after %d evaluations", best_report.value, len(cache))
    return SearchResult(
        profile=best_profile,
        report=best_report,
        evaluations=len(cache),
        method=SearchMethod.LOCAL.value,
    )


def solve_sys(instance: NetworkInstance, options: SearchOptions | None = None) -> SearchResult:
    """Dispatch on ``options.method``."""
    options = options or SearchOptions()
    if options.method is SearchMethod.LOCAL:
        return solve_sys_localsearch(instance, options)
    return solve_sys_exhaustive(instance, options)


# Dual function


def _outcome_prices(instance: NetworkInstance, lam: FloatArray) -> FloatArray:
    """rho_hat[i, l] = sum of lam[j, l] over player i's route."""
    return np.array([lam[route].sum(axis=0) for route in instance.routes])


def dual_inner_max(instance: NetworkInstance, lam: ArrayLike) -> DualEvaluation:
    """Inner maximum of the Lagrangian over profiles and allocations.

    Each player ranks outcomes by ascending route price, the cheapest
    outcome getting the largest allocation, then solves its isotonic
    problem at the sorted prices. Any unbounded player makes the value inf.
    """
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (instance.num_links, instance.k):
        raise InvalidInputError(f"Link duals must have shape ({instance.num_links}, {instance.k})")
    if (lam < 0).any():
        raise InvalidInputError("Link duals must be nonnegative")

    rho_hat = _outcome_prices(instance, lam)
    order = np.argsort(rho_hat, axis=1, kind="stable")
    pi = np.argsort(order, axis=1, kind="stable").astype(np.int64)
    z = np.empty_like(rho_hat)

    total = float((lam * np.asarray(instance.capacities, dtype=float)[:, None]).sum())
    for i, agent in enumerate(instance.agents):
        solution = isotonic_concave_max(
            IsotonicProblem(
                h=agent_weights(agent, instance.k),
                vf=agent.value,
                prices=np.take_along_axis(rho_hat[i], order[i], axis=0),
            )
        )
        z[i] = solution.z
        total += solution.value
    return DualEvaluation(value=total, z=z, pi=pi, lam=lam)


def _grid_points(upper: FloatArray, budget: int) -> Iterator[FloatArray]:
    per_axis = max(2, int(budget ** (1.0 / upper.size)))
    axes = [np.linspace(0.0, u, per_axis) for u in upper]
    for point in itertools.product(*axes):
        yield np.array(point)


def dual_minimize(
    instance: NetworkInstance,
    options: DualOptions | None = None,
) -> DualMinimum:
    """Minimize the dual function over link duals lam >= 0.

    The search starts from the outcome-uniform duals of the average
    problem, scans a grid over the box where the dual can still beat that
    start, and refines the best points by bounded Nelder-Mead.

    Raises:
        BudgetExceededError: If m * k exceeds ``options.max_dim``
    """
    options = options or DualOptions()
    require_valid(instance)
    m, k = instance.num_links, instance.k
    dim = m * k
    if dim > options.max_dim:
        raise BudgetExceededError(
            f"Dual has {dim} variables, more than max_dim = {options.max_dim}",
            required=dim,
        )

    evaluations = 0

    def theta(flat: FloatArray) -> float:
        nonlocal evaluations
        evaluations += 1
        return dual_inner_max(instance, np.maximum(flat, 0.0).reshape(m, k)).value

    average = solve_sys_avg(instance, options.avg)
    seed = np.repeat(average.lambda_bar[:, None] / k, k, axis=1).ravel()
    seed_value = theta(seed)
    logger.info("Dual seed from average prices: %.10f", seed_value)

    floor = sum(float(evaluate_value(agent.value, 0.0)) for agent in instance.agents)
    capacities = np.repeat(np.asarray(instance.capacities, dtype=float), k)
    if math.isfinite(seed_value):
        upper = np.maximum((seed_value - floor) / capacities, 0.0)
    else:
        upper = capacities
    candidates: list[tuple[float, FloatArray]] = [(seed_value, seed)]

    grid_best = (math.inf, seed)
    for point in _grid_points(upper, options.grid_budget):
        value = theta(point)
        if value < grid_best[0]:
            grid_best = (value, point)
    candidates.append(grid_best)

    bounds = [(0.0, float(u)) for u in upper]
    for start_value, start in sorted(candidates, key=lambda c: c[0])[:2]:
        if not math.isfinite(start_value):
            continue
        x = start
        for _ in range(options.rounds):
            res = minimize(
                theta,
                x,
                method="Nelder-Mead",
                bounds=bounds,
                options={
                    "xatol": options.xatol,
                    "fatol": options.fatol,
                    "adaptive": True,
                    "maxfev": 20_000,
                },
            )
            x = np.clip(res.x, 0.0, upper)
            candidates.append((float(res.fun), x))

    value, best = min(candidates, key=lambda c: c[0])
    evaluation = dual_inner_max(instance, best.reshape(m, k))
    logger.info("Dual minimum %.10f after %d evaluations", evaluation.value, evaluations)
    return DualMinimum(
        value=evaluation.value,
        evaluation=evaluation,
        seed_value=seed_value,
        evaluations=evaluations,
    )


def check_opposite_ordering(
    instance: NetworkInstance,
    scheme: LotteryScheme,
    lam: ArrayLike,
    tol: float = 1e-6,
) -> bool:
    """True iff no player gets strictly less in an outcome with strictly lower price."""
    lam = np.asarray(lam, dtype=float)
    rho_hat = _outcome_prices(instance, lam)
    y = scheme_compose(scheme)
    for i in range(instance.num_players):
        cheaper = rho_hat[i][:, None] < rho_hat[i][None, :] - tol
        smaller = y[i][:, None] < y[i][None, :] - tol
        if (cheaper & smaller).any():
            return False
    return True


def duality_gap(
    instance: NetworkInstance,
    options: DualOptions | None = None,
) -> GapReport:
    """Primal optimum, dual minimum and their gap.

    When the gap closes, the primal profile is also checked against the
    ordering the dual prices imply.
    """
    options = options or DualOptions()
    primal = solve_sys(instance, options.search)
    dual = dual_minimize(instance, options)
    gap = dual.value - primal.value

    consistent = None
    if gap <= options.gap_tol:
        consistent = check_opposite_ordering(instance, primal.report.scheme, dual.lam)
    logger.info("W_ps %.10f, W_ds %.10f, gap %.3e", primal.value, dual.value, gap)
    return GapReport(
        w_ps=primal.value,
        w_ds=dual.value,
        pi_star=primal.profile,
        lambda_star=dual.lam,
        ordering_consistent=consistent,
    )


# Two-player, one-link dual case analysis

_CASE_A_MIN = 0.5 + 1e-9
_CASE_B_MAX = 20.0


def _case_regions() -> dict[str, list[Callable[[FloatArray, FloatArray], FloatArray]]]:
    """Feasible region of each case as constraints g(a, b) >= 0, with a <= b."""
    return {
        "C1": [lambda a, b: a - b / 2.0, lambda a, b: 1.0 / 0.05 - (a + b)],
        "D1": [lambda a, b: b / 2.0 - a, lambda a, b: 1.0 / 0.15 - a, lambda a, b: 2.0 / 0.15 - b],
        "B2": [lambda a, b: 2.15 / 0.3 - a, lambda a, b: b - 2.15 / 1.5],
        "D2": [lambda a, b: 2.15 / 0.3 - a, lambda a, b: 2.15 / 1.5 - b, lambda a, b: b - 0.1],
    }


def _case_allocations(case: str, a: FloatArray, b: FloatArray) -> tuple[FloatArray, FloatArray]:
    if case == "C1":
        level = 1.0 / (a + b) - 0.05
        return level, level
    if case == "D1":
        return 1.0 / (3.0 * a) - 0.05, 2.0 / (3.0 * b) - 0.05
    if case == "B2":
        return 2.0 / (6.0 * a - 3.0) - 0.05, np.zeros_like(a)
    return 2.0 / (6.0 * a - 3.0) - 0.05, 2.0 / (30.0 * b - 3.0) - 0.05


def case_table_example2() -> list[CaseResult]:
    """Case-restricted dual minima of the two-player duality-gap example.

    With lam(0) = a <= b = lam(1), both players rank outcome 0 first, and
    each player's maximizer takes one of two closed forms per case. Each
    pair of cases is minimized over its region by a grid scan followed by
    SLSQP.
    """
    instance = example2_instance()
    weights = [agent_weights(agent, 2) for agent in instance.agents]
    values = [agent.value for agent in instance.agents]
    capacity = instance.capacities[0]
    regions = _case_regions()

    def objective(first: str, second: str, a: FloatArray, b: FloatArray) -> FloatArray:
        x1, x2 = _case_allocations(first, a, b)
        y1, y2 = _case_allocations(second, a, b)
        total = weights[0][0] * evaluate_value(values[0], x1)
        total = total + weights[0][1] * evaluate_value(values[0], x2)
        total = total + weights[1][0] * evaluate_value(values[1], y1)
        total = total + weights[1][1] * evaluate_value(values[1], y2)
        return total - a * (x1 + y1) - b * (x2 + y2) + capacity * (a + b)

    results = []
    for first, second in itertools.product(("C1", "D1"), ("B2", "D2")):
        constraints = [lambda a, b: b - a, *regions[first], *regions[second]]

        grid_a, grid_b = np.meshgrid(
            np.linspace(_CASE_A_MIN, 2.15 / 0.3, 400), np.linspace(0.0, _CASE_B_MAX, 400)
        )
        feasible = np.ones_like(grid_a, dtype=bool)
        for g in constraints:
            feasible &= g(grid_a, grid_b) >= 0
        with np.errstate(divide="ignore", invalid="ignore"):
            grid_values = np.where(feasible, objective(first, second, grid_a, grid_b), np.inf)
        index = np.unravel_index(int(np.argmin(grid_values)), grid_values.shape)
        start = np.array([grid_a[index], grid_b[index]])
        best_value = float(grid_values[index])

        res = minimize(
            lambda x, f=first, s=second: float(objective(f, s, np.asarray(x[0]), np.asarray(x[1]))),
            start,
            method="SLSQP",
            bounds=[(_CASE_A_MIN, 2.15 / 0.3), (0.0, _CASE_B_MAX)],
            constraints=[
                {"type": "ineq", "fun": lambda x, g=g: float(g(x[0], x[1]))} for g in constraints
            ],
            options={"ftol": 1e-14, "maxiter": 500},
        )
        point = start
        inside = all(g(res.x[0], res.x[1]) >= -1e-9 for g in constraints)
        if res.success and inside and res.fun < best_value:
            best_value, point = float(res.fun), res.x
        results.append(CaseResult(first, second, best_value, (float(point[0]), float(point[1]))))
        logger.debug("Case (%s,%s): %.6f at %s", first, second, best_value, point)
    return results


def lagrangian_value(
    instance: NetworkInstance,
    pi: ArrayLike,
    z: ArrayLike,
    lam: ArrayLike,
) -> float:
    """Lagrangian of the system problem at a given profile, allocation and duals."""
    profile = validate_profile(instance, pi)
    z = np.asarray(z, dtype=float)
    lam = np.asarray(lam, dtype=float)
    scheme = LotteryScheme(z=z, pi=profile)
    y = scheme_compose(scheme)
    capacities = np.asarray(instance.capacities, dtype=float)[:, None]
    loads = np.array([y[users].sum(axis=0) for users in instance.link_users()])
    value = sum(
        float(np.dot(agent_weights(agent, instance.k), evaluate_value(agent.value, z[i])))
        for i, agent in enumerate(instance.agents)
    )
    return value + float((lam * (capacities - loads)).sum())
