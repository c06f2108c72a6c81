"""Tests for the fixed-permutation solvers and the market decomposition."""

import dataclasses
import math

import numpy as np
import pytest

from cptalloc.core.exceptions import InvalidInputError, UnboundedProblemError
from cptalloc.core.instances import random_instance
from cptalloc.core.network import is_feasible_scheme
from cptalloc.core.solver_fix import (
    check_equilibrium,
    kkt_residual,
    solve_deterministic,
    solve_net,
    solve_sys_fix,
    solve_user,
    tatonnement,
)
from cptalloc.models import (
    AgentSpec,
    FixMethod,
    LotteryScheme,
    NetworkInstance,
    PriceSystem,
    SolveReport,
    SolverOptions,
    ValueFunctionSpec,
    WeightingFunctionSpec,
)


@pytest.fixture
def example2_report(example2, anti_aligned) -> SolveReport:
    return solve_sys_fix(example2, anti_aligned)


class TestSolveSysFix:
    """Tests for solve_sys_fix function."""

    def test_two_player_optimum(self, example2_report):
        """Test value, allocations and duals of the anti-aligned profile."""
        assert example2_report.value == pytest.approx(7.5621, abs=1e-3)
        np.testing.assert_allclose(example2_report.scheme.z, [[1.95, 0.95]] * 2, atol=1e-3)
        np.testing.assert_allclose(example2_report.prices.lam, [[1 / 6, 2 / 3]], atol=1e-3)

    def test_two_player_certificate(self, example2, example2_report):
        """Test the returned scheme is feasible with a small KKT residual."""
        assert is_feasible_scheme(example2, example2_report.scheme)
        assert example2_report.kkt_residual <= 1e-4
        assert example2_report.method == "dual"

    def test_two_player_budgets(self, example2_report):
        """Test budgets m = r * delta at the optimum."""
        np.testing.assert_allclose(
            example2_report.budgets,
            [[1 / 6, 0.95 * 5 / 6], [2 / 3, 0.95 * 5 / 6]],
            atol=1e-3,
        )

    def test_subgradient(self, example2, anti_aligned):
        """Test the subgradient method reaches the same value."""
        options = SolverOptions(method=FixMethod.SUBGRADIENT, max_iter=2000, trace=True)
        report = solve_sys_fix(example2, anti_aligned, options)
        assert report.value == pytest.approx(7.5621, abs=1e-3)
        assert report.method == "subgradient"
        assert report.trajectory[0].iteration == 1

    def test_equal_split(self, single_link_instance):
        """Test identical strictly concave players split the link evenly."""
        report = solve_sys_fix(single_link_instance, [[0], [0]])
        np.testing.assert_allclose(report.scheme.z, [[1.0], [1.0]], atol=1e-6)
        assert report.value == pytest.approx(2.0 * math.log(1.1), abs=1e-7)

    def test_linear_program(self, linear_agent):
        """Test identical linear players fill the link."""
        instance = NetworkInstance(
            capacities=[3.0],
            routes=[[0], [0]],
            k=1,
            agents=[linear_agent, linear_agent],
        )
        report = solve_sys_fix(instance, [[0], [0]])
        assert report.method == "lp"
        assert report.value == pytest.approx(3.0)
        assert report.scheme.z.sum() == pytest.approx(3.0)

    def test_single_player_takes_route_capacity(self, solo_instance):
        """Test one player gets the smallest capacity on its route."""
        report = solve_sys_fix(solo_instance, [[0, 1]])
        np.testing.assert_allclose(report.scheme.z, [[2.0, 2.0]], atol=1e-6)

    def test_invalid_profile(self, example2):
        """Test a malformed profile is rejected."""
        with pytest.raises(InvalidInputError):
            solve_sys_fix(example2, [[0, 1], [1, 1]])


class TestSolveDeterministic:
    """Tests for solve_deterministic function."""

    def test_equal_split(self, example1):
        """Test ten power players get one unit each."""
        report = solve_deterministic(example1)
        assert report.value == pytest.approx(10.0, abs=1e-6)
        np.testing.assert_allclose(report.scheme.z[:, 0], np.ones(10), atol=1e-5)


class TestKktResidual:
    """Tests for kkt_residual function."""

    def test_exact_optimum(self, example2, anti_aligned):
        """Test the closed-form optimum has zero residual."""
        z = np.array([[1.95, 0.95], [1.95, 0.95]])
        residual = kkt_residual(example2, anti_aligned, z, [[1 / 6, 2 / 3]])
        assert residual == pytest.approx(0.0, abs=1e-12)

    def test_overload(self, example2, anti_aligned):
        """Test overloaded links show up in the residual."""
        z = np.array([[2.05, 1.05], [2.05, 1.05]])
        assert kkt_residual(example2, anti_aligned, z, [[1 / 6, 2 / 3]]) >= 0.2 - 1e-12


class TestSolveUser:
    """Tests for solve_user function."""

    def test_two_player_first_player(self):
        """Test budgets of the first player at the equilibrium rates."""
        m = solve_user(
            [1 / 6, 5 / 6],
            [1 / 3, 2 / 3],
            ValueFunctionSpec.log_affine(1.0, 0.0, 0.05, 3.0),
        )
        np.testing.assert_allclose(m, [1 / 6, 0.7917], atol=1e-3)

    def test_priced_out(self):
        """Test prices above the marginal value at zero give no budget."""
        m = solve_user([3.0], [1.0], ValueFunctionSpec.log_affine(1.0, 0.0, 0.5))
        np.testing.assert_allclose(m, [0.0])

    def test_linear_priced_out(self):
        """Test linear value at rates above its slope spends nothing."""
        m = solve_user([2.0, 2.0], [0.5, 0.5], ValueFunctionSpec.linear())
        np.testing.assert_allclose(m, [0.0, 0.0])

    def test_non_positive_rate(self):
        """Test r(1) must be positive."""
        with pytest.raises(InvalidInputError):
            solve_user([0.0, 1.0], [0.5, 0.5], ValueFunctionSpec.linear())

    def test_decreasing_rates(self):
        """Test rates must be nondecreasing."""
        with pytest.raises(InvalidInputError):
            solve_user([1.0, 0.5], [0.5, 0.5], ValueFunctionSpec.linear())

    def test_unbounded(self):
        """Test rates at the asymptotic slope have no maximum."""
        with pytest.raises(UnboundedProblemError):
            solve_user([0.5], [1.0], ValueFunctionSpec.log_affine(0.4, 0.6, 0.05))


class TestSolveNet:
    """Tests for solve_net function."""

    def test_proportional(self, single_link_instance):
        """Test one link splits capacity in proportion to budgets."""
        delta, lam = solve_net(single_link_instance, [[0], [0]], [[1.0], [3.0]])
        np.testing.assert_allclose(delta, [[0.5], [1.5]], atol=1e-8)
        np.testing.assert_allclose(lam, [[2.0]], atol=1e-8)

    def test_two_player_equilibrium(self, example2, anti_aligned):
        """Test equilibrium budgets recover the increments and duals."""
        budgets = [[1 / 6, 0.95 * 5 / 6], [2 / 3, 0.95 * 5 / 6]]
        delta, lam = solve_net(example2, anti_aligned, budgets)
        np.testing.assert_allclose(delta, [[1.0, 0.95], [1.0, 0.95]], atol=1e-6)
        np.testing.assert_allclose(lam, [[1 / 6, 2 / 3]], atol=1e-6)

    def test_zero_budgets(self, example2, anti_aligned):
        """Test zero budgets give zero increments and duals."""
        delta, lam = solve_net(example2, anti_aligned, np.zeros((2, 2)))
        assert not delta.any()
        assert not lam.any()

    def test_uncontested_link(self, linear_agent):
        """Test a lone buyer on its own link gets the whole link."""
        instance = NetworkInstance(
            capacities=[2.0, 3.0],
            routes=[[0], [1]],
            k=1,
            agents=[linear_agent, linear_agent],
        )
        delta, lam = solve_net(instance, [[0], [0]], [[1.0], [0.0]])
        np.testing.assert_allclose(delta, [[2.0], [0.0]], atol=1e-8)
        assert lam[1, 0] == pytest.approx(0.0, abs=1e-10)

    def test_negative_budgets(self, example2, anti_aligned):
        """Test negative budgets are rejected."""
        with pytest.raises(InvalidInputError):
            solve_net(example2, anti_aligned, [[-1.0, 0.0], [0.0, 0.0]])


class TestTatonnement:
    """Tests for the tatonnement process."""

    def test_proportional_fairness(self, single_link_instance):
        """Test log users on one link reach the proportionally fair split."""
        report = tatonnement(single_link_instance, [[0], [0]])
        direct = solve_sys_fix(single_link_instance, [[0], [0]])
        assert report.converged is True
        assert report.value == pytest.approx(direct.value, abs=1e-6)
        np.testing.assert_allclose(report.prices.lam, [[1 / 1.1]], atol=1e-6)

    def test_single_player_non_unique_prices(self):
        """Test a lone player settles although its outcome prices are not unique."""
        instance = NetworkInstance(
            capacities=[2.0],
            routes=[[0]],
            k=2,
            agents=[
                AgentSpec(
                    value=ValueFunctionSpec.log_affine(a=1.0, b=0.0, s=0.2),
                    weights=WeightingFunctionSpec.kt(0.61),
                )
            ],
        )
        pi = [[0, 1]]
        report = tatonnement(instance, pi)
        assert report.converged is True
        assert report.iterations < SolverOptions().tatonnement_max_iter
        assert report.value == pytest.approx(solve_sys_fix(instance, pi).value, abs=1e-6)

    def test_dispatch_from_solve_sys_fix(self, single_link_instance):
        """Test the tatonnement method is reachable through solve_sys_fix."""
        options = SolverOptions(method=FixMethod.TATONNEMENT, trace=True)
        report = solve_sys_fix(single_link_instance, [[0], [0]], options)
        assert report.method == "tatonnement"
        assert len(report.trajectory) == report.iterations

    @pytest.mark.slow
    def test_two_player(self, example2, anti_aligned):
        """Test the two-player market settles at the optimum value."""
        report = tatonnement(example2, anti_aligned)
        assert report.value == pytest.approx(7.5621, abs=1e-3)


class TestCheckEquilibrium:
    """Tests for check_equilibrium function."""

    def test_optimum(self, example2, anti_aligned, example2_report):
        """Test the optimum satisfies every equilibrium condition."""
        check = check_equilibrium(example2, anti_aligned, example2_report)
        assert check.rates_positive is True
        assert check.is_equilibrium(tol=1e-4)
        assert set(check.residuals) == {
            "user_foc",
            "net_stationarity",
            "budget",
            "increments",
            "feasibility",
            "complementarity",
        }

    def test_perturbed(self, example2, anti_aligned, example2_report):
        """Test moving allocations off the optimum is flagged."""
        scheme = LotteryScheme(z=example2_report.scheme.z + 0.1, pi=example2_report.scheme.pi)
        perturbed = dataclasses.replace(example2_report, scheme=scheme)
        check = check_equilibrium(example2, anti_aligned, perturbed)
        assert check.max_residual > 1e-2

    def test_zero_prices(self, example2, anti_aligned, example2_report):
        """Test zero duals with interior allocations are not an equilibrium."""
        zeros = np.zeros((2, 2))
        prices = PriceSystem(lam=np.zeros((1, 2)), rho=zeros, r=zeros, alpha=zeros)
        report = dataclasses.replace(example2_report, prices=prices)
        check = check_equilibrium(example2, anti_aligned, report)
        assert check.rates_positive is False
        assert check.max_residual == math.inf
        assert check.is_equilibrium() is False


@pytest.fixture(scope="module")
def seeded_cases() -> list[tuple[NetworkInstance, np.ndarray]]:
    """Twenty seeded instances (n, k <= 3, m <= 2) with random profiles."""
    rng = np.random.default_rng(0)
    profile_rng = np.random.default_rng(1)
    cases = []
    for _ in range(20):
        instance = random_instance(rng)
        profile = np.array(
            [profile_rng.permutation(instance.k) for _ in range(instance.num_players)],
            dtype=np.int64,
        )
        cases.append((instance, profile))
    return cases


class TestRandomInstances:
    """Fixed-profile solves on seeded random instances."""

    def test_single_outcome_reaches_default_tolerance(self, seeded_cases):
        """Test dual polishing meets kkt_tol when k = 1."""
        single = [(instance, pi) for instance, pi in seeded_cases if instance.k == 1]
        assert single
        for instance, pi in single:
            report = solve_sys_fix(instance, pi)
            assert report.converged is True
            assert report.kkt_residual <= 1e-8

    def test_equilibrium_conditions(self, seeded_cases):
        """Test every solve satisfies the market equilibrium conditions."""
        for instance, pi in seeded_cases:
            report = solve_sys_fix(instance, pi)
            check = check_equilibrium(instance, pi, report)
            assert check.rates_positive is True
            assert check.max_residual <= 1e-6

    @pytest.mark.slow
    def test_tatonnement_agrees(self, seeded_cases):
        """Test tatonnement settles on the direct optimum on at least 18 of 20 instances."""
        agreeing = 0
        for instance, pi in seeded_cases:
            direct = solve_sys_fix(instance, pi)
            market = tatonnement(instance, pi)
            if market.converged and abs(market.value - direct.value) <= 1e-4:
                agreeing += 1
        assert agreeing >= 18
