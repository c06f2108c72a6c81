"""Tests for the average problem and the optimal-lottery tail structure."""

import math

import numpy as np
import pytest

from cptalloc.core.avg import (
    avg_kkt_residual,
    check_tail_structure,
    solve_sys_avg,
    solve_user_avg,
    v_avg,
)
from cptalloc.core.cpt import agent_weights, cpt_value_uniform, pstar
from cptalloc.core.exceptions import (
    InvalidInputError,
    StructureUndefinedError,
    UnboundedProblemError,
)
from cptalloc.core.oracle import descending_grid
from cptalloc.core.permsearch import solve_sys_exhaustive
from cptalloc.models import AgentSpec, NetworkInstance, ValueFunctionSpec, WeightingFunctionSpec


class TestVAvg:
    """Tests for v_avg function."""

    def test_identity_weighting(self, log_agent):
        """Test expected-utility agents prefer the sure allocation."""
        result = v_avg(log_agent, 1.0, 3)
        assert result.value == pytest.approx(math.log(1.1), abs=1e-9)
        np.testing.assert_allclose(result.z, [1.0, 1.0, 1.0], atol=1e-8)

    def test_zero_mean(self, kt_agent):
        """Test a zero mean gives the zero lottery."""
        result = v_avg(kt_agent, 0.0, 4)
        assert result.value == 0.0
        assert not result.z.any()

    def test_negative_mean(self, kt_agent):
        """Test negative means are rejected."""
        with pytest.raises(InvalidInputError):
            v_avg(kt_agent, -1.0, 2)

    def test_kt_beats_sure_allocation(self, kt_agent):
        """Test the best lottery is worth at least the sure allocation."""
        result = v_avg(kt_agent, 1.0, 10)
        assert result.value >= 1.0 - 1e-12
        assert result.z.mean() == pytest.approx(1.0, abs=1e-9)
        assert (np.diff(result.z) <= 1e-12).all()

    def test_kt_beats_random_lotteries(self, kt_agent, rng):
        """Test no random descending lottery with the same mean does better."""
        k = 10
        h = agent_weights(kt_agent, k)
        best = v_avg(kt_agent, 1.0, k).value
        for _ in range(200):
            z = np.sort(rng.exponential(size=k))[::-1]
            z = z / z.mean()
            assert cpt_value_uniform(h, kt_agent.value, z) <= best + 1e-9

    def test_matches_grid(self, kt_agent):
        """Test against enumeration of descending lotteries with mean one."""
        k = 3
        h = agent_weights(kt_agent, k)
        grid = descending_grid(0.05, 3.0, k)
        grid = grid[np.abs(grid.sum(axis=1) - 3.0) < 1e-9]
        grid_best = max(cpt_value_uniform(h, kt_agent.value, z) for z in grid)
        result = v_avg(kt_agent, 1.0, k)
        assert result.value >= grid_best - 1e-9
        assert result.value <= grid_best + 0.1


class TestSolveUserAvg:
    """Tests for solve_user_avg function."""

    def test_identity_single_pool(self, log_agent):
        """Test identity weighting gives a constant lottery."""
        z = solve_user_avg(log_agent, 0.5, 4)
        np.testing.assert_allclose(z, [1.9] * 4)

    def test_kt_tail(self, kt_agent):
        """Test the optimum is constant from l* onward."""
        k = 10
        z = solve_user_avg(kt_agent, 1.0, k)
        assert z[0] > z[-1]
        assert check_tail_structure(z, pstar(kt_agent.weights), k, tol=1e-6)

    def test_priced_out(self, log_agent):
        """Test a price above k h(1) v'(0) gives nothing."""
        np.testing.assert_allclose(solve_user_avg(log_agent, 12.0, 2), [0.0, 0.0])

    def test_non_positive_price(self, log_agent):
        """Test rho_bar must be positive."""
        with pytest.raises(InvalidInputError):
            solve_user_avg(log_agent, 0.0, 2)

    def test_unbounded(self):
        """Test a price at the asymptotic slope has no maximum."""
        agent = AgentSpec(
            value=ValueFunctionSpec.log_affine(0.4, 0.6, 0.05),
            weights=WeightingFunctionSpec.identity(),
        )
        with pytest.raises(UnboundedProblemError):
            solve_user_avg(agent, 0.5, 2)


class TestCheckTailStructure:
    """Tests for check_tail_structure function."""

    def test_constant(self):
        """Test a constant lottery has the structure."""
        assert check_tail_structure(np.full(5, 2.0), 0.3, 5) is True

    def test_unequal_tail(self):
        """Test a tail that varies past l* fails."""
        assert check_tail_structure([3.0, 2.0, 1.0, 0.5], 0.25, 4) is False

    def test_head_may_vary(self):
        """Test entries before l* are unconstrained."""
        assert check_tail_structure([3.0, 2.0, 1.0, 1.0], 0.5, 4) is True

    def test_undefined(self):
        """Test p* above (k-1)/k raises."""
        with pytest.raises(StructureUndefinedError):
            check_tail_structure([1.0, 1.0], 0.9, 2)

    def test_wrong_length(self):
        """Test the lottery must have k entries."""
        with pytest.raises(InvalidInputError):
            check_tail_structure([1.0, 1.0], 0.0, 3)


class TestSolveSysAvg:
    """Tests for solve_sys_avg function."""

    def test_single_player_single_outcome(self, log_agent):
        """Test one player on one link takes the whole link."""
        instance = NetworkInstance(capacities=[2.0], routes=[[0]], k=1, agents=[log_agent])
        report = solve_sys_avg(instance)
        np.testing.assert_allclose(report.z_bar, [2.0], atol=1e-6)

    def test_two_player_bounds(self, example2):
        """Test the average optimum lies between the primal and dual optima."""
        report = solve_sys_avg(example2)
        assert 7.5621 - 1e-3 <= report.value <= 8.2757 + 1e-3
        assert report.value == pytest.approx(8.2757, abs=2e-3)
        assert report.tail_structure == [None, None]

    def test_identity_weighting_no_gap(self, identity_instance):
        """Test expected-utility agents gain nothing from averaging."""
        report = solve_sys_avg(identity_instance)
        primal = solve_sys_exhaustive(identity_instance)
        assert report.value == pytest.approx(primal.value, abs=1e-3)

    def test_residual(self, identity_instance):
        """Test the reported residual matches a recomputation."""
        report = solve_sys_avg(identity_instance)
        residual = avg_kkt_residual(identity_instance, report.z, report.lambda_bar)
        assert residual == pytest.approx(report.kkt_residual)
        assert residual <= 1e-8

    def test_kt_tail_verdicts(self, kt_agent):
        """Test kt agents on a shared link get tail verdicts."""
        instance = NetworkInstance(
            capacities=[4.0],
            routes=[[0], [0]],
            k=5,
            agents=[kt_agent, kt_agent],
        )
        report = solve_sys_avg(instance)
        assert report.tail_structure == [True, True]
        assert report.to_dict()["W_pa"] == pytest.approx(report.value)


def random_kt_agent(rng: np.random.Generator) -> AgentSpec:
    return AgentSpec(
        value=ValueFunctionSpec.power(float(rng.uniform(0.5, 0.95))),
        weights=WeightingFunctionSpec.kt(float(rng.uniform(0.4, 0.99))),
    )


class TestTailStructureProperty:
    """The optimal lottery of a kt agent is constant from l* onward."""

    def test_random_agents(self, rng):
        """Test fifty seeded power/kt agents at k = 10."""
        k = 10
        for _ in range(50):
            agent = random_kt_agent(rng)
            z = solve_user_avg(agent, float(rng.uniform(0.2, 2.0)), k)
            assert z[0] > 0
            assert check_tail_structure(z, pstar(agent.weights), k, tol=1e-6)


class TestAverageValueShape:
    """Monotonicity, concavity and smoothness of v_avg in the mean."""

    @pytest.mark.slow
    def test_monotone_and_midpoint_concave(self, rng):
        """Test V^avg on a 20-point grid of means."""
        grid = np.linspace(0.25, 5.0, 20)
        for _ in range(5):
            agent = random_kt_agent(rng)
            values = np.array([v_avg(agent, float(z_bar), 10).value for z_bar in grid])
            assert (np.diff(values) >= -1e-8).all()
            assert (np.diff(values, 2) <= 1e-8).all()

    @pytest.mark.slow
    def test_multiplier_is_derivative(self, rng):
        """Test the mean multiplier matches a central finite difference."""
        eps = 1e-5
        for _ in range(5):
            agent = random_kt_agent(rng)
            for z_bar in (0.5, 1.0, 2.0, 4.0):
                upper = v_avg(agent, z_bar + eps, 10).value
                lower = v_avg(agent, z_bar - eps, 10).value
                slope = (upper - lower) / (2 * eps)
                assert slope == pytest.approx(v_avg(agent, z_bar, 10).multiplier, rel=1e-4)
