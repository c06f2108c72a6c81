"""Tests for value functions, weighting and CPT valuation."""

import math

import numpy as np
import pytest

from cptalloc.core.cpt import (
    chord_slope,
    concave_envelope,
    cpt_value,
    cpt_value_uniform,
    decision_weights,
    evaluate_value,
    lstar,
    marginal_inverse,
    pstar,
    value_eval,
    weight_array,
    weight_eval,
    weights_table,
)
from cptalloc.core.exceptions import (
    InvalidInputError,
    StructureUndefinedError,
    UnsupportedFamilyError,
)
from cptalloc.models import (
    AgentSpec,
    ExplicitWeights,
    ValueFunctionSpec,
    WeightingFunctionSpec,
)


KT_CURVE = [
    (0.01, 0.0553),
    (0.025, 0.0915),
    (0.05, 0.1316),
    (0.10, 0.1863),
    (0.15, 0.2269),
    (0.20, 0.2608),
    (0.25, 0.2907),
    (0.30, 0.3184),
    (0.35, 0.3446),
    (0.40, 0.3700),
    (0.45, 0.3952),
    (0.50, 0.4206),
    (0.55, 0.4467),
    (0.60, 0.4739),
    (0.65, 0.5027),
    (0.70, 0.5338),
    (0.75, 0.5683),
    (0.80, 0.6074),
    (0.85, 0.6537),
    (0.90, 0.7117),
    (0.95, 0.7932),
    (0.98, 0.8710),
]

INVARIANCE_CASES = 1000


@pytest.fixture
def kt() -> WeightingFunctionSpec:
    return WeightingFunctionSpec.kt(0.61)


def random_agent(rng: np.random.Generator, identity: bool = False) -> AgentSpec:
    if rng.random() < 0.5:
        value = ValueFunctionSpec.power(float(rng.uniform(0.3, 1.0)))
    else:
        value = ValueFunctionSpec.log_affine(
            a=float(rng.uniform(0.1, 2.0)),
            b=float(rng.uniform(0.0, 1.0)),
            s=float(rng.uniform(0.01, 1.0)),
        )
    if identity:
        weights = WeightingFunctionSpec.identity()
    elif rng.random() < 0.8:
        weights = WeightingFunctionSpec.kt(float(rng.uniform(0.4, 1.0)))
    else:
        weights = WeightingFunctionSpec.power_convex(float(rng.uniform(1.1, 3.0)))
    return AgentSpec(value=value, weights=weights)


def random_prospect(rng: np.random.Generator) -> list[tuple[float, float]]:
    size = int(rng.integers(1, 7))
    probs = rng.dirichlet(np.ones(size))
    outcomes = rng.uniform(0.0, 10.0, size)
    return [(float(p), float(y)) for p, y in zip(probs, outcomes)]


class TestValueEval:
    """Tests for value_eval function."""

    def test_log_affine(self):
        """Test value, derivative and slope of a log value."""
        vf = ValueFunctionSpec.log_affine(a=1.0, b=0.0, s=0.05, c=3.0)
        value, slope, asymptote = value_eval(vf, 1.95)
        assert value == pytest.approx(math.log(2.0) + 3.0, abs=1e-9)
        assert slope == pytest.approx(0.5)
        assert asymptote == 0.0

    def test_log_affine_with_linear_part(self):
        """Test the asymptotic slope equals the linear coefficient."""
        vf = ValueFunctionSpec.log_affine(a=0.4, b=0.6, s=0.05)
        assert value_eval(vf, 0.95)[1] == pytest.approx(1.0)
        assert value_eval(vf, 0.0)[2] == pytest.approx(0.6)

    def test_linear(self):
        """Test linear value."""
        assert value_eval(ValueFunctionSpec.linear(), 7.0) == (7.0, 1.0, 1.0)

    def test_power(self):
        """Test power value at one."""
        value, slope, asymptote = value_eval(ValueFunctionSpec.power(0.88), 1.0)
        assert value == pytest.approx(1.0)
        assert slope == pytest.approx(0.88)
        assert asymptote == 0.0

    def test_power_derivative_clamped_at_zero(self):
        """Test the infinite derivative at zero is clamped."""
        _, slope, _ = value_eval(ValueFunctionSpec.power(0.5), 0.0)
        assert math.isfinite(slope)
        assert slope >= 1e12

    def test_negative_input(self):
        """Test negative allocations are rejected."""
        with pytest.raises(InvalidInputError):
            value_eval(ValueFunctionSpec.linear(), -1.0)


class TestMarginalInverse:
    """Tests for marginal_inverse function."""

    def test_log(self):
        """Test inverse of a/(x+s) + b."""
        vf = ValueFunctionSpec.log_affine(a=1.0, b=0.0, s=0.05)
        assert marginal_inverse(vf, 0.5) == pytest.approx(1.95)

    def test_below_slope(self):
        """Test a marginal below the asymptotic slope is never reached."""
        vf = ValueFunctionSpec.log_affine(a=0.4, b=0.6, s=0.05)
        assert marginal_inverse(vf, 0.5) == math.inf

    def test_affine_unsupported(self):
        """Test affine values have no inverse."""
        with pytest.raises(UnsupportedFamilyError):
            marginal_inverse(ValueFunctionSpec.linear(), 0.5)


class TestWeightEval:
    """Tests for weight_eval function."""

    @pytest.mark.parametrize("p,expected", KT_CURVE)
    def test_kt_curve(self, kt, p, expected):
        """Test kt weights along the gamma = 0.61 reference curve."""
        assert weight_eval(kt, p) == pytest.approx(expected, abs=1e-3)

    @pytest.mark.parametrize(
        "p,expected",
        [(0.5, 0.4206), (0.1, 0.1863), (0.9, 0.7117)],
    )
    def test_kt(self, kt, p, expected):
        """Test kt weights at reference points."""
        assert weight_eval(kt, p) == pytest.approx(expected, abs=5e-4)

    def test_identity(self):
        """Test identity weighting."""
        assert weight_eval(WeightingFunctionSpec.identity(), 0.3) == pytest.approx(0.3)

    def test_endpoints(self, kt):
        """Test w(0) = 0 and w(1) = 1 exactly."""
        assert weight_eval(kt, 0.0) == 0.0
        assert weight_eval(kt, 1.0) == 1.0

    def test_power_convex(self):
        """Test power_convex weighting."""
        assert weight_eval(WeightingFunctionSpec.power_convex(2.0), 0.5) == pytest.approx(0.25)

    def test_out_of_range(self, kt):
        """Test probabilities outside [0, 1] are rejected."""
        with pytest.raises(InvalidInputError):
            weight_eval(kt, 1.5)


class TestDecisionWeights:
    """Tests for decision_weights function."""

    def test_identity(self):
        """Test identity weighting gives uniform weights."""
        h = decision_weights(WeightingFunctionSpec.identity(), 4)
        np.testing.assert_allclose(h, [0.25] * 4)

    def test_kt_first_and_last(self, kt):
        """Test the extreme decision weights of kt with k = 10."""
        h = decision_weights(kt, 10)
        assert h[0] == pytest.approx(0.1863, abs=5e-4)
        assert h[-1] == pytest.approx(1.0 - 0.7117, abs=5e-4)

    def test_sums_to_one(self, kt):
        """Test weights sum to one and are positive."""
        h = decision_weights(kt, 7)
        assert h.sum() == pytest.approx(1.0, abs=1e-15)
        assert (h > 0).all()

    def test_explicit(self):
        """Test explicit weights are returned as given."""
        h = decision_weights(ExplicitWeights(explicit_h=[0.9, 0.1]), 2)
        np.testing.assert_allclose(h, [0.9, 0.1])

    def test_explicit_wrong_length(self):
        """Test explicit weights must match k."""
        with pytest.raises(InvalidInputError):
            decision_weights(ExplicitWeights(explicit_h=[0.9, 0.1]), 3)

    def test_invalid_k(self, kt):
        """Test k must be positive."""
        with pytest.raises(InvalidInputError):
            decision_weights(kt, 0)


class TestCptValue:
    """Tests for cpt_value and cpt_value_uniform functions."""

    def test_expected_value(self, linear_agent):
        """Test identity weighting with linear value is expected value."""
        assert cpt_value(linear_agent, [(0.5, 2.0), (0.5, 0.0)]) == pytest.approx(1.0)

    def test_winner_lottery(self, kt_agent):
        """Test one player's share of the ten-player cyclic lottery."""
        value = cpt_value(kt_agent, [(0.1, 9.7871), (0.9, 0.2129 / 9)])
        assert value == pytest.approx(1.41690, abs=5e-4)

    def test_split_invariance(self, kt_agent):
        """Test splitting an outcome's mass does not change the value."""
        whole = cpt_value(kt_agent, [(1.0, 5.0)])
        split = cpt_value(kt_agent, [(0.5, 5.0), (0.5, 5.0)])
        assert split == pytest.approx(whole)

    def test_order_invariance(self, kt_agent):
        """Test the input order of outcomes does not matter."""
        a = cpt_value(kt_agent, [(0.2, 1.0), (0.3, 4.0), (0.5, 2.0)])
        b = cpt_value(kt_agent, [(0.5, 2.0), (0.2, 1.0), (0.3, 4.0)])
        assert a == pytest.approx(b)

    def test_explicit_uniform(self, explicit_agent):
        """Test explicit-weight agents value uniform prospects by rank."""
        value = cpt_value(explicit_agent, [(0.5, 1.0), (0.5, 3.0)])
        assert value == pytest.approx(0.9 * 3.0 + 0.1 * 1.0)

    def test_explicit_non_uniform(self, explicit_agent):
        """Test explicit-weight agents reject non-uniform prospects."""
        with pytest.raises(InvalidInputError, match="uniform"):
            cpt_value(explicit_agent, [(0.3, 1.0), (0.7, 3.0)])

    def test_probabilities_must_sum_to_one(self, kt_agent):
        """Test probabilities summing to less than one are rejected."""
        with pytest.raises(InvalidInputError, match="sum to 1"):
            cpt_value(kt_agent, [(0.5, 1.0), (0.4, 2.0)])

    def test_negative_outcome(self, kt_agent):
        """Test negative outcomes are rejected."""
        with pytest.raises(InvalidInputError):
            cpt_value(kt_agent, [(1.0, -1.0)])

    def test_empty(self, kt_agent):
        """Test empty prospects are rejected."""
        with pytest.raises(InvalidInputError):
            cpt_value(kt_agent, [])

    @pytest.mark.parametrize(
        "h,vf,expected",
        [
            ((1 / 3, 2 / 3), ValueFunctionSpec.log_affine(1.0, 0.0, 0.05, 3.0), 3.23105),
            ((5 / 6, 1 / 6), ValueFunctionSpec.log_affine(0.4, 0.6, 0.05, 3.0), 4.33105),
        ],
    )
    def test_uniform_two_player_values(self, h, vf, expected):
        """Test each player's value at the two-player optimum."""
        assert cpt_value_uniform(h, vf, [1.95, 0.95]) == pytest.approx(expected, abs=1e-4)

    def test_uniform_constant(self):
        """Test a constant lottery is worth v of the constant."""
        vf = ValueFunctionSpec.power(0.5)
        assert cpt_value_uniform([0.2, 0.3, 0.5], vf, [4.0] * 3) == pytest.approx(2.0)

    def test_uniform_shape_mismatch(self):
        """Test weights and allocations must match."""
        with pytest.raises(InvalidInputError):
            cpt_value_uniform([0.5, 0.5], ValueFunctionSpec.linear(), [1.0])


class TestPstar:
    """Tests for pstar and lstar functions."""

    def test_identity(self):
        """Test identity weighting has p* = 0."""
        assert pstar(WeightingFunctionSpec.identity()) == 0.0

    def test_power_convex(self):
        """Test g(p) = 1 + p is minimized at zero."""
        assert pstar(WeightingFunctionSpec.power_convex(2.0)) == pytest.approx(0.0, abs=1e-9)

    def test_kt_minimizes_chord_slope(self, kt):
        """Test kt p* is interior and no grid point beats it."""
        p_star = pstar(kt)
        assert 0.0 < p_star < 0.4
        grid = np.linspace(0.0, 0.99, 991)
        assert float(chord_slope(kt, p_star)) <= chord_slope(kt, grid).min() + 1e-12

    def test_explicit_unsupported(self):
        """Test explicit weights have no p*."""
        with pytest.raises(UnsupportedFamilyError):
            pstar(ExplicitWeights(explicit_h=[0.5, 0.5]))

    @pytest.mark.parametrize(
        "p_star,k,expected",
        [(0.0, 1, 0), (0.0, 7, 0), (0.35, 10, 4), (0.4, 10, 4), (0.5, 2, 1)],
    )
    def test_lstar(self, p_star, k, expected):
        """Test first outcome index with l/k >= p*."""
        assert lstar(p_star, k) == expected

    def test_lstar_undefined(self):
        """Test p* above (k-1)/k has no tail index."""
        with pytest.raises(StructureUndefinedError):
            lstar(0.9, 2)


class TestConcaveEnvelope:
    """Tests for concave_envelope and weights_table functions."""

    def test_dominates_weighting(self, kt):
        """Test w* >= w with equality up to p*."""
        p_star = pstar(kt)
        grid = np.linspace(0.0, 1.0, 101)
        envelope = concave_envelope(kt, grid, p_star)
        weights = np.array([weight_eval(kt, float(p)) for p in grid])
        assert (envelope >= weights - 1e-12).all()
        below = grid <= p_star
        np.testing.assert_allclose(envelope[below], weights[below])

    def test_linear_beyond_pstar(self, kt):
        """Test w* is a straight line from p* to one."""
        p_star = pstar(kt)
        grid = np.linspace(p_star, 1.0, 11)
        envelope = concave_envelope(kt, grid, p_star)
        assert np.diff(envelope, 2) == pytest.approx(np.zeros(9), abs=1e-12)
        assert envelope[-1] == pytest.approx(1.0)

    def test_table_rows(self, kt):
        """Test table covers [0, 1] with the requested step."""
        rows = weights_table(kt, step=0.1)
        assert len(rows) == 11
        assert rows[0] == (0.0, 0.0, 0.0)
        assert rows[-1][0] == pytest.approx(1.0)
        assert rows[-1][2] == pytest.approx(1.0)

    def test_table_invalid_step(self, kt):
        """Test step must be in (0, 1]."""
        with pytest.raises(InvalidInputError):
            weights_table(kt, step=0.0)


class TestCptInvariance:
    """Randomized invariance properties of cpt_value."""

    def test_permutation(self, rng):
        """Test reordering a prospect leaves its value unchanged."""
        for _ in range(INVARIANCE_CASES):
            agent = random_agent(rng)
            prospect = random_prospect(rng)
            shuffled = [prospect[j] for j in rng.permutation(len(prospect))]
            assert abs(cpt_value(agent, shuffled) - cpt_value(agent, prospect)) <= 1e-12

    def test_split(self, rng):
        """Test splitting one outcome's mass in two leaves the value unchanged."""
        for _ in range(INVARIANCE_CASES):
            agent = random_agent(rng)
            prospect = random_prospect(rng)
            j = int(rng.integers(len(prospect)))
            p, y = prospect[j]
            part = p * float(rng.uniform(0.1, 0.9))
            split = [*prospect[:j], (part, y), (p - part, y), *prospect[j + 1 :]]
            assert abs(cpt_value(agent, split) - cpt_value(agent, prospect)) <= 1e-12

    def test_identity_weighting_is_expected_utility(self, rng):
        """Test identity weighting reduces to expected value of v."""
        for _ in range(INVARIANCE_CASES):
            agent = random_agent(rng, identity=True)
            prospect = random_prospect(rng)
            expected = math.fsum(
                p * float(evaluate_value(agent.value, y)) for p, y in prospect
            )
            assert abs(cpt_value(agent, prospect) - expected) <= 1e-12


class TestEnvelopeProperties:
    """Shape properties of the chord slope and the concave envelope."""

    @pytest.mark.parametrize("gamma", [0.5, 0.61, 0.75, 0.9])
    def test_chord_slope_nondecreasing_after_pstar(self, gamma):
        """Test g does not decrease on [p*, 0.999]."""
        wf = WeightingFunctionSpec.kt(gamma)
        grid = np.linspace(pstar(wf), 0.999, 1000)
        assert (np.diff(chord_slope(wf, grid)) >= -1e-8).all()

    @pytest.mark.parametrize("gamma", [0.5, 0.61, 0.75, 0.9])
    def test_envelope_midpoint_concave(self, gamma):
        """Test w* at every midpoint is at least the average of its neighbours."""
        wf = WeightingFunctionSpec.kt(gamma)
        grid = np.linspace(0.0, 1.0, 201)
        envelope = concave_envelope(wf, grid, pstar(wf))
        assert (np.diff(envelope, 2) <= 1e-8).all()

    @pytest.mark.parametrize("gamma", [0.5, 0.61, 0.75, 0.9])
    def test_envelope_dominates(self, gamma):
        """Test w* >= w on a grid, with equality up to p*."""
        wf = WeightingFunctionSpec.kt(gamma)
        p_star = pstar(wf)
        grid = np.linspace(0.0, 1.0, 201)
        envelope = concave_envelope(wf, grid, p_star)
        weights = weight_array(wf, grid)
        assert (envelope >= weights - 1e-8).all()
        below = grid <= p_star
        np.testing.assert_allclose(envelope[below], weights[below], atol=1e-8)
