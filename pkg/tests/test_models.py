"""
Unit tests for data models.
"""

import json
from typing import Any, Dict

import numpy as np
import pytest

from driftwalk.exceptions import DomainError, INVARIANT_VIOLATED, NON_FINITE
from driftwalk.models import (
    BoundEstimate,
    CostParams,
    DemandModel,
    GrowthOrder,
    McEstimate,
    Method,
    MillsBracket,
    MomentTriple,
    ProbabilityBand,
    Regime,
    RunRecord,
    SimConfig,
    Solution,
    SupplyPolicy,
)


class TestDemandModel:
    """Test suite for the DemandModel class."""

    def test_from_dict_with_all_fields(self):
        """Test creating a DemandModel from a dictionary with all fields."""
        demand = DemandModel.from_dict({"mu": 5, "sigma": 2})

        assert demand.mu == 5.0
        assert demand.sigma == 2.0

    def test_from_dict_with_minimal_fields(self):
        """Test that mu defaults to zero."""
        assert DemandModel.from_dict({"sigma": 1.5}).mu == 0.0

    @pytest.mark.parametrize("sigma", [0.0, -1.0])
    def test_nonpositive_sigma(self, sigma):
        """Test that sigma must be positive."""
        with pytest.raises(DomainError):
            DemandModel(sigma=sigma)

    def test_non_finite_mu(self):
        """Test that a NaN mean is rejected with the non-finite code."""
        with pytest.raises(DomainError) as excinfo:
            DemandModel(mu=float("nan"))
        assert excinfo.value.code == NON_FINITE


class TestSupplyPolicy:
    """Test suite for the SupplyPolicy class."""

    def test_alpha_range(self):
        """Test that alpha outside [0, 1] is rejected."""
        with pytest.raises(DomainError):
            SupplyPolicy(alpha=1.5, kappa=1.0)

    def test_negative_kappa_allowed(self):
        """Test that calculated under-supply is a valid policy."""
        policy = SupplyPolicy.from_dict({"alpha": 0.5, "kappa": -1})
        assert policy.kappa == -1.0


class TestSimConfig:
    """Test suite for the SimConfig class."""

    def test_defaults(self):
        """Test the default budget."""
        cfg = SimConfig()

        assert cfg.paths == 10_000
        assert cfg.seed == 0
        assert cfg.steps == 1_000
        assert cfg.antithetic is False

    def test_antithetic_needs_even_paths(self):
        """Test that antithetic sampling rejects an odd path count."""
        with pytest.raises(DomainError) as excinfo:
            SimConfig(paths=101, antithetic=True)
        assert excinfo.value.suggestion is not None

    @pytest.mark.parametrize("seed", [-1, 2 ** 64])
    def test_seed_range(self, seed):
        """Test that the seed must fit in 64 unsigned bits."""
        with pytest.raises(DomainError):
            SimConfig(seed=seed)

    def test_with_seed(self):
        """Test that with_seed keeps the rest of the budget."""
        cfg = SimConfig(paths=64, steps=200, antithetic=True).with_seed(9)

        assert (cfg.paths, cfg.seed, cfg.steps, cfg.antithetic) == (64, 9, 200, True)


class TestBoundEstimate:
    """Test suite for the BoundEstimate class."""

    def test_to_dict(self):
        """Test that enums serialize to their values."""
        est = BoundEstimate(1.0, 2.0, Regime.MID_POS, GrowthOrder.BOUNDED, {"y_star": 0.6})

        assert est.to_dict() == {
            "lower": 1.0,
            "upper": 2.0,
            "regime": "MID_POS",
            "growth_order": "bounded",
            "constituents": {"y_star": 0.6},
        }

    def test_order_enforced(self):
        """Test that lower > upper is an invariant violation."""
        with pytest.raises(DomainError) as excinfo:
            BoundEstimate(2.0, 1.0, Regime.LOW_POS, GrowthOrder.SQRT_N)
        assert excinfo.value.code == INVARIANT_VIOLATED


class TestMomentTriple:
    """Test suite for the MomentTriple class."""

    def test_exponential_moments_admissible(self):
        """Test the moments of a unit exponential."""
        assert MomentTriple(1.0, 2.0, 6.0).is_admissible()

    def test_inadmissible(self):
        """Test that m2 < m1^2 is rejected."""
        assert not MomentTriple(2.0, 1.0, 1.0).is_admissible()

    def test_from_samples(self):
        """Test raw moments of a small sample."""
        m = MomentTriple.from_samples(np.array([1.0, 2.0, 3.0]))

        assert m.m1 == pytest.approx(2.0)
        assert m.m2 == pytest.approx(14.0 / 3.0)
        assert m.m3 == pytest.approx(12.0)
        assert m.is_admissible()


class TestBrackets:
    """Test suite for MillsBracket and ProbabilityBand."""

    def test_mills_contains(self):
        """Test the membership operator."""
        bracket = MillsBracket(0.1, 0.2)

        assert 0.15 in bracket
        assert 0.25 not in bracket
        assert bracket.width == pytest.approx(0.1)

    def test_band_midpoint(self):
        """Test midpoint and half-width."""
        band = ProbabilityBand(0.2, 0.6)

        assert band.midpoint == pytest.approx(0.4)
        assert band.halfwidth == pytest.approx(0.2)

    def test_band_bounds(self):
        """Test that a band above one is rejected."""
        with pytest.raises(DomainError):
            ProbabilityBand(0.5, 1.5)


class TestCostParams:
    """Test suite for the CostParams class."""

    @pytest.fixture
    def cost_data(self) -> Dict[str, Any]:
        """Fixture for cost data."""
        return {"c": 1, "p": 4, "h": 0.5}

    def test_from_dict(self, cost_data):
        """Test creating CostParams with optional fields omitted."""
        costs = CostParams.from_dict(cost_data)

        assert costs == CostParams(c=1.0, p=4.0, h=0.5, b=0.0, h_prime=0.0)

    def test_scaled(self, cost_data):
        """Test that scaling multiplies every cost."""
        costs = CostParams.from_dict(cost_data).scaled(3.0)

        assert (costs.c, costs.p, costs.h) == (3.0, 12.0, 1.5)

    def test_negative_cost(self):
        """Test that negative costs are rejected."""
        with pytest.raises(DomainError):
            CostParams(c=-1.0, p=2.0)


class TestRecords:
    """Test suite for McEstimate, Solution and RunRecord."""

    def test_interval(self):
        """Test the z-interval."""
        est = McEstimate(mean=1.0, stderr=0.1, paths=100, seed=0)

        assert est.interval() == pytest.approx((0.7, 1.3))
        assert est.uncertainty is None

    def test_run_record_is_json(self):
        """Test that a record with nested numpy values serializes."""
        solution = Solution(kappa=np.float64(0.5), objective=1.0, method=Method.BROWNIAN)
        record = RunRecord("optimize", {"c": 1.0}, solution.to_dict(), seed=3, version="0.1.0")

        payload = json.loads(json.dumps(record.to_dict()))

        assert payload["result"]["method"] == "brownian"
        assert payload["result"]["alpha"] == 0.5
        assert payload["seed"] == 3
