"""
Unit tests for the SupplyPlanner class.
"""

from unittest.mock import patch

import pytest

from driftwalk import SupplyPlanner
from driftwalk import normal_kernel as nk
from driftwalk.exceptions import DomainError
from driftwalk.models import CostParams, Method, Regime, SimConfig


class TestSupplyPlanner:
    """Test suite for SupplyPlanner."""

    @pytest.fixture
    def planner(self):
        """Fixture for a unit-volatility planner over 100 periods."""
        return SupplyPlanner(sigma=1.0, horizon=100, sim=SimConfig(paths=500, seed=7, steps=200))

    def test_defaults(self):
        """Test the default demand, horizon and budget."""
        planner = SupplyPlanner()

        assert planner.sigma == 1.0
        assert planner.demand.mu == 0.0
        assert planner.horizon == 100
        assert planner.sim == SimConfig()
        assert planner.workers is None

    @pytest.mark.parametrize("kwargs", [{"sigma": 0.0}, {"horizon": 0}, {"horizon": 2.5}])
    def test_invalid_arguments(self, kwargs):
        """Test bad sigma and horizon values."""
        with pytest.raises(DomainError):
            SupplyPlanner(**kwargs)

    def test_bounds(self, planner):
        """Test the zero-drift envelope through the planner."""
        est = planner.bounds(0.5, 0.0)

        assert est.regime == Regime.ZERO_DRIFT
        assert est.lower == pytest.approx(20.0 * nk.PHI0)

    def test_bounds_reject_bad_alpha(self, planner):
        """Test alpha outside [0, 1]."""
        with pytest.raises(DomainError):
            planner.bounds(1.5, 1.0)

    def test_spitzer_forms(self, planner):
        """Test the exact sum sits below its integral form."""
        assert planner.spitzer(1.0) < planner.spitzer(1.0, exact=False)

    def test_mean_demand_does_not_move_lost_sales(self):
        """Test that mu cancels out of the lost-sales estimate."""
        sim = SimConfig(paths=200, seed=3)
        a = SupplyPlanner(mu=0.0, horizon=50, sim=sim).simulate(0.5, 1.0)
        b = SupplyPlanner(mu=25.0, horizon=50, sim=sim).simulate(0.5, 1.0)

        assert a.mean == b.mean

    def test_simulate_forwards_budget(self, planner):
        """Test the planner passes its horizon, budget and workers to the sampler."""
        planner.workers = 2
        with patch("driftwalk.simulate.sample_LN") as sample:
            planner.simulate(0.5, 1.0)
        args = sample.call_args[0]
        assert args[2] == 100
        assert args[3] is planner.sim
        assert args[4] == 2

    def test_rho_curve(self, planner):
        """Test one estimate per kappa."""
        assert len(planner.rho([0.0, 1.0])) == 2

    @pytest.mark.parametrize("method, expected", [
        ("lower", Method.LOWER_SURROGATE),
        ("upper", Method.UPPER_SURROGATE),
        ("upper-unconstrained", Method.UPPER_UNCONSTRAINED),
    ])
    def test_optimize_methods(self, planner, method, expected):
        """Test the closed-form and deterministic procedures."""
        sol = planner.optimize(CostParams(c=1.0, p=10.0), method=method)

        assert sol.method == expected
        assert sol.kappa > 0

    def test_optimize_with_holding(self, planner):
        """Test holding folds h into c and p before solving."""
        folded = planner.optimize(CostParams(c=1.0, p=4.0, h=1.0), holding=True)
        direct = planner.optimize(CostParams(c=2.0, p=5.0))

        assert folded.kappa == direct.kappa

    def test_optimize_backorder(self, planner):
        """Test the backorder procedure through optimize and backorder."""
        costs = CostParams(c=1.0, p=0.0, b=39.0, h_prime=1.0)

        assert planner.optimize(costs, method="backorder").kappa == planner.backorder(costs).kappa

    def test_optimize_unknown_method(self, planner):
        """Test an unknown method name."""
        with pytest.raises(DomainError) as excinfo:
            planner.optimize(CostParams(c=1.0, p=2.0), method="newton")
        assert "newton" in str(excinfo.value)

    def test_ratio(self, planner):
        """Test the ratio report at p = 2c."""
        assert planner.ratio(CostParams(c=1.0, p=2.0)).ratio == 2.0

    def test_equivalence_views_agree(self, planner):
        """Test the curve and the table carry the same ratios."""
        curve = planner.equivalence(1.0, 0.5, [10.0, 100.0])
        table = planner.equivalence_table(1.0, 0.5, [10.0, 100.0])

        assert curve == [(row["p"], row["ratio"]) for row in table]
