"""
Supply planner facade.

This module provides a single entry point to the bounds, simulators and
solution procedures of the driftwalk library.
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

from . import asymptotics, hitting_time, optimizer, simulate
from .exceptions import DomainError
from .models import (
    BoundEstimate,
    CostParams,
    DemandModel,
    McEstimate,
    RatioReport,
    SimConfig,
    Solution,
    SupplyPolicy,
)

logger = logging.getLogger(__name__)


class SupplyPlanner:
    """Planner for a Gaussian demand stream served by a power-curve supply policy."""

    def __init__(
        self,
        sigma: float = 1.0,
        mu: float = 0.0,
        horizon: int = 100,
        sim: Optional[SimConfig] = None,
        workers: Optional[int] = None,
    ):
        """
        Initialize the planner.

        Args:
            sigma: Demand volatility per period.
            mu: Mean demand per period; it shifts supply but not lost sales.
            horizon: Planning horizon N in periods.
            sim: Monte Carlo budget and seed. Defaults to SimConfig().
            workers: Monte Carlo worker count. If not provided, it is read from
                     the DRIFTWALK_THREADS environment variable at run time.

        Raises:
            DomainError: If sigma, mu or horizon is invalid.
        """
        self.demand = DemandModel(mu=mu, sigma=sigma)
        if int(horizon) != horizon or horizon < 1:
            raise DomainError(f"horizon must be an integer >= 1, got {horizon}")
        self.horizon = int(horizon)
        self.sim = sim or SimConfig()
        self.workers = workers

    @property
    def sigma(self) -> float:
        return self.demand.sigma

    def bounds(self, alpha: float, kappa: float) -> BoundEstimate:
        """
        Get the bound envelope of E[L_N] for a policy.

        Args:
            alpha: Safety exponent in [0, 1].
            kappa: Safety multiplier.

        Returns:
            The envelope with its regime and growth order.
        """
        policy = SupplyPolicy(alpha, kappa)
        return asymptotics.bound_envelope(policy.alpha, policy.kappa, self.sigma, self.horizon)

    def spitzer(self, kappa: float, exact: bool = True) -> float:
        """E[L_N] for linear drift, by the exact sum or its closed integral form."""
        if exact:
            return asymptotics.spitzer_exact(kappa, self.sigma, self.horizon)
        return asymptotics.spitzer_closed(kappa, self.sigma, self.horizon)

    def simulate(self, alpha: float, kappa: float) -> McEstimate:
        """Monte Carlo estimate of E[L_N] for a policy."""
        return simulate.sample_LN(SupplyPolicy(alpha, kappa), self.demand, self.horizon, self.sim, self.workers)

    def rho(self, kappas: Sequence[float]) -> List[McEstimate]:
        """rho(kappa) on common random numbers, with self.sim.steps walk steps."""
        return simulate.sample_rho_curve(kappas, self.sim, self.workers)

    def hitting(self, kappa: float, x_grid: Optional[Sequence[float]] = None) -> McEstimate:
        """Hitting-time estimate of E[L_N] for the square-root curve."""
        return hitting_time.hitting_LN_estimate(
            kappa, self.sigma, self.horizon, x_grid=x_grid, cfg=self.sim, workers=self.workers
        )

    def optimize(self, costs: CostParams, method: str = "lower", holding: bool = False) -> Solution:
        """
        Choose kappa for the square-root curve.

        Args:
            costs: Unit costs.
            method: One of "lower", "upper", "upper-unconstrained",
                    "brownian" or "backorder".
            holding: Fold the lost-sales holding cost h into c and p first.

        Returns:
            The chosen kappa and its objective value.

        Raises:
            DomainError: If the method is unknown or the costs do not fit it.
        """
        if holding:
            costs = optimizer.apply_holding(costs)
        logger.info("optimizing kappa with the %s procedure", method)
        if method == "lower":
            return optimizer.solve_lower(costs, self.sigma, self.horizon)
        if method == "upper":
            return optimizer.solve_upper(costs, self.sigma, self.horizon, constrained=True)
        if method == "upper-unconstrained":
            return optimizer.solve_upper(costs, self.sigma, self.horizon, constrained=False)
        if method == "brownian":
            return optimizer.brownian_optimize(costs, self.sigma, self.horizon, self.sim, self.workers)
        if method == "backorder":
            return optimizer.backorder_solve(costs, self.sigma, self.horizon)
        raise DomainError(
            f"unknown method {method!r}",
            suggestion="Use lower, upper, upper-unconstrained, brownian or backorder.",
        )

    def ratio(self, costs: CostParams) -> RatioReport:
        """Upper/lower surrogate value ratio with its certificates."""
        return optimizer.ratio_report(costs, self.sigma, self.horizon)

    def equivalence(self, c: float, h: float, p_list: Sequence[float]) -> List[Tuple[float, Optional[float]]]:
        """Lost-sales/backorder value ratios over an ascending p grid; None where undefined."""
        return optimizer.equivalence_curve(c, h, p_list, self.sigma, self.horizon)

    def backorder(self, costs: CostParams) -> Solution:
        """Closed-form backorder solution."""
        return optimizer.backorder_solve(costs, self.sigma, self.horizon)

    def equivalence_table(self, c: float, h: float, p_list: Sequence[float]) -> List[Dict[str, Optional[float]]]:
        """Per-p kappa, both optimal values and their ratio."""
        return optimizer.equivalence_rows(c, h, p_list, self.sigma, self.horizon)
