"""
Path mechanics of the production-inventory system.

Cumulative supply through period n is mu*n + kappa*sigma*n**alpha, so the
net demand S_n = sigma * (sum_{i<=n} Z_i - kappa * n**alpha) does not depend
on mu. Cumulative lost sales are the running maximum of S_n (with S_0 = 0),
inventory under lost sales is L_n - S_n, and the backorder model splits S_n
into its positive part (backlog) and negative part (inventory).
"""

from typing import Sequence, Union

import numpy as np

from .exceptions import DomainError, NON_FINITE
from .models import DemandModel, PathOutcome, SupplyPolicy


def safety_curve(alpha: float, periods: int) -> np.ndarray:
    """Return n**alpha for n = 1..periods (float array)."""
    n = np.arange(1, periods + 1, dtype=float)
    return n ** alpha


def cumulative_supply(policy: SupplyPolicy, demand: DemandModel, n: int) -> float:
    """Total supply over periods 1..n: mu*n + kappa*sigma*n**alpha (zero for n = 0)."""
    if n < 0:
        raise DomainError(f"period count must be nonnegative, got {n}")
    if n == 0:
        return 0.0
    return demand.mu * n + policy.kappa * demand.sigma * float(n) ** policy.alpha


def supply_schedule(policy: SupplyPolicy, demand: DemandModel, n: int) -> float:
    """
    Production quantity of period n: mu + kappa*sigma*(n**alpha - (n-1)**alpha).

    Raises:
        DomainError: If n < 1.
    """
    if int(n) != n or n < 1:
        raise DomainError(f"period index must be an integer >= 1, got {n}")
    n = int(n)
    previous = 0.0 if n == 1 else float(n - 1) ** policy.alpha
    return demand.mu + policy.kappa * demand.sigma * (float(n) ** policy.alpha - previous)


def net_demand(noise: np.ndarray, policy: SupplyPolicy, sigma: float) -> np.ndarray:
    """
    Net demand S_n for one path (1-D noise) or a batch (periods on the last axis).

    sigma multiplies last so that results scale exactly with it.
    """
    z = np.asarray(noise, dtype=float)
    walk = np.cumsum(z, axis=-1)
    return sigma * (walk - policy.kappa * safety_curve(policy.alpha, z.shape[-1]))


def terminal_lost(noise: np.ndarray, policy: SupplyPolicy, sigma: float) -> np.ndarray:
    """L_N = max(0, max_n S_n) for each path of a batch."""
    s = net_demand(noise, policy, sigma)
    return np.maximum(s.max(axis=-1), 0.0)


def evolve_path(
    noise: Union[Sequence[float], np.ndarray],
    policy: SupplyPolicy,
    demand: DemandModel,
) -> PathOutcome:
    """
    Run the lost-sales and backorder recursions over one noise path.

    Args:
        noise: Standard normal draws Z_1..Z_N.
        policy: Supply policy (alpha, kappa).
        demand: Demand model; only sigma enters the trajectories.

    Returns:
        The trajectories S_n, L_n, H_n, B_n and H'_n for n = 1..N.

    Raises:
        DomainError: If noise is empty, not one-dimensional or not finite.
    """
    z = np.asarray(noise, dtype=float)
    if z.ndim != 1 or z.size == 0:
        raise DomainError("noise must be a nonempty one-dimensional sequence")
    if not np.all(np.isfinite(z)):
        raise DomainError("noise must be finite", code=NON_FINITE)

    s = net_demand(z, policy, demand.sigma)
    lost = np.maximum.accumulate(np.maximum(s, 0.0))
    return PathOutcome(
        net_demand=s,
        lost=lost,
        inventory_ls=lost - s,
        backlog=np.maximum(s, 0.0),
        inventory_bo=np.maximum(-s, 0.0),
    )


def expected_inventory(lost_mean: float, policy: SupplyPolicy, sigma: float, periods: int) -> float:
    """E[H_N] = E[L_N] + kappa*sigma*N**alpha, from H_N = L_N - S_N."""
    return lost_mean + policy.kappa * sigma * float(periods) ** policy.alpha
