"""
Choice of the safety multiplier kappa for the square-root curve (alpha = 1/2).

Surrogates: the lower-bound problem min c*k + p*G(k) (closed form), the
upper-bound problem min F(k) with F(k) = c*k + p*((Phi(k) - 1/2)/k + G(k)),
and the Brownian problem min c*k + p*rho(k) solved on simulated rho. All
objectives are scale-free; reported values carry the sigma*sqrt(N) factor.
"""

import logging
import math
import warnings
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize, special

from . import normal_kernel as nk
from . import inventory_model, simulate
from .exceptions import BRACKETING_FAILED, DomainError, NumericalError
from .models import CostParams, DemandModel, McEstimate, Method, RatioReport, SimConfig, Solution, SupplyPolicy

logger = logging.getLogger(__name__)

UNCONSTRAINED_LIMIT = 10.0
BROWNIAN_GRID = 41
SMOOTHING_POINTS = 7
FIT_XATOL = 1e-8
_SERIES_CUTOFF = 1e-3
_ORDER_TOL = 1e-10


def _scale(sigma: float, N: int) -> float:
    if not math.isfinite(sigma) or sigma <= 0:
        raise DomainError(f"sigma must be positive and finite, got {sigma}")
    if int(N) != N or N < 1:
        raise DomainError(f"horizon N must be an integer >= 1, got {N}")
    return sigma * math.sqrt(N)


def _require_lost_sales_order(costs: CostParams) -> None:
    if not 0 < costs.c < costs.p:
        raise DomainError(
            f"lost-sales surrogates need 0 < c < p, got c={costs.c}, p={costs.p}",
            suggestion="For p <= c use solve_upper(..., constrained=False).",
        )


def kappa_lower(c: float, p: float) -> float:
    """kappa_l = inv_ccdf(c/p), the minimizer of c*k + p*G(k)."""
    if not (math.isfinite(c) and math.isfinite(p)) or not 0 < c < p:
        raise DomainError(f"kappa_lower needs 0 < c < p, got c={c}, p={p}")
    return nk.inv_ccdf(c / p)


def objective_lower(kappa: float, costs: CostParams) -> float:
    """Scale-free lower-bound objective c*k + p*G(k)."""
    return costs.c * kappa + costs.p * nk.loss(kappa)


def _half_gap_ratio(kappa: float) -> float:
    """(Phi(k) - 1/2)/k, with the limit pdf(0) at k = 0."""
    if abs(kappa) < 1e-8:
        return nk.PHI0
    return 0.5 * float(special.erf(kappa / math.sqrt(2.0))) / kappa


def objective_upper(kappa: float, costs: CostParams) -> float:
    """
    Scale-free upper-bound objective F(k) = c*k + p*((Phi(k) - 1/2)/k + G(k)).

    F(0) = 2*p*pdf(0) is the continuous extension.
    """
    return costs.c * kappa + costs.p * (_half_gap_ratio(kappa) + nk.loss(kappa))


def _upper_slope(kappa: float, costs: CostParams) -> float:
    """F'(k) = c - p*ccdf(k) + p*(k*pdf(k) - (Phi(k) - 1/2))/k^2."""
    if abs(kappa) < _SERIES_CUTOFF:
        curvature = -nk.PHI0 * kappa / 3.0
    else:
        half_gap = 0.5 * float(special.erf(kappa / math.sqrt(2.0)))
        curvature = (kappa * nk.pdf(kappa) - half_gap) / (kappa * kappa)
    return costs.c - costs.p * nk.ccdf(kappa) + costs.p * curvature


def optimality_residual(kappa: float, costs: CostParams) -> float:
    """c*k + p*G(k) - (p/k)*(1/2 - ccdf(k)); zero at an interior upper-surrogate optimum."""
    if kappa == 0:
        raise DomainError("the optimality equation is degenerate at kappa = 0")
    return objective_lower(kappa, costs) - costs.p * (0.5 - nk.ccdf(kappa)) / kappa


def solve_lower(costs: CostParams, sigma: float, N: int) -> Solution:
    """Lower-bound surrogate: kappa_l with value sigma*sqrt(N)*p*pdf(kappa_l)."""
    _require_lost_sales_order(costs)
    scale = _scale(sigma, N)
    kappa = kappa_lower(costs.c, costs.p)
    return Solution(
        kappa=kappa,
        objective=scale * (costs.p * nk.pdf(kappa)),
        method=Method.LOWER_SURROGATE,
    )


def _constrained_upper_kappa(costs: CostParams) -> float:
    if costs.p <= 2.0 * costs.c:
        return 0.0
    hi = 1.0
    while _upper_slope(hi, costs) <= 0:
        hi *= 2.0
        if hi > 1e3:
            raise NumericalError(f"no upper bracket for the upper-surrogate minimizer at {costs}")
    lo = 1e-12
    logger.debug("upper surrogate bracket [%g, %g]", lo, hi)
    return float(optimize.brentq(_upper_slope, lo, hi, args=(costs,), xtol=1e-15, rtol=4 * np.finfo(float).eps))


def solve_upper(costs: CostParams, sigma: float, N: int, constrained: bool = True) -> Solution:
    """
    Upper-bound surrogate: minimize F over kappa >= 0 (or over all kappa).

    Constrained, F'(0+) = c - p/2 decides: for p <= 2c the minimizer is 0,
    otherwise it is the unique root of F' on (0, inf). Unconstrained, F is
    minimized on [-10, 10]; a minimizer at the edge is reported with a
    warning, since for p < c the objective decreases without bound.

    Raises:
        DomainError: If c or p is not positive.
    """
    if not (costs.c > 0 and costs.p > 0):
        raise DomainError(f"upper surrogate needs c > 0 and p > 0, got c={costs.c}, p={costs.p}")
    scale = _scale(sigma, N)
    if constrained:
        kappa = _constrained_upper_kappa(costs)
        method = Method.UPPER_SURROGATE
    else:
        result = optimize.minimize_scalar(
            objective_upper,
            bounds=(-UNCONSTRAINED_LIMIT, UNCONSTRAINED_LIMIT),
            args=(costs,),
            method="bounded",
            options={"xatol": 1e-10},
        )
        kappa = float(result.x)
        method = Method.UPPER_UNCONSTRAINED
        if UNCONSTRAINED_LIMIT - abs(kappa) < 1e-4:
            warnings.warn(
                f"unconstrained upper surrogate pegged at kappa={kappa:.4g}; "
                "the objective keeps decreasing beyond the search range.",
                UserWarning,
            )
    return Solution(kappa=kappa, objective=scale * objective_upper(kappa, costs), method=method)


def ratio_report(costs: CostParams, sigma: float, N: int) -> RatioReport:
    """V^u/V^l with its certificates 2 <= V^u/V^l <= 2*pdf(0)/pdf(kappa_l)."""
    lower = solve_lower(costs, sigma, N)
    upper = solve_upper(costs, sigma, N, constrained=True)
    if lower.kappa > upper.kappa + _ORDER_TOL:
        raise NumericalError(
            f"surrogate order violated: kappa_l={lower.kappa} > kappa_u={upper.kappa}",
            code=BRACKETING_FAILED,
        )
    return RatioReport(
        v_lower=lower.objective,
        v_upper=upper.objective,
        ratio=upper.objective / lower.objective,
        ratio_upper_cert=2.0 * nk.PHI0 / nk.pdf(lower.kappa),
        kappa_lower=lower.kappa,
        kappa_upper=upper.kappa,
    )


def brownian_optimize(
    costs: CostParams,
    sigma: float,
    N: int,
    cfg: SimConfig,
    workers: Optional[int] = None,
) -> Solution:
    """
    Minimize c*k + p*rho(k) with simulated rho.

    rho is estimated on BROWNIAN_GRID points of [kappa_l - 1, kappa_u + 1]
    with common random numbers. A quadratic fitted through the
    SMOOTHING_POINTS grid points around the grid argmin is minimized on
    that window by bounded golden-section search, and rho and its slope are
    re-estimated at the result on the same random numbers.

    Returns:
        Solution with objective sigma*sqrt(N)*(c*k + p*rho(k)) and its
        stderr; ``meta`` holds the bracket, the grid minimum and the
        scale-free slope c + p*rho'(k), which is near zero at an interior
        optimum.
    """
    _require_lost_sales_order(costs)
    scale = _scale(sigma, N)
    lo = kappa_lower(costs.c, costs.p) - 1.0
    hi = _constrained_upper_kappa(costs) + 1.0
    grid = np.linspace(lo, hi, BROWNIAN_GRID)
    rho = simulate.sample_rho_curve(grid, cfg, workers)
    means = np.array([estimate.mean for estimate in rho])
    errors = np.array([estimate.stderr for estimate in rho])
    values = costs.c * grid + costs.p * means
    best = int(np.argmin(values))

    first = min(max(best - SMOOTHING_POINTS // 2, 0), grid.size - SMOOTHING_POINTS)
    window = slice(first, first + SMOOTHING_POINTS)
    curve = np.polynomial.Polynomial.fit(grid[window], values[window], 2)
    coef = curve.convert().coef
    if coef.size == 3 and coef[2] > 0:
        refined = optimize.minimize_scalar(
            lambda k: float(curve(k)),
            bounds=(float(grid[window][0]), float(grid[window][-1])),
            method="bounded",
            options={"xatol": FIT_XATOL},
        )
        kappa = float(refined.x)
    else:
        kappa = float(grid[best])
    kappa = min(max(kappa, lo), hi)
    logger.debug("brownian optimizer: grid argmin %.6g, refined %.6g", grid[best], kappa)

    at_kappa = simulate.sample_rho(kappa, cfg, workers)
    slope = simulate.rho_derivative(kappa, cfg, workers=workers)
    return Solution(
        kappa=kappa,
        objective=scale * (costs.c * kappa + costs.p * at_kappa.mean),
        method=Method.BROWNIAN,
        stderr=scale * costs.p * at_kappa.stderr,
        meta={
            "bracket": [lo, hi],
            "rho": at_kappa.mean,
            "grid_kappa": float(grid[best]),
            "grid_objective": scale * float(values[best]),
            "grid_max_stderr": scale * costs.p * float(errors.max()),
            "slope": costs.c + costs.p * slope.mean,
            "slope_stderr": costs.p * slope.stderr,
        },
    )


def apply_holding(costs: CostParams) -> CostParams:
    """
    Fold the lost-sales holding cost into the other costs:
    c <- c + h, p <- p + h, h <- 0.

    h is taken as already rescaled by the 2/3 factor of the averaged
    inventory; no rescaling happens here.
    """
    return CostParams(c=costs.c + costs.h, p=costs.p + costs.h, h=0.0, b=costs.b, h_prime=costs.h_prime)


def backorder_solve(costs: CostParams, sigma: float, N: int) -> Solution:
    """
    Backorder model: min (c+h')k + (b+h')G(k), solved by k = inv_ccdf((c+h')/(b+h')).

    Raises:
        DomainError: If c >= b or c + h' = 0.
    """
    if not costs.c < costs.b:
        raise DomainError(f"backorder model needs c < b, got c={costs.c}, b={costs.b}")
    buy = costs.c + costs.h_prime
    short = costs.b + costs.h_prime
    if buy <= 0:
        raise DomainError("backorder model needs c + h' > 0")
    scale = _scale(sigma, N)
    kappa = nk.inv_ccdf(buy / short)
    return Solution(
        kappa=kappa,
        objective=scale * (buy * kappa + short * nk.loss(kappa)),
        method=Method.BACKORDER,
    )


def equivalence_rows(
    c: float,
    h: float,
    p_list: Sequence[float],
    sigma: float,
    N: int,
) -> List[Dict[str, Optional[float]]]:
    """
    Lost-sales against backorder optimal values for b = p and h' = h.

    The lost-sales value is the leading term sigma*sqrt(N)*(c+h)*y of its
    optimum; the backorder value is exact. Both use y = inv_ccdf((c+h)/(p+h)).
    Where (c+h)/(p+h) >= 1/2, y <= 0 and the leading term is no longer a
    value: such rows carry lost_sales and ratio as None.

    Raises:
        DomainError: If p_list is not ascending or some p <= c.
    """
    prices = [float(p) for p in p_list]
    if not prices:
        raise DomainError("p_list must not be empty")
    if any(b <= a for a, b in zip(prices, prices[1:])):
        raise DomainError(f"p_list must be strictly ascending, got {prices}")
    scale = _scale(sigma, N)
    rows = []
    for p in prices:
        if not p > c:
            raise DomainError(f"every p must exceed c={c}, got {p}")
        costs = CostParams(c=c, p=p, h=h, b=p, h_prime=h)
        merged = apply_holding(costs)
        y = kappa_lower(merged.c, merged.p)
        backorder = backorder_solve(costs, sigma, N)
        lost_sales = scale * merged.c * y if y > 0 else None
        if lost_sales is None:
            logger.info("equivalence ratio undefined at p=%g: (c+h)/(p+h) = %.4g >= 1/2", p, merged.c / merged.p)
        rows.append({
            "p": p,
            "kappa": y,
            "kappa_backorder": backorder.kappa,
            "lost_sales": lost_sales,
            "backorder": backorder.objective,
            "ratio": None if lost_sales is None else lost_sales / backorder.objective,
        })
    return rows


def equivalence_curve(
    c: float,
    h: float,
    p_list: Sequence[float],
    sigma: float,
    N: int,
) -> List[Tuple[float, Optional[float]]]:
    """(p, lost-sales/backorder value ratio) pairs; ratios approach 1 from below as p grows."""
    return [(row["p"], row["ratio"]) for row in equivalence_rows(c, h, p_list, sigma, N)]


def optimality_gap(
    costs: CostParams,
    sigma: float,
    N: int,
    kappa: float,
    cfg: SimConfig,
    kappa_grid: Sequence[float],
    workers: Optional[int] = None,
) -> McEstimate:
    """
    J_N(kappa)/min over kappa_grid of J_N, with
    J_N(k) = sigma*sqrt(N)*c*k + p*E[L_N(k)] + h*E[H_N(k)]
    simulated under alpha = 1/2 on common random numbers.
    """
    scale = _scale(sigma, N)
    demand = DemandModel(sigma=sigma)
    grid = [float(k) for k in kappa_grid]
    if not grid:
        raise DomainError("kappa_grid must not be empty")

    def cost(k: float) -> Tuple[float, float]:
        policy = SupplyPolicy(0.5, k)
        lost = simulate.sample_LN(policy, demand, N, cfg, workers)
        value = scale * costs.c * k + costs.p * lost.mean
        if costs.h:
            value += costs.h * inventory_model.expected_inventory(lost.mean, policy, sigma, N)
        return value, (costs.p + costs.h) * lost.stderr

    value, error = cost(kappa)
    grid_costs = [cost(k) for k in grid]
    best = int(np.argmin([v for v, _ in grid_costs]))
    best_value, best_error = grid_costs[best]
    ratio = value / best_value
    stderr = abs(ratio) * math.hypot(error / value, best_error / best_value)
    return McEstimate(
        mean=ratio,
        stderr=stderr,
        paths=cfg.paths,
        seed=cfg.seed,
        meta={"J": value, "J_grid_min": best_value, "kappa_grid_min": grid[best], "N": N},
    )
