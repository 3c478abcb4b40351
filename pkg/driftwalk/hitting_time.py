"""
Three-moment tail bounds on first-passage times and the hitting-time
estimate of E[L_N] for the square-root safety curve (alpha = 1/2).

Under the time change Y(u) = B(e^{2u})/e^u, the walk's Brownian limit
crossing kappa*sqrt(s) after s = 1 becomes an Ornstein-Uhlenbeck process
crossing the constant level kappa/sqrt(sigma). Passage-time moments come
from ``simulate``; the three-moment bounds turn them into a band on the
crossing probability, the reflection principle caps that band from both
sides, and integrating the band over the starting deficit x gives the
estimate.
"""

import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from . import normal_kernel as nk
from . import simulate, streams
from .exceptions import DEGENERATE_GRID, INVARIANT_VIOLATED, DomainError, NON_FINITE
from .models import McEstimate, MomentTriple, ProbabilityBand, SimConfig, TailShape

logger = logging.getLogger(__name__)

GRID_NODES = 32
TRUNCATION = 1e-6
BATCHES = 4


def tail_shape(m: MomentTriple) -> TailShape:
    """
    Normalized shape of a moment triple:
    cm2 = (m2 - m1^2)/m1^2 and dm2 = (m1*m3 - m2^2)/m1^4.

    Raises:
        DomainError: If m1 <= 0 or the triple is not admissible.
    """
    if not m.m1 > 0:
        raise DomainError(f"tail shape needs m1 > 0, got {m.m1}")
    if not m.is_admissible():
        raise DomainError(
            f"moment triple {m} violates m2 >= m1^2 or m1*m3 >= m2^2",
            code=INVARIANT_VIOLATED,
        )
    m1_sq = m.m1 * m.m1
    cm2 = max(0.0, (m.m2 - m1_sq) / m1_sq)
    dm2 = max(0.0, (m.m1 * m.m3 - m.m2 * m.m2) / (m1_sq * m1_sq))
    return TailShape(cm2=cm2, dm2=dm2)


def _clamp(p: float) -> float:
    return min(1.0, max(0.0, p))


def _right_tail(cm2: float, dm2: float, delta: float) -> float:
    gap = cm2 - delta
    if delta > cm2:
        chebyshev = cm2 / (cm2 + delta * delta)
        refined = dm2 / (dm2 + gap * gap) / (1.0 + delta)
        return min(chebyshev, refined)
    denominator = dm2 + (1.0 + cm2) * gap
    if denominator <= 0.0:
        # dm2 == 0 and delta == cm2: the limit of both branches
        return 1.0 / (1.0 + cm2)
    return (dm2 + (1.0 + delta) * gap) / denominator / (1.0 + delta)


def _left_tail(cm2: float, dm2: float, delta: float) -> float:
    shifted = cm2 + delta
    return 1.0 - shifted ** 3 / ((dm2 + (cm2 + 1.0) * shifted) * (dm2 + shifted * shifted))


def bp_tail_bounds(m: MomentTriple, delta: float) -> Tuple[float, Optional[float]]:
    """
    Three-moment bounds (f1, f2) on P[X > (1+delta)*m1] and P[X < (1-delta)*m1].

    Args:
        m: First three moments of the nonnegative variable X.
        delta: Relative distance from the mean, > 0.

    Returns:
        (f1, f2), both clamped to [0, 1]; f2 is None when delta >= 1.

    Raises:
        DomainError: If delta <= 0 or the triple is invalid.
    """
    if not math.isfinite(delta) or delta <= 0:
        raise DomainError(f"delta must be positive and finite, got {delta}")
    shape = tail_shape(m)
    f1 = _clamp(_right_tail(shape.cm2, shape.dm2, delta))
    f2 = _clamp(_left_tail(shape.cm2, shape.dm2, delta)) if delta < 1.0 else None
    return f1, f2


def fpt_probability_band(x: float, kappa: float, sigma: float, t: float, m: MomentTriple) -> ProbabilityBand:
    """
    Band on P[tau_x < t], the probability that the Brownian limit started
    at B(1) = -x crosses kappa*sqrt(s) before time t.

    ``m`` holds the passage-time moments of the OU process from -x to
    kappa/sqrt(sigma); t maps to u = ln(t)/2 on the OU clock.
    """
    for name, value in (("x", x), ("kappa", kappa), ("sigma", sigma), ("t", t)):
        if not math.isfinite(value):
            raise DomainError(f"{name} must be finite, got {value}", code=NON_FINITE)
    if x < 0:
        raise DomainError(f"x must be nonnegative, got {x}")
    if t <= 1.0:
        return ProbabilityBand(0.0, 0.0)
    if m.m1 == 0.0:
        return ProbabilityBand(1.0, 1.0)
    u = 0.5 * math.log(t)
    if u > m.m1:
        f1, _ = bp_tail_bounds(m, u / m.m1 - 1.0)
        return ProbabilityBand(1.0 - f1, 1.0)
    if u < m.m1:
        _, f2 = bp_tail_bounds(m, 1.0 - u / m.m1)
        return ProbabilityBand(0.0, f2)
    return ProbabilityBand(0.0, 1.0)


def reach_band(x: float, level: float, t: float) -> ProbabilityBand:
    """
    Gaussian-reach band on P[tau_x < t] for the boundary level*sqrt(s).

    On (1, t] the boundary stays between level and level*sqrt(t), so the
    crossing probability lies between the reflection-principle chances of
    reaching the higher and the lower of those two constant levels.
    Both edges coincide at level 0, where the band is exact.
    """
    for name, value in (("x", x), ("level", level), ("t", t)):
        if not math.isfinite(value):
            raise DomainError(f"{name} must be finite, got {value}", code=NON_FINITE)
    if t <= 1.0:
        return ProbabilityBand(0.0, 0.0)
    scale = math.sqrt(t - 1.0)
    near, far = sorted((level, level * math.sqrt(t)))

    def reach(gap: float) -> float:
        return 1.0 if gap <= 0 else min(1.0, 2.0 * nk.ccdf(gap / scale))

    return ProbabilityBand(reach(x + far), reach(x + near))


def _intersect(moments: ProbabilityBand, reach: ProbabilityBand) -> ProbabilityBand:
    low, high = max(moments.low, reach.low), min(moments.high, reach.high)
    if low > high:
        # sampled moments disagree with the exact reach: keep the reach band
        return reach
    return ProbabilityBand(low, high)


def ou_passage_probability(
    a: float,
    b: float,
    u: float,
    cfg: SimConfig,
    workers: Optional[int] = None,
) -> McEstimate:
    """Monte Carlo estimate of P[T_{a,b} <= u] for the OU passage time."""
    if a >= b:
        if a > b:
            raise DomainError(f"start a={a} lies above the level b={b}")
        return McEstimate(mean=1.0, stderr=0.0, paths=cfg.paths, seed=cfg.seed)
    times = simulate.sample_ou_passage_events(a, b, cfg, horizon=u, workers=workers)
    return simulate.summarize(np.isfinite(times).astype(float), cfg, a=a, b=b, u=u)


def default_grid(kappa: float, sigma: float, N: int) -> np.ndarray:
    """
    GRID_NODES uniform nodes on [0, x_max].

    x_max is where the upper edge of the reach band drops to TRUNCATION,
    so it moves with both the drift level and N.
    """
    drift = kappa / math.sqrt(sigma)
    scale = math.sqrt(N - 1.0)
    near = min(drift, drift * math.sqrt(N))
    x_max = max(scale * nk.inv_ccdf(0.5 * TRUNCATION) - near, scale)
    return np.linspace(0.0, x_max, GRID_NODES)


def _check_grid(x_grid: Sequence[float]) -> np.ndarray:
    grid = np.asarray(x_grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise DomainError("x grid needs at least two nodes", code=DEGENERATE_GRID)
    if not np.all(np.isfinite(grid)) or grid[0] < 0 or np.any(np.diff(grid) <= 0):
        raise DomainError(
            "x grid must be finite, nonnegative and strictly increasing",
            code=DEGENERATE_GRID,
        )
    return grid


def hitting_LN_estimate(
    kappa: float,
    sigma: float,
    N: int,
    x_grid: Optional[Sequence[float]] = None,
    cfg: Optional[SimConfig] = None,
    workers: Optional[int] = None,
    horizon: float = simulate.OU_HORIZON,
) -> McEstimate:
    """
    Estimate E[L_N] for alpha = 1/2 by integrating the crossing-probability
    band midpoint over the starting deficit x.

    At each node the three-moment band is intersected with ``reach_band``;
    integration stops at the first node whose reach edge falls below
    TRUNCATION.

    Passage-time moments are re-estimated at every grid node with a seed
    derived from (cfg.seed, node index). The Monte Carlo error is measured
    from BATCHES disjoint batches of each node's sample.

    Returns:
        McEstimate whose ``uncertainty`` is the integrated band half-width
        plus the Monte Carlo stderr. ``meta`` carries the OU level
        ``drift_b`` and the estimate under the sqrt(sigma) scaling.

    Raises:
        DomainError: On N < 2, sigma <= 0 or a degenerate grid.
    """
    if int(N) != N or N < 2:
        raise DomainError(f"hitting estimate needs an integer N >= 2, got {N}")
    if not math.isfinite(kappa):
        raise DomainError(f"kappa must be finite, got {kappa}", code=NON_FINITE)
    if not math.isfinite(sigma) or sigma <= 0:
        raise DomainError(f"sigma must be positive and finite, got {sigma}")
    cfg = cfg or SimConfig()
    grid = _check_grid(default_grid(kappa, sigma, N) if x_grid is None else x_grid)
    level = kappa / math.sqrt(sigma)
    t = float(N)
    logger.debug("hitting estimate: level %.6g, %d nodes on [0, %.6g]", level, grid.size, grid[-1])

    mid = np.empty(grid.size)
    half = np.empty(grid.size)
    batch_mid = np.empty((BATCHES, grid.size))
    cut = float(grid[-1])
    for i, x in enumerate(grid):
        start = -float(x)
        if start >= level:
            mid[i], half[i] = 1.0, 0.0
            batch_mid[:, i] = 1.0
            continue
        reach = reach_band(float(x), level, t)
        if reach.high < TRUNCATION:
            mid[i:], half[i:], batch_mid[:, i:] = 0.0, 0.0, 0.0
            cut = float(x)
            logger.debug("integrand below %.0e from x = %.6g, truncating", TRUNCATION, x)
            break
        if reach.low == reach.high:
            mid[i], half[i] = reach.low, 0.0
            batch_mid[:, i] = reach.low
            continue
        node_cfg = cfg.with_seed(streams.derive_seed(cfg.seed, i))
        times = simulate.sample_ou_passage_times(start, level, node_cfg, horizon, workers)
        band = _intersect(fpt_probability_band(float(x), kappa, sigma, t, MomentTriple.from_samples(times)), reach)
        mid[i], half[i] = band.midpoint, band.halfwidth
        for k, part in enumerate(np.array_split(times, BATCHES)):
            moments = fpt_probability_band(float(x), kappa, sigma, t, MomentTriple.from_samples(part))
            batch_mid[k, i] = _intersect(moments, reach).midpoint

    value = float(integrate.trapezoid(mid, grid))
    width = float(integrate.trapezoid(half, grid))
    batches = integrate.trapezoid(batch_mid, grid, axis=1)
    stderr = sigma * float(np.std(batches, ddof=1)) / math.sqrt(BATCHES)
    estimate = McEstimate(
        mean=sigma * value,
        stderr=stderr,
        paths=cfg.paths,
        seed=cfg.seed,
        uncertainty=sigma * width + stderr,
        meta={
            "drift_b": level,
            "sqrt_sigma_scaled": math.sqrt(sigma) * value,
            "nodes": int(grid.size),
            "x_max": float(grid[-1]),
            "x_cut": cut,
        },
    )
    logger.info("hitting E[L_%d] ~ %.6g (uncertainty %.3g)", N, estimate.mean, estimate.uncertainty)
    return estimate
