"""
Deterministic block-parallel Monte Carlo.

Paths are cut into fixed blocks whose size depends only on the problem
size, never on the worker count; each path draws from its own substream
(see ``streams``), and per-path values are concatenated in path order
before any reduction. Means are therefore bit-identical for any number of
workers.
"""

import logging
import math
import warnings
from typing import Callable, List, Optional, Sequence

import numpy as np

from . import normal_kernel as nk
from . import streams
from .exceptions import DomainError, NumericalError, NON_FINITE, SAMPLING_FAILED
from .inventory_model import terminal_lost
from .models import DemandModel, McEstimate, MomentTriple, SimConfig, SupplyPolicy
from .pool_impl import Block, create_pool

logger = logging.getLogger(__name__)

# Doubles held per block of a path matrix (32 MiB).
BLOCK_ELEMENTS = 1 << 22
RHO_MIN_STEPS = 100

OU_HORIZON = 20.0
OU_BLOCK_PATHS = 2048
OU_CHUNK = 256
ABSORPTION_TARGET = 0.999


def _block_size(steps: int) -> int:
    size = max(2, BLOCK_ELEMENTS // max(steps, 1))
    return size - size % 2


def _blocks(total: int, size: int) -> List[Block]:
    return [(start, min(start + size, total)) for start in range(0, total, size)]


def _run_blocks(
    kernel: Callable[[Block], np.ndarray],
    cfg: SimConfig,
    block_size: int,
    workers: Optional[int],
) -> np.ndarray:
    blocks = _blocks(cfg.paths, block_size)
    logger.debug("running %d path(s) in %d block(s)", cfg.paths, len(blocks))
    with create_pool(workers) as pool:
        parts = pool.map_blocks(kernel, blocks)
    return np.concatenate(parts, axis=0)


def summarize(values: np.ndarray, cfg: SimConfig, **meta) -> McEstimate:
    """
    Reduce per-path values to a mean and standard error.

    Antithetic pairs are averaged first, so the standard error is computed
    over independent pair means.
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise NumericalError("no Monte Carlo samples to summarize", code=SAMPLING_FAILED)
    if cfg.antithetic:
        values = 0.5 * (values[0::2] + values[1::2])
    count = values.shape[0]
    mean = float(np.mean(values))
    stderr = float(np.std(values, ddof=1) / math.sqrt(count)) if count > 1 else 0.0
    return McEstimate(mean=mean, stderr=stderr, paths=cfg.paths, seed=cfg.seed, meta=dict(meta))


def sample_LN(
    policy: SupplyPolicy,
    demand: DemandModel,
    N: int,
    cfg: SimConfig,
    workers: Optional[int] = None,
) -> McEstimate:
    """
    Monte Carlo estimate of E[L_N] under the given policy.

    Args:
        policy: Supply policy (alpha, kappa).
        demand: Demand model; the estimate scales exactly with sigma.
        N: Horizon in periods.
        cfg: Path count, seed and antithetic flag.
        workers: Worker count; defaults to DRIFTWALK_THREADS / cpu count.

    Returns:
        McEstimate of E[L_N].
    """
    if int(N) != N or N < 1:
        raise DomainError(f"horizon N must be an integer >= 1, got {N}")
    N = int(N)

    def kernel(block: Block) -> np.ndarray:
        z = streams.normal_block(cfg.seed, range(*block), N, cfg.antithetic)
        return terminal_lost(z, policy, demand.sigma)

    values = _run_blocks(kernel, cfg, _block_size(N), workers)
    estimate = summarize(values, cfg, N=N, alpha=policy.alpha, kappa=policy.kappa, sigma=demand.sigma)
    logger.info("E[L_%d] ~ %.6g +/- %.2g (%d paths)", N, estimate.mean, estimate.stderr, cfg.paths)
    return estimate


def _rho_values(kappas: Sequence[float], cfg: SimConfig, workers: Optional[int]) -> np.ndarray:
    """Per-path max_{n<=steps}(W_n - kappa*sqrt(n))^+ / sqrt(steps), one column per kappa."""
    if cfg.steps < RHO_MIN_STEPS:
        raise DomainError(
            f"rho estimation needs steps >= {RHO_MIN_STEPS}, got {cfg.steps}",
            suggestion="Discretization bias decays like steps**-0.5; use at least a few thousand steps.",
        )
    kappas = np.asarray(kappas, dtype=float)
    if kappas.ndim != 1 or kappas.size == 0 or not np.all(np.isfinite(kappas)):
        raise DomainError("kappas must be a nonempty sequence of finite values", code=NON_FINITE)
    steps = cfg.steps
    root = np.sqrt(np.arange(1, steps + 1, dtype=float))
    scale = 1.0 / math.sqrt(steps)

    def kernel(block: Block) -> np.ndarray:
        walk = np.cumsum(streams.normal_block(cfg.seed, range(*block), steps, cfg.antithetic), axis=1)
        out = np.empty((walk.shape[0], kappas.size))
        for j, kappa in enumerate(kappas):
            out[:, j] = np.maximum((walk - kappa * root).max(axis=1), 0.0) * scale
        return out

    return _run_blocks(kernel, cfg, _block_size(steps), workers)


def sample_rho_curve(
    kappas: Sequence[float],
    cfg: SimConfig,
    workers: Optional[int] = None,
) -> List[McEstimate]:
    """rho(kappa) = E[sup_{t<=1}(B_t - kappa*sqrt(t))] for several kappas on common random numbers."""
    values = _rho_values(kappas, cfg, workers)
    return [
        summarize(values[:, j], cfg, kappa=float(kappa), steps=cfg.steps)
        for j, kappa in enumerate(np.asarray(kappas, dtype=float))
    ]


def sample_rho(kappa: float, cfg: SimConfig, workers: Optional[int] = None) -> McEstimate:
    """
    Estimate rho(kappa) by the random-walk prelimit with cfg.steps periods.

    The discretization bias is of order steps**-0.5 (downward).
    """
    return sample_rho_curve([kappa], cfg, workers)[0]


def rho_derivative(
    kappa: float,
    cfg: SimConfig,
    step: float = 0.05,
    workers: Optional[int] = None,
) -> McEstimate:
    """Central difference of rho at kappa with common random numbers."""
    if not step > 0:
        raise DomainError(f"difference step must be positive, got {step}")
    values = _rho_values([kappa - step, kappa + step], cfg, workers)
    return summarize((values[:, 1] - values[:, 0]) / (2.0 * step), cfg, kappa=kappa, step=step)


def sample_ou_passage_events(
    a: float,
    b: float,
    cfg: SimConfig,
    horizon: float = OU_HORIZON,
    workers: Optional[int] = None,
) -> np.ndarray:
    """
    First times the Ornstein-Uhlenbeck process dY = -Y du + sqrt(2) dW,
    started at a, reaches b; np.inf for paths still below b at the horizon.

    Euler-Maruyama with step horizon/cfg.steps. Between grid points a
    Brownian-bridge test catches crossings that the grid would miss.
    """
    for name, value in (("a", a), ("b", b), ("horizon", horizon)):
        if not math.isfinite(value):
            raise DomainError(f"{name} must be finite, got {value}", code=NON_FINITE)
    if a > b:
        raise DomainError(f"start a={a} lies above the level b={b}")
    if horizon <= 0:
        raise DomainError(f"horizon must be positive, got {horizon}")
    if a == b:
        return np.zeros(cfg.paths)
    if cfg.steps < 2:
        raise DomainError(f"passage simulation needs steps >= 2, got {cfg.steps}")

    max_steps = cfg.steps
    dt = horizon / max_steps
    diffusion = math.sqrt(2.0 * dt)

    def kernel(block: Block) -> np.ndarray:
        indices = range(*block)
        generators = [streams.path_stream(cfg.seed, i // 2 if cfg.antithetic else i) for i in indices]
        sign = np.array([-1.0 if cfg.antithetic and i % 2 else 1.0 for i in indices])
        size = len(generators)
        position = np.full(size, a)
        times = np.full(size, np.inf)
        active = np.arange(size)
        done = 0
        while active.size and done < max_steps:
            raw = np.stack([generators[r].random_raw(2 * OU_CHUNK) for r in active])
            u = streams.raw_to_uniform(raw)
            z = nk.inv_ccdf(u[:, :OU_CHUNK]) * sign[active, None]
            bridge = u[:, OU_CHUNK:]
            y = position[active]
            hit = np.full(active.size, np.inf)
            alive = np.ones(active.size, dtype=bool)
            for j in range(min(OU_CHUNK, max_steps - done)):
                y_next = y - y * dt + diffusion * z[:, j]
                gap_now = b - y
                gap_next = b - y_next
                crossed = (gap_next <= 0) | (
                    bridge[:, j] < np.exp(-np.maximum(gap_now, 0.0) * np.maximum(gap_next, 0.0) / dt)
                )
                newly = alive & crossed
                hit[newly] = (done + j + 1) * dt
                alive &= ~crossed
                y = np.where(alive, y_next, y)
                if not alive.any():
                    break
            position[active] = y
            times[active[~alive]] = hit[~alive]
            active = active[alive]
            done += OU_CHUNK
        return times

    return _run_blocks(kernel, cfg, OU_BLOCK_PATHS, workers)


def sample_ou_passage_times(
    a: float,
    b: float,
    cfg: SimConfig,
    horizon: float = OU_HORIZON,
    workers: Optional[int] = None,
) -> np.ndarray:
    """
    Passage times of the OU process from a to b, capped at the horizon.

    Paths not absorbed by the horizon are assigned the horizon; a
    UserWarning is emitted when more than 0.1% of paths are capped.
    """
    times = sample_ou_passage_events(a, b, cfg, horizon, workers)
    survivors = ~np.isfinite(times)
    share = float(np.mean(survivors))
    if share > 1.0 - ABSORPTION_TARGET:
        warnings.warn(
            f"{share:.2%} of OU paths from {a} to {b} were not absorbed by u={horizon}; "
            "their passage times are capped at the horizon.",
            UserWarning,
        )
    times[survivors] = horizon
    return times


def sample_ou_fpt_moments(
    a: float,
    b: float,
    cfg: SimConfig,
    horizon: float = OU_HORIZON,
    workers: Optional[int] = None,
) -> MomentTriple:
    """First three moments of the OU passage time T_{a,b}; zeros when a == b."""
    if a == b:
        return MomentTriple(0.0, 0.0, 0.0)
    return MomentTriple.from_samples(sample_ou_passage_times(a, b, cfg, horizon, workers))


def sample_crossing_probability(
    x: float,
    kappa: float,
    t: float,
    cfg: SimConfig,
    workers: Optional[int] = None,
) -> McEstimate:
    """
    P[B(s) >= kappa*sqrt(s) for some s in (1, t] | B(1) = -x], simulated
    directly on a grid of cfg.steps increments with a Brownian-bridge
    crossing test between grid points.
    """
    for name, value in (("x", x), ("kappa", kappa), ("t", t)):
        if not math.isfinite(value):
            raise DomainError(f"{name} must be finite, got {value}", code=NON_FINITE)
    if t <= 1.0:
        return McEstimate(mean=0.0, stderr=0.0, paths=cfg.paths, seed=cfg.seed)
    steps = cfg.steps
    ds = (t - 1.0) / steps
    grid = 1.0 + ds * np.arange(steps + 1)
    boundary = kappa * np.sqrt(grid)
    start_above = -x >= boundary[0]

    def kernel(block: Block) -> np.ndarray:
        indices = range(*block)
        u = np.empty((len(indices), 2 * steps))
        for row, index in enumerate(indices):
            u[row] = streams.uniforms(cfg.seed, index // 2 if cfg.antithetic else index, 2 * steps)
        z = nk.inv_ccdf(u[:, :steps])
        if cfg.antithetic:
            z[np.array([i % 2 == 1 for i in indices])] *= -1.0
        path = np.empty((len(indices), steps + 1))
        path[:, 0] = -x
        path[:, 1:] = -x + np.cumsum(math.sqrt(ds) * z, axis=1)
        gap = boundary - path
        gap_now, gap_next = gap[:, :-1], gap[:, 1:]
        bridge = np.exp(-2.0 * np.maximum(gap_now, 0.0) * np.maximum(gap_next, 0.0) / ds)
        crossed = (gap_next <= 0) | (u[:, steps:] < bridge)
        hit = crossed.any(axis=1) | start_above
        return hit.astype(float)

    values = _run_blocks(kernel, cfg, _block_size(2 * steps), workers)
    return summarize(values, cfg, x=x, kappa=kappa, t=t)
