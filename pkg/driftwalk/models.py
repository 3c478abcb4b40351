"""
Data models for the driftwalk library.
"""

import math
from dataclasses import dataclass, field, fields
from enum import Enum
from typing import Any, Dict, Optional

import numpy as np

from .exceptions import DomainError, INVARIANT_VIOLATED, NON_FINITE


def to_plain(value: Any) -> Any:
    """Convert enums, numpy scalars/arrays and nested containers to JSON-ready values."""
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if hasattr(value, "to_dict"):
        return value.to_dict()
    return value


def _require_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}", code=NON_FINITE)


class _DictMixin:
    """Shared to_dict for the result carriers."""

    def to_dict(self) -> Dict[str, Any]:
        return {f.name: to_plain(getattr(self, f.name)) for f in fields(self)}


class Regime(str, Enum):
    """Drift regime of the (alpha, kappa) plane."""
    LINEAR_POS = "LINEAR_POS"
    LINEAR_NEG = "LINEAR_NEG"
    MID_POS = "MID_POS"
    MID_NEG = "MID_NEG"
    LOW_POS = "LOW_POS"
    LOW_NEG = "LOW_NEG"
    ZERO_DRIFT = "ZERO_DRIFT"


class GrowthOrder(str, Enum):
    """Growth order of the expected cumulative lost sales in the horizon."""
    BOUNDED = "bounded"
    SQRT_N = "sqrt_N"
    N_ALPHA = "N_alpha"
    LINEAR_N = "linear_N"


class Method(str, Enum):
    """Solution procedures of the decision layer."""
    LOWER_SURROGATE = "lower"
    UPPER_SURROGATE = "upper"
    UPPER_UNCONSTRAINED = "upper-unconstrained"
    BROWNIAN = "brownian"
    BACKORDER = "backorder"


@dataclass(frozen=True)
class MillsBracket(_DictMixin):
    """Two-sided bracket on the standard normal upper tail."""
    lower: float
    upper: float

    def __post_init__(self):
        if not 0.0 <= self.lower <= self.upper <= 1.0:
            raise DomainError(
                f"Mills bracket must satisfy 0 <= lower <= upper <= 1, got [{self.lower}, {self.upper}]",
                code=INVARIANT_VIOLATED,
            )

    def __contains__(self, value: float) -> bool:
        return self.lower <= value <= self.upper

    @property
    def width(self) -> float:
        return self.upper - self.lower


@dataclass(frozen=True)
class DemandModel(_DictMixin):
    """Per-period Gaussian demand D_n = mu + sigma * Z_n."""
    mu: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        _require_finite("mu", self.mu)
        _require_finite("sigma", self.sigma)
        if self.sigma <= 0:
            raise DomainError(f"sigma must be positive, got {self.sigma}")
        if self.mu < 0:
            raise DomainError(f"mu must be nonnegative, got {self.mu}")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'DemandModel':
        return cls(mu=float(data.get('mu', 0.0)), sigma=float(data['sigma']))


@dataclass(frozen=True)
class SupplyPolicy(_DictMixin):
    """Cumulative supply curve mu*n + kappa*sigma*n**alpha."""
    alpha: float
    kappa: float

    def __post_init__(self):
        _require_finite("alpha", self.alpha)
        _require_finite("kappa", self.kappa)
        if not 0.0 <= self.alpha <= 1.0:
            raise DomainError(f"alpha must lie in [0, 1], got {self.alpha}")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SupplyPolicy':
        return cls(alpha=float(data['alpha']), kappa=float(data['kappa']))


@dataclass(frozen=True)
class PathOutcome(_DictMixin):
    """Trajectories of one demand path, indexed by period 1..N."""
    net_demand: np.ndarray
    lost: np.ndarray
    inventory_ls: np.ndarray
    backlog: np.ndarray
    inventory_bo: np.ndarray

    @property
    def periods(self) -> int:
        return int(self.net_demand.shape[-1])


@dataclass(frozen=True)
class BoundEstimate(_DictMixin):
    """Lower/upper envelope of E[L_N] with its regime and growth order."""
    lower: float
    upper: float
    regime: Regime
    growth_order: GrowthOrder
    constituents: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 <= self.lower <= self.upper:
            raise DomainError(
                f"bound envelope must satisfy 0 <= lower <= upper, got [{self.lower}, {self.upper}]",
                code=INVARIANT_VIOLATED,
            )


@dataclass(frozen=True)
class SimConfig(_DictMixin):
    """Monte Carlo budget and seed."""
    paths: int = 10_000
    seed: int = 0
    steps: int = 1_000
    antithetic: bool = False

    def __post_init__(self):
        if int(self.paths) != self.paths or self.paths < 1:
            raise DomainError(f"paths must be a positive integer, got {self.paths}")
        if int(self.steps) != self.steps or self.steps < 1:
            raise DomainError(f"steps must be a positive integer, got {self.steps}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2 ** 64:
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.antithetic and self.paths % 2:
            raise DomainError(
                f"antithetic sampling needs an even path count, got {self.paths}",
                suggestion="Round paths up to the next even number.",
            )

    def with_seed(self, seed: int) -> 'SimConfig':
        return SimConfig(paths=self.paths, seed=seed, steps=self.steps, antithetic=self.antithetic)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SimConfig':
        return cls(
            paths=int(data.get('paths', 10_000)),
            seed=int(data.get('seed', 0)),
            steps=int(data.get('steps', 1_000)),
            antithetic=bool(data.get('antithetic', False)),
        )


@dataclass(frozen=True)
class McEstimate(_DictMixin):
    """Monte Carlo mean with its standard error."""
    mean: float
    stderr: float
    paths: int
    seed: int
    uncertainty: Optional[float] = None
    meta: Dict[str, Any] = field(default_factory=dict)

    def interval(self, z: float = 3.0):
        """Return (mean - z*stderr, mean + z*stderr)."""
        return self.mean - z * self.stderr, self.mean + z * self.stderr


@dataclass(frozen=True)
class MomentTriple(_DictMixin):
    """First three raw moments of a nonnegative random variable."""
    m1: float
    m2: float
    m3: float

    def is_admissible(self, rtol: float = 1e-9) -> bool:
        """Check m1 >= 0, m2 >= m1**2 and m1*m3 >= m2**2 up to a relative tolerance."""
        if self.m1 < 0:
            return False
        if self.m2 < self.m1 ** 2 * (1 - rtol):
            return False
        return self.m1 * self.m3 >= self.m2 ** 2 * (1 - rtol)

    @classmethod
    def from_samples(cls, samples: np.ndarray) -> 'MomentTriple':
        x = np.asarray(samples, dtype=float)
        return cls(m1=float(np.mean(x)), m2=float(np.mean(x ** 2)), m3=float(np.mean(x ** 3)))


@dataclass(frozen=True)
class TailShape(_DictMixin):
    """Normalized second and third moment shape (C_M^2, D_M^2)."""
    cm2: float
    dm2: float


@dataclass(frozen=True)
class ProbabilityBand(_DictMixin):
    """Interval [low, high] known to contain a probability."""
    low: float
    high: float

    def __post_init__(self):
        if not 0.0 <= self.low <= self.high <= 1.0:
            raise DomainError(
                f"probability band must satisfy 0 <= low <= high <= 1, got [{self.low}, {self.high}]",
                code=INVARIANT_VIOLATED,
            )

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.low + self.high)

    @property
    def halfwidth(self) -> float:
        return 0.5 * (self.high - self.low)


@dataclass(frozen=True)
class CostParams(_DictMixin):
    """Unit costs: production c, lost-sales p, holding h, backlog b, backorder holding h_prime."""
    c: float
    p: float
    h: float = 0.0
    b: float = 0.0
    h_prime: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            _require_finite(f.name, value)
            if value < 0:
                raise DomainError(f"cost {f.name} must be nonnegative, got {value}")

    def scaled(self, factor: float) -> 'CostParams':
        """Return every cost multiplied by factor."""
        return CostParams(
            c=self.c * factor,
            p=self.p * factor,
            h=self.h * factor,
            b=self.b * factor,
            h_prime=self.h_prime * factor,
        )

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'CostParams':
        return cls(
            c=float(data['c']),
            p=float(data['p']),
            h=float(data.get('h', 0.0)),
            b=float(data.get('b', 0.0)),
            h_prime=float(data.get('h_prime', 0.0)),
        )


@dataclass(frozen=True)
class Solution(_DictMixin):
    """Safety multiplier chosen by one solution procedure, alpha fixed at one half."""
    kappa: float
    objective: float
    method: Method
    alpha: float = 0.5
    stderr: Optional[float] = None
    meta: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class RatioReport(_DictMixin):
    """Upper/lower surrogate values and the certificates bracketing their ratio."""
    v_lower: float
    v_upper: float
    ratio: float
    ratio_upper_cert: float
    kappa_lower: float
    kappa_upper: float
    ratio_lower_cert: float = 2.0


@dataclass
class RunRecord(_DictMixin):
    """One CLI run: the inputs needed to replay it and its result payload."""
    command: str
    params: Dict[str, Any]
    result: Any
    seed: int
    version: str
    wall_time: float = 0.0
