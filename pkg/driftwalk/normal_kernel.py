"""
Standard normal primitives and the Gaussian loss function.

All functions accept a float or a numpy array and return the same shape
(a plain float for scalar input). Tails are evaluated directly through
``scipy.special.ndtr`` on the mirrored argument, never as ``1 - cdf``.
"""

import math
from typing import Union

import numpy as np
from scipy import special

from .exceptions import DomainError, NON_FINITE, OUT_OF_RANGE
from .models import MillsBracket

ArrayLike = Union[float, np.ndarray]

SQRT_2PI = math.sqrt(2.0 * math.pi)
PHI0 = 1.0 / SQRT_2PI

# Beyond this point G(x) < 1e-34 and is reported as exactly zero.
LOSS_UNDERFLOW = 12.0

_NEWTON_STEPS = 2


def _as_finite(x: ArrayLike, name: str = "x") -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite", code=NON_FINITE)
    return arr


def _out(arr: np.ndarray, like: ArrayLike) -> ArrayLike:
    if np.ndim(like) == 0:
        return float(arr)
    return arr


def pdf(x: ArrayLike) -> ArrayLike:
    """Standard normal density."""
    arr = _as_finite(x)
    return _out(np.exp(-0.5 * arr * arr) / SQRT_2PI, x)


def cdf(x: ArrayLike) -> ArrayLike:
    """Standard normal distribution function."""
    arr = _as_finite(x)
    return _out(special.ndtr(arr), x)


def ccdf(x: ArrayLike) -> ArrayLike:
    """Upper tail 1 - cdf(x), computed without cancellation."""
    arr = _as_finite(x)
    return _out(special.ndtr(-arr), x)


def inv_ccdf(q: ArrayLike) -> ArrayLike:
    """
    Inverse of the upper tail: the x with ccdf(x) = q.

    A rational-approximation seed (``scipy.special.ndtri``) is refined by
    Newton steps on ccdf.

    Raises:
        DomainError: If any q lies outside the open interval (0, 1).
    """
    arr = np.asarray(q, dtype=float)
    if not np.all((arr > 0.0) & (arr < 1.0)):
        raise DomainError("inv_ccdf needs q in the open interval (0, 1)", code=OUT_OF_RANGE)
    x = -special.ndtri(arr)
    for _ in range(_NEWTON_STEPS):
        dens = np.exp(-0.5 * x * x) / SQRT_2PI
        step = np.divide(special.ndtr(-x) - arr, dens, out=np.zeros_like(x), where=dens > 0)
        x = x + step
    return _out(x, q)


def loss(x: ArrayLike) -> ArrayLike:
    """
    Gaussian loss function G(x) = E[(Z - x)^+] = pdf(x) - x * ccdf(x).

    Returns exactly 0 for x > 12, where the value is below double
    precision significance.
    """
    arr = _as_finite(x)
    g = np.exp(-0.5 * arr * arr) / SQRT_2PI - arr * special.ndtr(-arr)
    g = np.where(arr > LOSS_UNDERFLOW, 0.0, np.maximum(g, 0.0))
    return _out(g, x)


def loss_integral(a: float, b: float) -> float:
    """
    Integral of G over [a, b] from the closed form
    2*int_a^b G = cdf(b) - cdf(a) + b*G(b) - a*G(a).

    ``b`` may be +inf.

    Raises:
        DomainError: If a > b or a is not finite.
    """
    if not math.isfinite(a):
        raise DomainError("lower limit must be finite", code=NON_FINITE)
    if math.isnan(b):
        raise DomainError("upper limit must not be NaN", code=NON_FINITE)
    if a > b:
        raise DomainError(f"integration limits out of order: a={a} > b={b}")
    if a == b:
        return 0.0
    if math.isinf(b):
        upper = 1.0
    else:
        upper = cdf(b) + b * loss(b)
    return 0.5 * (upper - cdf(a) - a * loss(a))


def mills_bounds(x: float) -> MillsBracket:
    """
    Two-sided Mills-ratio bracket (1 - 1/x^2) pdf(x)/x <= ccdf(x) <= pdf(x)/x.

    The lower end is clamped at zero for x <= 1.

    Raises:
        DomainError: If x <= 0.
    """
    _as_finite(x)
    if x <= 0:
        raise DomainError(f"mills_bounds needs x > 0, got {x}")
    upper = pdf(x) / x
    lower = max(0.0, (1.0 - 1.0 / (x * x)) * upper)
    return MillsBracket(lower=lower, upper=min(upper, 1.0))
