"""
Closed-form and quadrature formulas for the expected cumulative lost sales
E[L_N]: the exact Spitzer sum and its integral form for linear drift, the
Jensen lower bound, and the regime-dependent envelope for every (alpha, kappa).
"""

import logging
import math

import numpy as np
from scipy import integrate, optimize

from . import normal_kernel as nk
from .exceptions import DomainError, NumericalError, QUADRATURE_FAILED, ZERO_DRIFT
from .models import BoundEstimate, GrowthOrder, Regime

logger = logging.getLogger(__name__)

# Gaussian integrands are truncated this far past their peak.
QUAD_CUTOFF = 40.0
QUAD_TOL = 1e-10
ROOT_TOL = 1e-13


def _check_horizon(N: int) -> int:
    if int(N) != N or N < 1:
        raise DomainError(f"horizon N must be an integer >= 1, got {N}")
    return int(N)


def _check_sigma(sigma: float) -> None:
    if not math.isfinite(sigma) or sigma <= 0:
        raise DomainError(f"sigma must be positive and finite, got {sigma}")


def _check_alpha(alpha: float) -> None:
    if not math.isfinite(alpha) or not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha}")


def _check_kappa(kappa: float) -> None:
    if not math.isfinite(kappa):
        raise DomainError(f"kappa must be finite, got {kappa}")


def expected_shortfall(alpha: float, kappa: float, sigma: float, n):
    """E[S_n^+] = sigma*sqrt(n)*G(kappa*n**(alpha - 1/2)); n may be an array."""
    n = np.asarray(n, dtype=float)
    root = np.sqrt(n)
    return sigma * root * nk.loss(kappa * n ** (alpha - 0.5))


def spitzer_exact(kappa: float, sigma: float, N: int) -> float:
    """
    E[L_N] for linear drift (alpha = 1) from Spitzer's identity:
    sum_{n<=N} sigma*G(kappa*sqrt(n))/sqrt(n).
    """
    _check_kappa(kappa)
    _check_sigma(sigma)
    N = _check_horizon(N)
    n = np.arange(1, N + 1, dtype=float)
    root = np.sqrt(n)
    return float(sigma * np.sum(nk.loss(kappa * root) / root))


def spitzer_closed(kappa: float, sigma: float, N: int) -> float:
    """
    Integral form of the Spitzer sum for linear drift:
    (sigma/kappa)*(Phi(kappa*sqrt(N)) - 1/2) + sigma*sqrt(N)*G(kappa*sqrt(N)).

    Raises:
        DomainError: With code ZERO_DRIFT when kappa == 0; the zero-drift
            value 2*sigma*G(0)*sqrt(N) applies instead.
    """
    _check_kappa(kappa)
    _check_sigma(sigma)
    N = _check_horizon(N)
    if kappa == 0:
        raise DomainError(
            "spitzer_closed is singular at kappa = 0",
            code=ZERO_DRIFT,
            suggestion="Use the zero-drift value 2*sigma*G(0)*sqrt(N).",
        )
    root_n = math.sqrt(N)
    arg = kappa * root_n
    return (sigma / kappa) * (nk.cdf(arg) - 0.5) + sigma * root_n * nk.loss(arg)


def jensen_lower(alpha: float, kappa: float, sigma: float, N: int) -> float:
    """Jensen lower bound max_{1<=n<=N} E[S_n^+] over the integer grid."""
    _check_alpha(alpha)
    _check_kappa(kappa)
    _check_sigma(sigma)
    N = _check_horizon(N)
    values = expected_shortfall(alpha, kappa, sigma, np.arange(1, N + 1))
    return float(np.max(values))


def ystar_upper(alpha: float) -> float:
    """Upper end (2*alpha - 1)**(-1/2) of the root interval of ystar_root."""
    if not 0.5 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (1/2, 1), got {alpha}")
    return (2.0 * alpha - 1.0) ** -0.5


def ystar_root(alpha: float) -> float:
    """
    Positive root of pdf(y) = 2*alpha*y*ccdf(y), the peak location of the
    Jensen profile for alpha in (1/2, 1).

    Raises:
        DomainError: If alpha is outside (1/2, 1).
        NumericalError: If the bisection bracket does not change sign.
    """
    hi = ystar_upper(alpha)

    def residual(y: float) -> float:
        return nk.pdf(y) - 2.0 * alpha * y * nk.ccdf(y)

    lo = 1e-8
    if residual(lo) * residual(hi) > 0:
        raise NumericalError(f"no sign change for the peak equation on [{lo}, {hi}] at alpha={alpha}")
    root = optimize.bisect(residual, lo, hi, xtol=ROOT_TOL, maxiter=200)
    logger.debug("ystar_root(alpha=%s) = %.15g (bracket upper %.6g)", alpha, root, hi)
    return float(root)


def _half_gaussian_moment(k: float) -> float:
    """
    int_0^inf v**k pdf(v) dv by adaptive quadrature, for k > 0.

    The integrand is scaled by its peak value at v = sqrt(k) and truncated
    QUAD_CUTOFF beyond the peak. Returns inf when the moment overflows.
    """
    peak = math.sqrt(k)
    log_peak = 0.5 * k * math.log(k) - 0.5 * k

    def scaled(v: float) -> float:
        if v <= 0.0:
            return 0.0
        return math.exp(k * math.log(v) - 0.5 * v * v - log_peak)

    value, err = integrate.quad(
        scaled,
        0.0,
        peak + QUAD_CUTOFF,
        epsabs=QUAD_TOL,
        epsrel=QUAD_TOL,
        limit=200,
        points=[peak],
    )
    if not math.isfinite(value) or err > max(1e-6 * abs(value), 1e-8):
        raise NumericalError(
            f"half-Gaussian moment of order {k} did not converge (estimate {value}, error {err})",
            code=QUADRATURE_FAILED,
        )
    try:
        return value * math.exp(log_peak) / nk.SQRT_2PI
    except OverflowError:
        logger.debug("half-Gaussian moment of order %s overflows", k)
        return math.inf


def c_alpha(alpha: float, kappa: float) -> float:
    """
    Constant C_alpha bounding E[L_N]/sigma for alpha in (1/2, 1), kappa > 0:
    (2/(2a-1)) * kappa**(-3/(2a-1)) * int_0^inf v**((6-6a)/(2a-1)) pdf(v) dv.
    """
    if not 0.5 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (1/2, 1), got {alpha}")
    if not math.isfinite(kappa) or kappa <= 0:
        raise DomainError(f"kappa must be positive, got {kappa}")
    spread = 2.0 * alpha - 1.0
    order = (6.0 - 6.0 * alpha) / spread
    moment = _half_gaussian_moment(order)
    try:
        return math.exp(math.log(2.0 / spread) - (3.0 / spread) * math.log(kappa)) * moment
    except OverflowError:
        return math.inf


def _linearized_upper(kappa: float, sigma: float, N: int, theta: float) -> float:
    """Spitzer integral for the walk with linear drift kappa*theta*n."""
    root_n = math.sqrt(N)
    arg = kappa * theta * root_n
    return (sigma / (kappa * theta)) * (nk.cdf(arg) - 0.5) + sigma * root_n * nk.loss(arg)


def bound_envelope(alpha: float, kappa: float, sigma: float, N: int) -> BoundEstimate:
    """
    Lower and upper bounds on E[L_N] for any (alpha, kappa).

    Args:
        alpha: Safety exponent in [0, 1].
        kappa: Safety multiplier, any sign.
        sigma: Demand volatility.
        N: Horizon.

    Returns:
        BoundEstimate with the regime, growth order, and the constants used
        to build the bounds (theta, C_alpha, y*, y-bar) in ``constituents``.
    """
    _check_alpha(alpha)
    _check_kappa(kappa)
    _check_sigma(sigma)
    N = _check_horizon(N)
    root_n = math.sqrt(N)
    zero_drift = 2.0 * sigma * nk.PHI0 * root_n

    if kappa == 0:
        return BoundEstimate(zero_drift, zero_drift, Regime.ZERO_DRIFT, GrowthOrder.SQRT_N)

    if alpha == 1.0:
        # The Spitzer sum is exact and sits below its integral form.
        exact = spitzer_exact(kappa, sigma, N)
        closed = spitzer_closed(kappa, sigma, N)
        return BoundEstimate(
            lower=exact,
            upper=max(exact, closed),
            regime=Regime.LINEAR_POS if kappa > 0 else Regime.LINEAR_NEG,
            growth_order=GrowthOrder.BOUNDED if kappa > 0 else GrowthOrder.LINEAR_N,
            constituents={"spitzer_exact": exact, "spitzer_closed": closed},
        )

    if alpha > 0.5:
        if kappa > 0:
            y_bar = ystar_upper(alpha)
            y_star = ystar_root(alpha)
            spread = 2.0 * alpha - 1.0
            peak_n = (y_star / kappa) ** (2.0 / spread)
            constant = c_alpha(alpha, kappa)
            if N >= y_bar and peak_n <= N:
                lower = sigma * (y_star / kappa) ** (1.0 / spread) * nk.loss(y_star)
            else:
                lower = jensen_lower(alpha, kappa, sigma, N)
            return BoundEstimate(
                lower=lower,
                upper=max(lower, sigma * constant),
                regime=Regime.MID_POS,
                growth_order=GrowthOrder.BOUNDED,
                constituents={"y_star": y_star, "y_bar": y_bar, "C_alpha": constant, "peak_n": peak_n},
            )
        lower = sigma * abs(kappa) * N ** alpha
        upper = zero_drift + abs(kappa) * sigma * N ** alpha
        return BoundEstimate(lower, upper, Regime.MID_NEG, GrowthOrder.N_ALPHA)

    lower = sigma * root_n * (nk.loss(kappa) if alpha == 0.5 else nk.PHI0)
    if kappa > 0:
        theta = float(N) ** (alpha - 1.0)
        linearized = _linearized_upper(kappa, sigma, N, theta)
        upper = min(linearized, zero_drift)
        return BoundEstimate(
            lower=lower,
            upper=max(lower, upper),
            regime=Regime.LOW_POS,
            growth_order=GrowthOrder.SQRT_N,
            constituents={"theta": theta, "linearized_upper": linearized},
        )
    upper = zero_drift + abs(kappa) * sigma * N ** alpha
    return BoundEstimate(lower, upper, Regime.LOW_NEG, GrowthOrder.SQRT_N)
