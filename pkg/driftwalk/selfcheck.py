"""
Fast invariant suite run by ``driftwalk selfcheck``.
"""

import logging
import math
from typing import Any, Callable, Dict, List, Tuple

import numpy as np

from . import asymptotics, hitting_time, optimizer, simulate
from . import normal_kernel as nk
from .exceptions import DriftwalkError
from .models import CostParams, DemandModel, MomentTriple, SimConfig, SupplyPolicy

logger = logging.getLogger(__name__)


def _loss_reflection() -> Tuple[bool, str]:
    x = np.linspace(-5.0, 5.0, 101)
    gap = float(np.max(np.abs(nk.loss(-x) - nk.loss(x) - x)))
    return gap < 1e-12, f"max |G(-x) - G(x) - x| = {gap:.3g}"


def _mills_bracket() -> Tuple[bool, str]:
    bad = [x for x in (0.5, 1.0, 2.0, 5.0, 10.0) if nk.ccdf(x) not in nk.mills_bounds(x)]
    return not bad, f"ccdf outside bracket at {bad}" if bad else "ccdf inside bracket"


def _inverse_tail() -> Tuple[bool, str]:
    q = np.array([1e-12, 1e-6, 0.025, 0.5, 0.9])
    gap = float(np.max(np.abs(nk.ccdf(nk.inv_ccdf(q)) - q) / q))
    return gap < 1e-12, f"max relative error {gap:.3g}"


def _loss_integral() -> Tuple[bool, str]:
    value = nk.loss_integral(0.0, math.inf)
    return abs(value - 0.25) < 1e-15, f"int_0^inf G = {value!r}"


def _spitzer_order() -> Tuple[bool, str]:
    exact = asymptotics.spitzer_exact(1.0, 1.0, 1000)
    closed = asymptotics.spitzer_closed(1.0, 1.0, 1000)
    limit = asymptotics.spitzer_closed(1.0, 1.0, 10 ** 6)
    ok = exact <= closed and 0.495 <= limit <= 0.505
    return ok, f"exact {exact:.6f} <= closed {closed:.6f}; limit {limit:.6f}"


def _envelope_order() -> Tuple[bool, str]:
    for alpha in (0.0, 0.25, 0.5, 0.75, 1.0):
        for kappa in (-1.0, 0.0, 0.5, 1.0):
            est = asymptotics.bound_envelope(alpha, kappa, 1.0, 10 ** 4)
            if not est.lower <= est.upper:
                return False, f"lower > upper at alpha={alpha}, kappa={kappa}"
    return True, "lower <= upper on the regime grid"


def _ratio_certificate() -> Tuple[bool, str]:
    report = optimizer.ratio_report(CostParams(c=1.0, p=2.0), 1.0, 100)
    wide = optimizer.ratio_report(CostParams(c=1.0, p=10.0), 1.0, 100)
    ok = report.ratio == 2.0 and 2.0 <= wide.ratio <= wide.ratio_upper_cert + 1e-9
    return ok, f"ratio {report.ratio!r} at p = 2c, {wide.ratio:.6f} at p = 10c"


def _branch_continuity() -> Tuple[bool, str]:
    f1, _ = hitting_time.bp_tail_bounds(MomentTriple(1.0, 2.0, 6.0), 1.0)
    return abs(f1 - 0.5) < 1e-12, f"f1 at delta = C^2: {f1!r}"


def _worker_invariance() -> Tuple[bool, str]:
    cfg = SimConfig(paths=2000, seed=7)
    policy, demand = SupplyPolicy(0.5, 1.0), DemandModel()
    serial = simulate.sample_LN(policy, demand, 200, cfg, workers=1)
    pooled = simulate.sample_LN(policy, demand, 200, cfg, workers=4)
    return serial.mean == pooled.mean, f"{serial.mean!r} vs {pooled.mean!r}"


CHECKS: List[Tuple[str, Callable[[], Tuple[bool, str]]]] = [
    ("loss_reflection", _loss_reflection),
    ("mills_bracket", _mills_bracket),
    ("inverse_tail", _inverse_tail),
    ("loss_integral", _loss_integral),
    ("spitzer_order", _spitzer_order),
    ("envelope_order", _envelope_order),
    ("ratio_certificate", _ratio_certificate),
    ("branch_continuity", _branch_continuity),
    ("worker_invariance", _worker_invariance),
]


def run_checks() -> List[Dict[str, Any]]:
    """Run every check; a check that raises counts as failed."""
    results = []
    for name, check in CHECKS:
        try:
            passed, detail = check()
        except DriftwalkError as e:
            passed, detail = False, str(e)
        logger.debug("selfcheck %s: %s (%s)", name, "ok" if passed else "FAILED", detail)
        results.append({"name": name, "passed": bool(passed), "detail": detail})
    return results
