"""
driftwalk

Expected lost sales of a Gaussian random walk against a power-curve supply
plan, with closed-form bounds, Monte Carlo estimators and the safety-stock
decision layer built on them.
"""

__version__ = "0.1.0"

from .planner import SupplyPlanner
from .models import (
    BoundEstimate,
    CostParams,
    DemandModel,
    GrowthOrder,
    McEstimate,
    Method,
    MomentTriple,
    ProbabilityBand,
    RatioReport,
    Regime,
    SimConfig,
    Solution,
    SupplyPolicy,
)
from .exceptions import DomainError, DriftwalkError, NumericalError

__all__ = [
    "SupplyPlanner",
    "BoundEstimate",
    "CostParams",
    "DemandModel",
    "GrowthOrder",
    "McEstimate",
    "Method",
    "MomentTriple",
    "ProbabilityBand",
    "RatioReport",
    "Regime",
    "SimConfig",
    "Solution",
    "SupplyPolicy",
    "DomainError",
    "DriftwalkError",
    "NumericalError",
]
