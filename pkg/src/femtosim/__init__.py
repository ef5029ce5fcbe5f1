"""System-level simulator for integrated femtocell/macrocell networks.

Implements four frequency-allocation schemes (dedicated, same, partial, and
sectorized dynamic re-use with SON-coordinated edge bands) and quantifies
femto-UE outage probability both by Monte Carlo sampling and by the
closed-form conditional expression for exponential fading.
"""

__version__ = "0.1.0"

from .channel import ChannelSample, LinkPowers, PropagationParams
from .outage import OutageConfig, OutageEstimate, conditional_outage, density_sweep, estimate
from .spectrum import (
    Band,
    EdgeChoice,
    FemtoAllocation,
    FrequencyPlan,
    MacroSector,
    Scheme,
    UeRegion,
    build_plan,
)
from .topology import Deployment, DeploymentParams, Fap, MacroBs, NeighborGraph, Scenario

__all__ = [
    "Band",
    "ChannelSample",
    "Deployment",
    "DeploymentParams",
    "EdgeChoice",
    "Fap",
    "FemtoAllocation",
    "FrequencyPlan",
    "LinkPowers",
    "MacroBs",
    "MacroSector",
    "NeighborGraph",
    "OutageConfig",
    "OutageEstimate",
    "PropagationParams",
    "Scenario",
    "Scheme",
    "UeRegion",
    "build_plan",
    "conditional_outage",
    "density_sweep",
    "estimate",
]
