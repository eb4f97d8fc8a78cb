"""Desk-scale numerical laboratory for the 2D MHD boundary-layer system
with temperature: homogenized formulation, eps-parabolic regularization
with correctors, cancellation-quantity diagnostics, weighted-Sobolev
monitoring, and a verification suite for the checkable inequalities.
"""

from .config import ConfigError, SolverConfig
from .grid import Field, Grid
from .homogenize import (
    HomogeneousState,
    PhysicalState,
    from_homogeneous,
    reconstruct_vg,
    source_terms,
    to_homogeneous,
)
from .norms import WeightedNormSpec, weighted_l2_norm, weighted_sobolev_norm
from .operators import ddx, ddy, inv_dy
from .outer_flow import CutoffPhi, OuterFlow, make_flow, matching_residuals, m0_estimate

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "CutoffPhi",
    "Field",
    "Grid",
    "HomogeneousState",
    "OuterFlow",
    "PhysicalState",
    "SolverConfig",
    "WeightedNormSpec",
    "ddx",
    "ddy",
    "from_homogeneous",
    "inv_dy",
    "m0_estimate",
    "make_flow",
    "matching_residuals",
    "reconstruct_vg",
    "source_terms",
    "to_homogeneous",
    "weighted_l2_norm",
    "weighted_sobolev_norm",
    "__version__",
]
