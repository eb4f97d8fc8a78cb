"""Initial-data presets for runs and studies.

All profiles decay super-exponentially before the truncation height and
respect the homogeneous wall conditions (u = theta = 0, dy h = 0). The
magnetic presets pair a decaying wall ramp with a constant outer field so
that h0 + H phi' stays >= 2*delta0 pointwise: the ramp carries the floor
near the wall where phi' = 0 and the outer trace carries it aloft.
"""

from __future__ import annotations

import numpy as np

from .config import SolverConfig
from .grid import Field, Grid
from .homogenize import HomogeneousState
from .outer_flow import CutoffPhi


def _ramp(y: np.ndarray) -> np.ndarray:
    """~1 near the wall, < 1e-7 by y = 8; dy at the wall is exactly 0."""
    return np.exp(-((y / 4.0) ** 4))


def make_initial_state(
    name: str,
    grid: Grid,
    phi: CutoffPhi,
    cfg: SolverConfig,
    **params,
) -> HomogeneousState:
    name = name.lower()
    X, Y = grid.meshgrid()

    if name == "zero":
        return HomogeneousState.zeros(grid)

    if name == "shear":
        # x-independent shear profiles with active viscous/Joule heating
        amp_u = params.get("amp_u", 0.5)
        amp_theta = params.get("amp_theta", 0.2)
        amp_x = params.get("amp_x", 0.0)
        u = amp_u * Y * np.exp(-Y) * (1.0 + amp_x * np.sin(X))
        theta = amp_theta * Y**2 * np.exp(-Y)
        # 2.5*delta0 overshoots the 2*delta0 floor so the ramp's slow decay
        # stays covered until the outer trace H*phi' takes over (needs the
        # flow to carry H >= 2*delta0)
        h = 2.5 * cfg.delta0 * _ramp(Y)
        return HomogeneousState(Field(grid, u), Field(grid, theta), Field(grid, h))

    if name == "floor":
        # 2D state honoring the magnetic-floor hypothesis with margin
        amp_u = params.get("amp_u", 0.3)
        amp_theta = params.get("amp_theta", 0.1)
        mod = params.get("mod", 0.3)
        u = amp_u * np.sin(X) * Y**2 * np.exp(-Y)
        theta = amp_theta * Y**2 * np.exp(-Y) * (1.0 + mod * np.cos(X))
        h = 2.5 * cfg.delta0 * _ramp(Y) + params.get("amp_h", 0.03) * np.cos(
            X
        ) * Y**2 * np.exp(-Y)
        return HomogeneousState(Field(grid, u), Field(grid, theta), Field(grid, h))

    if name == "perturbed_floor":
        # floor preset plus a wall-compatible magnetic perturbation
        base = make_initial_state("floor", grid, phi, cfg, **params)
        size = params.get("perturb", 1e-6)
        bump = size * np.cos(X) * (1.0 + Y) * np.exp(-Y)
        return HomogeneousState(
            base.u, base.theta, Field(grid, base.h.values + bump)
        )

    raise ValueError(f"unknown init preset '{name}'")
