"""Weighted L2 and Sobolev norms over the truncated strip.

The weighted space uses <y> = 1+y. The L2_l norm is

    ||f||_{L2_l}^2 = int_Omega <y>^{2l} |f|^2 dx dy

by rectangle rule in periodic x and trapezoid in y. The Sobolev norm H^m_l
sums ||<y>^{k+l} dt^b1 dx^b2 dy^k f||^2 over |b1|+|b2|+k <= m; time
derivatives are never stored histories - they are substituted through the
evolution right-hand side supplied by the caller.

Each norm can also report the far-boundary tail bound <y_max>^{2l} times the
boundary-row L2 mass, which quantifies what the truncation at y_max discards.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Field
from .operators import ddx, ddy

MAX_SOBOLEV_ORDER = 3


@dataclass(frozen=True)
class WeightedNormSpec:
    """Order/weight selection for the H^m_l norm.

    include_time_derivatives: 0 drops all dt terms; 1 includes dt-order-one
    terms via RHS substitution (higher substitution orders are out of desk
    scope).
    """

    m: int
    l: float
    include_time_derivatives: int = 0

    def __post_init__(self):
        if self.m < 0 or self.m > MAX_SOBOLEV_ORDER:
            raise ValueError(f"sobolev order m must be in 0..{MAX_SOBOLEV_ORDER}")
        if self.l < 0:
            raise ValueError("weight exponent l must be >= 0")
        if self.include_time_derivatives not in (0, 1):
            raise ValueError("include_time_derivatives must be 0 or 1")


def _quad_weights(grid):
    wy = np.full(grid.n_y, grid.dy)
    wy[0] = wy[-1] = 0.5 * grid.dy
    return grid.dx * wy[None, :]


def weighted_l2_sq(f: Field, l: float) -> float:
    """Square of the weighted L2_l norm."""
    g = f.grid
    w = _quad_weights(g) * g.weight(2.0 * l)
    return float(np.sum(w * f.values**2))


def weighted_l2_norm(f: Field, l: float = 0.0) -> float:
    if l < 0:
        raise ValueError("weight exponent l must be >= 0")
    return float(np.sqrt(weighted_l2_sq(f, l)))


def tail_bound(f: Field, l: float = 0.0) -> float:
    """Truncation diagnostic: <y_max>^{2l} times the far-row L2 mass."""
    g = f.grid
    row = f.values[:, -1]
    return float((1.0 + g.y_max) ** (2.0 * l) * np.sqrt(g.dx * np.sum(row**2)))


def _y_derivs(values, grid, k):
    out = values
    for _ in range(k):
        out = ddy(out, 1, grid)
    return out


def _x_derivs(values, grid, b2):
    out = values
    for _ in range(b2):
        out = ddx(out, 1, grid)
    return out


def weighted_sobolev_norm(
    fields,
    spec: WeightedNormSpec,
    time_substitution=None,
    with_tail: bool = False,
):
    """H^m_l norm of one field or a tuple of fields.

    time_substitution: callable mapping a field index to the RHS array that
    stands in for its time derivative. Required when
    spec.include_time_derivatives = 1.
    """
    if isinstance(fields, Field):
        fields = [fields]
    if spec.include_time_derivatives > 0 and time_substitution is None:
        raise ValueError("time-derivative substitution requires an RHS provider")

    total = 0.0
    tail = 0.0
    for idx, f in enumerate(fields):
        g = f.grid
        quad = _quad_weights(g)
        levels = {0: f.values}
        if spec.include_time_derivatives >= 1:
            levels[1] = np.asarray(time_substitution(idx), dtype=float)
        for b1, base in levels.items():
            for b2 in range(spec.m - b1 + 1):
                vx = _x_derivs(base, g, b2)
                vk = vx
                for k in range(spec.m - b1 - b2 + 1):
                    if k > 0:
                        vk = ddy(vk, 1, g)
                    w = g.weight(2.0 * (k + spec.l))
                    total += float(np.sum(quad * w * vk**2))
                    if with_tail:
                        tail += float(
                            (1.0 + g.y_max) ** (2.0 * (k + spec.l))
                            * g.dx
                            * np.sum(vk[:, -1] ** 2)
                        )
    norm = float(np.sqrt(total))
    if with_tail:
        return norm, float(np.sqrt(tail))
    return norm


def sup_weighted(f: Field, power: float) -> float:
    """||<y>^power f||_inf on the grid."""
    return float(np.max(np.abs(f.grid.weight(power) * f.values)))
