"""Finite-difference and antiderivative operators on strip fields.

x-derivatives: 4th-order centered periodic stencils (O(dx^4) contract).
y-derivatives: 2nd-order centered in the interior with 2nd-order one-sided
closures at y=0 and y=y_max; the closures are exact on linears (order 1)
and on quadratics (order 2).
inv_dy: cumulative trapezoid from the wall, (inv_dy f)(y) = int_0^y f dz,
exactly zero on the wall row.

All operators accept either a Field or a raw (n_x, n_y) array plus grid,
and act columnwise/rowwise with no shared state.
"""

from __future__ import annotations

import numpy as np

from .grid import Field, Grid


def _unpack(f, grid=None):
    if isinstance(f, Field):
        return f.values, f.grid, True
    if grid is None:
        raise ValueError("raw arrays need an explicit grid")
    return np.asarray(f, dtype=float), grid, False


def _pack(values, grid, was_field):
    return Field(grid, values) if was_field else values


def ddx(f, order: int = 1, grid: Grid | None = None):
    """Periodic x-derivative of order 1 or 2, 4th-order accurate."""
    v, g, wrap = _unpack(f, grid)
    dx = g.dx
    vp1 = np.roll(v, -1, axis=0)
    vm1 = np.roll(v, 1, axis=0)
    vp2 = np.roll(v, -2, axis=0)
    vm2 = np.roll(v, 2, axis=0)
    if order == 1:
        out = (-vp2 + 8.0 * vp1 - 8.0 * vm1 + vm2) / (12.0 * dx)
    elif order == 2:
        out = (-vp2 + 16.0 * vp1 - 30.0 * v + 16.0 * vm1 - vm2) / (12.0 * dx * dx)
    else:
        raise ValueError(f"ddx order must be 1 or 2, got {order}")
    return _pack(out, g, wrap)


def ddy(f, order: int = 1, grid: Grid | None = None):
    """Wall-normal derivative, centered interior + one-sided boundary rows."""
    v, g, wrap = _unpack(f, grid)
    if g.n_y < 5:
        raise ValueError("ddy needs n_y >= 5")
    dy = g.dy
    out = np.empty_like(v)
    if order == 1:
        out[:, 1:-1] = (v[:, 2:] - v[:, :-2]) / (2.0 * dy)
        out[:, 0] = (-3.0 * v[:, 0] + 4.0 * v[:, 1] - v[:, 2]) / (2.0 * dy)
        out[:, -1] = (3.0 * v[:, -1] - 4.0 * v[:, -2] + v[:, -3]) / (2.0 * dy)
    elif order == 2:
        out[:, 1:-1] = (v[:, 2:] - 2.0 * v[:, 1:-1] + v[:, :-2]) / (dy * dy)
        out[:, 0] = (2.0 * v[:, 0] - 5.0 * v[:, 1] + 4.0 * v[:, 2] - v[:, 3]) / (dy * dy)
        out[:, -1] = (2.0 * v[:, -1] - 5.0 * v[:, -2] + 4.0 * v[:, -3] - v[:, -4]) / (dy * dy)
    else:
        raise ValueError(f"ddy order must be 1 or 2, got {order}")
    return _pack(out, g, wrap)


def inv_dy(f, grid: Grid | None = None):
    """Antiderivative from the wall: cumulative trapezoid along y, 0 at y=0."""
    v, g, wrap = _unpack(f, grid)
    dy = g.dy
    out = np.empty_like(v)
    out[:, 0] = 0.0
    np.cumsum(0.5 * dy * (v[:, 1:] + v[:, :-1]), axis=1, out=out[:, 1:])
    return _pack(out, g, wrap)
