"""Grid and field containers for the truncated periodic half-strip.

The domain is T_x x [0, y_max]: periodic in x over [0, 2pi) with n_x nodes,
and a truncated wall-normal interval resolved by n_y nodes with y_0 = 0
exactly on the boundary. Fields are plain (n_x, n_y) float arrays tied to
their grid; periodicity in x is handled by index wrapping inside the
difference operators, never by ghost storage.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np


class GridError(ValueError):
    """Invalid grid construction parameters."""


@dataclass(frozen=True)
class Grid:
    """Uniform tensor grid on T_x x [0, y_max].

    n_x must be even and >= 8 (the periodic 4th-order x-stencil needs the
    headroom); n_y >= 16 so the one-sided wall closures stay away from the
    far boundary.
    """

    n_x: int
    n_y: int
    y_max: float

    def __post_init__(self):
        if self.n_x < 8 or self.n_x % 2 != 0:
            raise GridError(f"n_x must be even and >= 8, got {self.n_x}")
        if self.n_y < 16:
            raise GridError(f"n_y must be >= 16, got {self.n_y}")
        if not np.isfinite(self.y_max) or self.y_max <= 0:
            raise GridError(f"y_max must be positive, got {self.y_max}")

    @property
    def dx(self) -> float:
        return 2.0 * np.pi / self.n_x

    @property
    def dy(self) -> float:
        return self.y_max / (self.n_y - 1)

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.n_x) * self.dx

    @property
    def y(self) -> np.ndarray:
        return np.linspace(0.0, self.y_max, self.n_y)

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray]:
        """(X, Y) arrays of shape (n_x, n_y)."""
        return np.meshgrid(self.x, self.y, indexing="ij")

    def weight(self, power: float = 1.0) -> np.ndarray:
        """<y>^power = (1+y)^power broadcast over the y-axis, shape (1, n_y)."""
        return ((1.0 + self.y) ** power)[None, :]


@dataclass
class Field:
    """Scalar field sampled on a Grid; values shape (n_x, n_y)."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n_x, self.grid.n_y):
            raise GridError(
                f"field shape {self.values.shape} does not match grid "
                f"({self.grid.n_x}, {self.grid.n_y})"
            )

    @classmethod
    def zeros(cls, grid: Grid) -> "Field":
        return cls(grid, np.zeros((grid.n_x, grid.n_y)))

    @classmethod
    def from_function(cls, grid: Grid, fn) -> "Field":
        """Sample fn(x, y) on the grid nodes."""
        X, Y = grid.meshgrid()
        return cls(grid, np.asarray(fn(X, Y), dtype=float))

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.values).all())

    def __add__(self, other):
        return Field(self.grid, self.values + _vals(other))

    def __sub__(self, other):
        return Field(self.grid, self.values - _vals(other))

    def __mul__(self, other):
        return Field(self.grid, self.values * _vals(other))

    __rmul__ = __mul__

    def __neg__(self):
        return Field(self.grid, -self.values)

    def to_csv(self, path) -> None:
        """Flat CSV layout: header x,y,value; row-major in x then y."""
        X, Y = self.grid.meshgrid()
        with open(path, "w") as fh:
            fh.write("x,y,value\n")
            for i in range(self.grid.n_x):
                for j in range(self.grid.n_y):
                    fh.write(f"{X[i, j]:.17g},{Y[i, j]:.17g},{self.values[i, j]:.17g}\n")

    def to_json_snapshot(self) -> dict:
        return {
            "grid": {
                "n_x": self.grid.n_x,
                "n_y": self.grid.n_y,
                "y_max": self.grid.y_max,
                "dx": self.grid.dx,
                "dy": self.grid.dy,
            },
            "values": self.values.tolist(),
        }

    @classmethod
    def from_json_snapshot(cls, payload: dict) -> "Field":
        g = payload["grid"]
        grid = Grid(n_x=g["n_x"], n_y=g["n_y"], y_max=g["y_max"])
        return cls(grid, np.asarray(payload["values"], dtype=float))


def _vals(other):
    return other.values if isinstance(other, Field) else other


def save_snapshot(path, fields: dict[str, Field], t: float, extra: dict | None = None) -> None:
    """JSON snapshot of named fields with grid metadata at time t."""
    payload: dict = {"t": t, "fields": {k: f.to_json_snapshot() for k, f in fields.items()}}
    if extra:
        payload["meta"] = extra
    with open(path, "w") as fh:
        json.dump(payload, fh)


def load_snapshot(path) -> tuple[float, dict[str, Field]]:
    with open(path) as fh:
        payload = json.load(fh)
    fields = {k: Field.from_json_snapshot(v) for k, v in payload["fields"].items()}
    return payload["t"], fields
