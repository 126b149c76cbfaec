from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples ``values[i]`` of a function at ``x0 + i*h``."""

    x0: float
    h: float
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise ValueError("GridFunction values must be one-dimensional")
        if not np.all(np.isfinite(values)):
            raise ValueError("GridFunction values must be finite")
        if self.h <= 0:
            raise ValueError("grid spacing must be positive")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.h * np.arange(self.values.size)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def x_right(self) -> float:
        return self.x0 + self.h * (self.values.size - 1)

    def with_values(self, values) -> GridFunction:
        return GridFunction(self.x0, self.h, values)

    @classmethod
    def sample(cls, func, x_left: float, x_right: float, h: float) -> GridFunction:
        n = int(round((x_right - x_left) / h)) + 1
        x = x_left + h * np.arange(n)
        return cls(x_left, h, np.asarray(func(x), dtype=float))


def symmetric_nodes(radius: float, h: float) -> np.ndarray:
    """Nodes ``i*h`` for ``|i| <= round(radius/h)``; the origin is always a node."""
    n = int(round(radius / h))
    return h * np.arange(-n, n + 1)


def cell_average(func, x, h: float):
    """Two-point cell average ``(func(x - h/4) + func(x + h/4)) / 2``.

    Second-order for smooth ``func`` and keeps second order when a jump of
    ``func`` sits exactly on a node (the node then sees the mean of both sides).
    """
    x = np.asarray(x, dtype=float)
    return 0.5 * (func(x - 0.25 * h) + func(x + 0.25 * h))
