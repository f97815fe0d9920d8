"""Composite-Simpson helpers on uniform odd-count grids."""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError


def simpson_weights(n: int, h: float) -> np.ndarray:
    """Weights for composite Simpson on n equispaced points (n odd)."""
    if n < 3 or n % 2 == 0:
        raise InvalidInputError("Simpson rule needs an odd number of points >= 3")
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (h / 3.0)


def integrate(values, grid) -> complex:
    """Composite-Simpson integral of samples on a uniform grid."""
    grid = np.asarray(grid)
    h = grid[1] - grid[0]
    w = simpson_weights(len(grid), h)
    return complex(np.sum(w * np.asarray(values)))


def inner(u, v, grid) -> complex:
    """Quadratic-mean pairing <u, v> = integral of u * conj(v)."""
    return integrate(np.asarray(u) * np.conj(np.asarray(v)), grid)


def norm(u, grid) -> float:
    val = inner(u, u, grid)
    return float(np.sqrt(max(val.real, 0.0)))
