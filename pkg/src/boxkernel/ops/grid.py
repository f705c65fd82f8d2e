"""Midpoint quadrature grid and the discrete L2 inner product."""

import numpy as np

from boxkernel.core.exceptions import GridError
from boxkernel.core.models import Grid, Signal


def make_grid(lo: float, hi: float, n: int) -> Grid:
    """Return the ``n``-node midpoint grid on ``[lo, hi]``.

    Raises:
        GridError: If ``n < 2`` or ``hi <= lo``.
    """
    if isinstance(n, bool) or int(n) != n:
        raise GridError(f"grid node count must be an integer, got {n!r}")
    return Grid(float(lo), float(hi), int(n))


def same_grid(*signals: Signal) -> Grid:
    """Return the common grid of ``signals`` or raise :class:`GridError`."""
    grid = signals[0].grid
    for s in signals[1:]:
        if s.grid != grid:
            raise GridError(f"grid mismatch: {grid} vs {s.grid}")
    return grid


def inner_l2(f: Signal, g: Signal) -> complex:
    """Return ``sum_k f(x_k) conj(g(x_k)) w_k``."""
    grid = same_grid(f, g)
    return complex(np.sum(f.values * np.conj(g.values) * grid.weights))


def l2_norm(f: Signal) -> float:
    return float(np.sqrt(max(inner_l2(f, f).real, 0.0)))


def nearest_index(grid: Grid, position: float) -> int:
    """Return the index of the node closest to ``position``.

    Ties resolve to the lower index.

    Raises:
        GridError: If ``position`` lies outside ``[lo, hi]``.
    """
    if not grid.lo <= position <= grid.hi:
        raise GridError(
            f"position {position} outside grid interval "
            f"[{grid.lo}, {grid.hi}]"
        )
    return int(np.argmin(np.abs(grid.nodes - position)))


def check_index(grid: Grid, index: int) -> int:
    if not 0 <= int(index) < grid.n:
        raise GridError(f"grid index {index} outside [0, {grid.n})")
    return int(index)
