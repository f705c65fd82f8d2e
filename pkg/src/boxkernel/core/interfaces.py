"""Abstract interface for kernel sources."""

from abc import ABC, abstractmethod

import numpy as np

from boxkernel.core.models import Grid


class KernelSource(ABC):
    """Abstract base class for anything that realizes a two-variable function.

    Concrete sources (closed-form catalog entries, CSV tables, ...) must
    implement this interface.  The operation modules only ever see the
    sampled matrix, never a specific source implementation.
    """

    @property
    @abstractmethod
    def name(self) -> str:
        """Identifier used in configs and log messages."""

    @property
    @abstractmethod
    def domain(self) -> tuple[float, float]:
        """The interval ``[lo, hi]`` on which the function is total."""

    @property
    def is_reproducing(self) -> bool:
        """Whether the function is known to be a reproducing kernel."""
        return False

    @abstractmethod
    def sample(self, grid: Grid) -> np.ndarray:
        """Return the ``n x n`` matrix of values on ``grid x grid``.

        Args:
            grid: The grid to sample on.

        Returns:
            A complex array whose entry ``(i, j)`` is the value at
            ``(nodes[i], nodes[j])``.
        """


class ClosedFormKernel(KernelSource):
    """A kernel source given by a vectorized rule ``(u, v) -> value``.

    Subclasses only implement :meth:`evaluate`; sampling on a grid and
    evaluation at scattered points both go through it.
    """

    @abstractmethod
    def evaluate(self, u, v) -> np.ndarray:
        """Evaluate the rule with numpy broadcasting over ``u`` and ``v``."""

    def sample(self, grid: Grid) -> np.ndarray:
        nodes = grid.nodes
        values = self.evaluate(nodes[:, None], nodes[None, :])
        return np.broadcast_to(
            np.asarray(values, dtype=complex), (grid.n, grid.n)
        ).copy()

    def contains(self, points) -> np.ndarray:
        """Return a boolean mask of the points inside :attr:`domain`."""
        lo, hi = self.domain
        points = np.asarray(points, dtype=float)
        return (points >= lo) & (points <= hi)
