"""Kernel source backed by a CSV table sampled on a midpoint grid."""

from pathlib import Path

import numpy as np

from boxkernel.core.exceptions import KernelInvariantError
from boxkernel.core.interfaces import KernelSource
from boxkernel.core.models import Grid
from boxkernel.csvio import read_kernel_table


class TableKernel(KernelSource):
    """A kernel given as an explicit ``n x n`` table.

    The table must already be sampled on the midpoint grid it is used
    with; no interpolation is done.

    Args:
        matrix: The sampled values.
        name: Identifier used in logs and ``run.json``.
        domain: The interval the table was sampled on.
        reproducing: Whether the caller asserts the table is PSD.
    """

    def __init__(
        self,
        matrix: np.ndarray,
        name: str = "table",
        domain: tuple[float, float] = (0.0, 1.0),
        reproducing: bool = False,
    ):
        matrix = np.array(matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise KernelInvariantError(
                f"shape: kernel table must be square, got {matrix.shape}"
            )
        matrix.setflags(write=False)
        self._matrix = matrix
        self._name = name
        self._domain = (float(domain[0]), float(domain[1]))
        self._reproducing = reproducing

    @classmethod
    def from_csv(
        cls, path: Path, domain: tuple[float, float] = (0.0, 1.0)
    ) -> "TableKernel":
        """Load a headerless ``re+imj`` table written by the csvio module."""
        path = Path(path)
        try:
            matrix = read_kernel_table(path)
        except ValueError as e:
            raise KernelInvariantError(f"{path}: unreadable entry: {e}") from e
        return cls(matrix, name=path.name, domain=domain)

    @property
    def name(self) -> str:
        return self._name

    @property
    def domain(self) -> tuple[float, float]:
        return self._domain

    @property
    def is_reproducing(self) -> bool:
        return self._reproducing

    @property
    def size(self) -> int:
        return int(self._matrix.shape[0])

    def sample(self, grid: Grid) -> np.ndarray:
        if grid.n != self.size:
            raise KernelInvariantError(
                f"shape: table {self._name} has {self.size} rows, grid has "
                f"n={grid.n}"
            )
        if (grid.lo, grid.hi) != self._domain:
            raise KernelInvariantError(
                f"shape: table {self._name} was sampled on {self._domain}, "
                f"grid spans ({grid.lo}, {grid.hi})"
            )
        return self._matrix.copy()
