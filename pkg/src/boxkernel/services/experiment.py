"""Shared setup of a run: grid, kernel source, kernels and generator."""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any

import numpy as np

from boxkernel.config import RunConfig
from boxkernel.core.interfaces import KernelSource
from boxkernel.core.models import Grid, GridKernel, KernelTag, SpectralDecomposition
from boxkernel.ops import graphon, kernel, spectral
from boxkernel.ops.grid import make_grid, nearest_index
from boxkernel.sources.catalog import get_entry
from boxkernel.sources.table import TableKernel

logger = logging.getLogger(__name__)


@dataclass
class Output:
    """One CSV file produced by a service."""

    name: str
    rows: list[dict]
    fields: list[str]


@dataclass
class ServiceResult:
    """Files, headline numbers and failed checks of one service run."""

    outputs: list[Output] = field(default_factory=list)
    summary: dict[str, Any] = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


class Experiment:
    """Resolved objects of a :class:`RunConfig`.

    ``primary`` is the configured function under its role; ``kernel`` is
    the reproducing kernel it induces (itself for the kernel role,
    ``W box W*`` for graphons, ``S box S*`` for symbols).

    Args:
        config: A validated run configuration.
        source: Optional kernel source overriding ``config.kernel``.
    """

    def __init__(self, config: RunConfig, source: KernelSource | None = None):
        self.config = config
        self.grid: Grid = make_grid(config.grid.lo, config.grid.hi, config.grid.n)
        self.source = source or self._source_from_config()
        self.rng = np.random.default_rng(config.seed)

    def _source_from_config(self) -> KernelSource:
        k = self.config.kernel
        if k.table is not None:
            return TableKernel.from_csv(
                k.table, domain=(self.grid.lo, self.grid.hi)
            )
        return get_entry(k.name, k.params)

    @cached_property
    def primary(self) -> GridKernel:
        return kernel.sample(self.source, self.grid, KernelTag(self.config.role))

    @cached_property
    def kernel(self) -> GridKernel:
        W = self.primary
        if W.tag is KernelTag.kernel:
            return W
        if W.tag is KernelTag.graphon:
            if W.is_hermitian:
                return graphon.induced_graphon_kernel(W, 1)
            K, _ = graphon.digraphon_kernel(W, seed=self.config.seed)
            return K
        return kernel.induced_kernel(W)

    @cached_property
    def primary_decomposition(self) -> SpectralDecomposition:
        """Spectrum of ``primary`` when Hermitian, else of ``kernel``."""
        target = self.primary if self.primary.is_hermitian else self.kernel
        return spectral.decompose(target)

    @cached_property
    def kernel_decomposition(self) -> SpectralDecomposition:
        return spectral.decompose(self.kernel)

    def node(self, position: float) -> int:
        """Grid index nearest to a configured position."""
        return nearest_index(self.grid, float(position))

    def nodes(self, positions) -> list[int]:
        return [self.node(p) for p in positions]
