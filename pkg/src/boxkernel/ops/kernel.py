"""Symbols, graphons and reproducing kernels on a grid.

The box product of two symbols is the discretized composition
``(A box B)(u, v) = int A(u, z) B(z, v) dz``, realized as
``A diag(w) B``.  Everything here is a pure function of immutable
:class:`~boxkernel.core.models.GridKernel` values.
"""

import logging

import numpy as np
from scipy import linalg

from boxkernel.core.exceptions import GridError, KernelInvariantError
from boxkernel.core.interfaces import KernelSource
from boxkernel.core.models import (
    GRAPHON_SLACK,
    HERMITIAN_TOL,
    Grid,
    GridKernel,
    KernelTag,
    PsdReport,
    hermitian_defect,
)

logger = logging.getLogger(__name__)


def sample(
    source: KernelSource, grid: Grid, tag: KernelTag | str = KernelTag.symbol
) -> GridKernel:
    """Realize ``source`` on ``grid x grid`` and validate it under ``tag``.

    Raises:
        KernelInvariantError: If the sampled matrix violates the tag.
    """
    matrix = source.sample(grid)
    logger.debug("sampled %s on n=%d as %s", source.name, grid.n, tag)
    return GridKernel(grid, matrix, KernelTag(tag))


def retag(K: GridKernel, tag: KernelTag | str) -> GridKernel:
    """Return ``K`` under a new tag, re-validating the tag invariant."""
    return GridKernel(K.grid, K.matrix, KernelTag(tag))


def hermitian_part(K: GridKernel) -> GridKernel:
    """Return ``(K + K^H) / 2`` tagged kernel."""
    M = K.matrix
    return GridKernel(K.grid, (M + M.conj().T) / 2, KernelTag.kernel)


def adjoint(S: GridKernel) -> GridKernel:
    """Return ``S*(u, v) = conj(S(v, u))`` tagged symbol."""
    return GridKernel(S.grid, S.matrix.conj().T, KernelTag.symbol)


def _check_same_grid(A: GridKernel, B: GridKernel) -> Grid:
    if A.grid != B.grid:
        raise GridError(f"grid mismatch: {A.grid} vs {B.grid}")
    return A.grid


def box_product(A: GridKernel, B: GridKernel) -> GridKernel:
    """Return ``A diag(w) B`` tagged symbol.

    Callers that know the result is a kernel re-tag it with :func:`retag`.
    """
    grid = _check_same_grid(A, B)
    return GridKernel(
        grid, A.matrix @ (grid.weights[:, None] * B.matrix), KernelTag.symbol
    )


def induced_kernel(S: GridKernel) -> GridKernel:
    """Return ``K = S box S*`` tagged kernel.

    The product is Hermitian up to rounding; the rounding is removed so the
    result is exactly Hermitian.
    """
    M = box_product(S, adjoint(S)).matrix
    return GridKernel(S.grid, (M + M.conj().T) / 2, KernelTag.kernel)


def validate_psd(K: GridKernel, tol: float = 1e-10) -> PsdReport:
    """Check that ``K`` is a positive-semidefinite kernel on its grid.

    Eigenvalues are those of ``D^1/2 H D^1/2`` with ``D = diag(w)`` and
    ``H`` the Hermitian part of ``K``.  A non-Hermitian matrix is reported
    as failing rather than raising.

    Args:
        K: The kernel to check.
        tol: Relative tolerance; the check passes iff
            ``min_eig >= -tol * max(1, max_eig)``.

    Returns:
        A :class:`PsdReport`.
    """
    M = K.matrix
    hermitian = hermitian_defect(M) <= HERMITIAN_TOL
    sqrt_w = np.sqrt(K.grid.weights)
    H = (M + M.conj().T) / 2
    eigs = linalg.eigvalsh(sqrt_w[:, None] * H * sqrt_w[None, :])
    lo, hi = float(eigs[0]), float(eigs[-1])
    passed = hermitian and lo >= -tol * max(1.0, hi)
    logger.debug(
        "psd check n=%d: eig range [%.3g, %.3g] hermitian=%s passed=%s",
        K.grid.n,
        lo,
        hi,
        hermitian,
        passed,
    )
    return PsdReport(
        min_eigenvalue=lo, max_eigenvalue=hi, hermitian=hermitian, passed=passed
    )


def kernel_to_graphon(K: GridKernel) -> GridKernel:
    """Normalize a real nonnegative kernel into a graphon ``W = K / max K``.

    The supremum is taken over the grid nodes, so the constant depends on
    the grid.

    Raises:
        KernelInvariantError: If ``K`` is not tagged kernel, has imaginary
            or negative entries, or is identically zero.
    """
    if K.tag is not KernelTag.kernel:
        raise KernelInvariantError(
            f"kernel-tag: graphon normalization needs a kernel, got {K.tag.value}"
        )
    M = K.matrix
    scale = max(1.0, float(np.max(np.abs(M))))
    if np.max(np.abs(M.imag)) > GRAPHON_SLACK * scale:
        raise KernelInvariantError("graphon-real: kernel has imaginary entries")
    real = M.real
    lo = float(real.min())
    if lo < -GRAPHON_SLACK * scale:
        raise KernelInvariantError(
            f"graphon-range: kernel has negative entries (min {lo:.6g})"
        )
    C = float(real.max())
    if C <= 0:
        raise KernelInvariantError("graphon-range: kernel is identically zero")
    W = np.clip(real / C, 0.0, 1.0)
    logger.debug("graphon normalization constant C=%.17g", C)
    return GridKernel(K.grid, W, KernelTag.graphon)
