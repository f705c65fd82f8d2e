"""The unital box-power algebra ``A_K``.

Elements are :class:`~boxkernel.core.models.BoxPolynomial` coefficient
lists; ``realize`` turns them into symbols on a grid.  The identity
``K^(box 0)`` is the delta surrogate ``diag(1 / w)``, the only matrix the
discrete box product leaves every symbol unchanged under.
"""

import logging

import numpy as np

from boxkernel.core.exceptions import AlgebraError
from boxkernel.core.models import (
    BoxPolynomial,
    Grid,
    GridKernel,
    KernelTag,
    SpectralDecomposition,
)
from boxkernel.ops.kernel import box_product

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Coefficient arithmetic
# ---------------------------------------------------------------------------


def _padded(p: BoxPolynomial, size: int) -> np.ndarray:
    out = np.zeros(size, dtype=complex)
    out[: len(p.coeffs)] = p.coeffs
    return out


def poly_linear(
    p: BoxPolynomial,
    q: BoxPolynomial,
    alpha: complex = 1.0,
    beta: complex = 1.0,
) -> BoxPolynomial:
    """Return ``alpha p + beta q``."""
    size = max(len(p.coeffs), len(q.coeffs))
    return BoxPolynomial(
        tuple(alpha * _padded(p, size) + beta * _padded(q, size))
    )


def poly_mul(p: BoxPolynomial, q: BoxPolynomial) -> BoxPolynomial:
    """Return ``p . q``, the convolution of the coefficient lists."""
    if p.is_zero or q.is_zero:
        return BoxPolynomial()
    return BoxPolynomial(
        tuple(np.convolve(np.array(p.coeffs), np.array(q.coeffs)))
    )


def identity() -> BoxPolynomial:
    return BoxPolynomial.of(1)


# ---------------------------------------------------------------------------
# Realization on a grid
# ---------------------------------------------------------------------------


def delta(grid: Grid) -> GridKernel:
    """The discrete delta ``diag(1 / w)``."""
    return GridKernel(grid, np.diag(1.0 / grid.weights), KernelTag.symbol)


def box_power(K: GridKernel, r: int) -> GridKernel:
    """Return the r-fold box product of ``K`` with itself.

    ``r = 0`` gives :func:`delta`; ``r = 1`` returns ``K`` unchanged.

    Raises:
        AlgebraError: If ``r`` is negative or not an integer.
    """
    if isinstance(r, bool) or int(r) != r or r < 0:
        raise AlgebraError(f"box power must be a nonnegative integer, got {r}")
    if r == 0:
        return delta(K.grid)
    if r == 1:
        return K
    result = K
    for _ in range(int(r) - 1):
        result = box_product(result, K)
    return result


def realize(p: BoxPolynomial, K: GridKernel) -> GridKernel:
    """Return ``sum_r a_r K^(box r)`` as a symbol.

    The sum is accumulated by Horner's rule in the box product, so a
    degree-R polynomial costs R matrix products.
    """
    grid = K.grid
    if p.is_zero:
        return GridKernel(grid, np.zeros((grid.n, grid.n)), KernelTag.symbol)
    *rest, lead = p.coeffs
    # Horner: acc <- acc box K + a_r delta, starting from a_R delta.
    identity_matrix = np.diag(1.0 / grid.weights)
    acc = lead * identity_matrix
    for a in reversed(rest):
        acc = (acc * grid.weights[None, :]) @ K.matrix + a * identity_matrix
    return GridKernel(grid, acc, KernelTag.symbol)


def diagonal_symbol(
    dec: SpectralDecomposition, values: np.ndarray
) -> GridKernel:
    """Return ``sum_i values_i theta_i theta_i^H`` over the modes of ``dec``.

    Symbols built this way share the eigenbasis of ``dec`` and compose by
    multiplying their values.

    Raises:
        AlgebraError: If ``values`` does not have one entry per mode.
    """
    values = np.asarray(values, dtype=complex)
    if values.shape != (dec.m,):
        raise AlgebraError(
            f"expected {dec.m} diagonal values, got shape {values.shape}"
        )
    phi = dec.modes
    return GridKernel(dec.grid, (phi * values) @ phi.conj().T, KernelTag.symbol)


def spectral_transfer(
    p: BoxPolynomial, dec: SpectralDecomposition
) -> GridKernel:
    """Return ``sum_i p(sigma_i) theta_i theta_i^H``.

    A nonzero constant term needs every mode: over a complete basis
    ``sum_i theta_i theta_i^H`` is the delta surrogate, over a truncated one
    it is not.

    Raises:
        AlgebraError: If ``p`` has a nonzero constant term and ``dec`` is
            truncated.
    """
    if p.constant != 0 and not dec.is_full:
        raise AlgebraError(
            f"constant term {p.constant} needs a full decomposition, got "
            f"{dec.m} of {dec.grid.n} modes"
        )
    logger.debug("spectral transfer degree=%d m=%d", p.degree, dec.m)
    return diagonal_symbol(dec, p(dec.eigenvalues))
