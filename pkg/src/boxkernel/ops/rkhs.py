"""Inner products, kernel sections and expansions in H(K)."""

from collections.abc import Sequence

import numpy as np

from boxkernel.core.exceptions import ExpansionError
from boxkernel.core.models import GridKernel, MembershipReport, RkhsContext, Signal
from boxkernel.ops.grid import check_index, l2_norm
from boxkernel.ops.spectral import project


def effective_coefficients(ctx: RkhsContext, f: Signal) -> np.ndarray:
    """``<f, theta_i>`` restricted to the effective modes of ``ctx``."""
    return project(ctx.dec, f)[ctx.mask]


def effective_sigma(ctx: RkhsContext) -> np.ndarray:
    return ctx.dec.eigenvalues[ctx.mask]


def h_inner(ctx: RkhsContext, f: Signal, g: Signal) -> complex:
    """Return ``sum_i <f, theta_i> conj(<g, theta_i>) / sigma_i``.

    The sum runs over the effective modes only, so components along
    numerically null modes are dropped rather than amplified.
    """
    cf = effective_coefficients(ctx, f)
    cg = effective_coefficients(ctx, g)
    return complex(np.sum(cf * np.conj(cg) / effective_sigma(ctx)))


def h_norm(ctx: RkhsContext, f: Signal) -> float:
    return float(np.sqrt(max(h_inner(ctx, f, f).real, 0.0)))


def kernel_section(K: GridKernel, v_index: int) -> Signal:
    """Return ``k_v(u) = K(u, v)``, column ``v`` of the kernel matrix."""
    v = check_index(K.grid, v_index)
    return Signal(K.grid, K.matrix[:, v])


def expand(
    centers: Sequence[int], coeffs: Sequence[complex], K: GridKernel
) -> Signal:
    """Return ``sum_t a_t k_t``.  Repeated centers are allowed.

    Raises:
        ExpansionError: If the lists differ in length.
        GridError: If a center is not a valid grid index.
    """
    centers = list(centers)
    coeffs = np.asarray(coeffs, dtype=complex)
    if len(centers) != coeffs.size:
        raise ExpansionError(
            f"{len(centers)} centers but {coeffs.size} coefficients"
        )
    idx = [check_index(K.grid, c) for c in centers]
    if not idx:
        return Signal.zeros(K.grid)
    return Signal(K.grid, K.matrix[:, idx] @ coeffs)


def membership_score(ctx: RkhsContext, f: Signal) -> MembershipReport:
    """Estimate ``||f||_H^2`` and the L2 energy outside the effective span.

    A small residual together with a finite score indicates that ``f``
    lies in H(K) as far as the grid can tell.
    """
    c = effective_coefficients(ctx, f)
    score = float(np.sum(np.abs(c) ** 2 / effective_sigma(ctx)))
    inside = ctx.dec.modes[:, ctx.mask] @ c
    residual = l2_norm(Signal(ctx.grid, f.values - inside)) ** 2
    return MembershipReport(
        score=score, residual=residual, effective_rank=ctx.effective_rank
    )


def span_residual(ctx: RkhsContext, f: Signal) -> float:
    """Relative L2 norm of the part of ``f`` outside the effective span."""
    norm = l2_norm(f)
    if norm == 0:
        return 0.0
    return float(np.sqrt(membership_score(ctx, f).residual)) / norm
