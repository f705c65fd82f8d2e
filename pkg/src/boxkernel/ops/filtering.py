"""Polynomial filters ``p(T_K)`` in operator and point-wise form.

The operator form diffuses a signal through repeated applications of
``T_K``.  The point-wise form evaluates the filtered signal at each node
``v`` as ``conj(<q_v, f>_H)``, where ``q_v`` is a kernel-section-like
function of the RKHS; both agree on H(K).
"""

import logging
import warnings
from collections.abc import Sequence

import numpy as np

from boxkernel.core.exceptions import GridError, OutOfSpanWarning
from boxkernel.core.models import (
    FilterSpec,
    GridKernel,
    RkhsContext,
    Signal,
    SpectralDecomposition,
)
from boxkernel.ops.boxalg import realize
from boxkernel.ops.grid import check_index
from boxkernel.ops.kernel import box_product
from boxkernel.ops.rkhs import effective_coefficients, span_residual

logger = logging.getLogger(__name__)

SPAN_WARN_TOL = 1e-6
"""Relative energy outside the effective span that triggers a warning."""


def apply_operator(K: GridKernel, f: Signal) -> Signal:
    """Return ``T_K f``, i.e. ``K diag(w) f``."""
    if f.grid != K.grid:
        raise GridError(f"grid mismatch: {K.grid} vs {f.grid}")
    return Signal(K.grid, K.matrix @ (K.grid.weights * f.values))


def filter_operator(spec: FilterSpec, f: Signal) -> Signal:
    """Return ``p(T_K) f`` by Horner's rule."""
    if spec.poly.is_zero:
        return Signal.zeros(f.grid)
    *rest, lead = spec.poly.coeffs
    g = f * lead
    for a in reversed(rest):
        g = apply_operator(spec.kernel, g) + f * a
    return g


def _check_dec(spec: FilterSpec, dec: SpectralDecomposition) -> None:
    if dec.grid != spec.grid:
        raise GridError(f"grid mismatch: {spec.grid} vs {dec.grid}")


def q_section(
    spec: FilterSpec, dec: SpectralDecomposition, v_index: int
) -> Signal:
    """Return ``q_v = (p(K^box) box K)(., v)`` in spectral form.

    The constant coefficient is folded into ``r(t) = p(t) t``, so no delta
    term appears and truncated decompositions are fine.
    """
    _check_dec(spec, dec)
    v = check_index(dec.grid, v_index)
    gains = spec.poly.times_t()(dec.eigenvalues)
    return Signal(dec.grid, dec.modes @ (gains * np.conj(dec.modes[v, :])))


def q_expansion(spec: FilterSpec, v_index: int) -> np.ndarray:
    """Kernel-section coefficients of ``q_v`` over every grid node.

    ``q_v = sum_l alpha_l k_l`` with ``alpha_l = w_l p(K^box)(l, v)``.
    """
    v = check_index(spec.grid, v_index)
    P = realize(spec.poly, spec.kernel)
    return spec.grid.weights * P.matrix[:, v]


def _pointwise_operator(
    spec: FilterSpec, ctx: RkhsContext
) -> np.ndarray:
    """Matrix ``A`` with ``g = A c_f`` for the effective coefficients ``c_f``.

    Column ``v`` of ``Q`` is the section of the coefficient-conjugated
    polynomial; its effective coefficients are paired against ``f`` in the
    H(K) inner product and conjugated back.
    """
    dec = ctx.dec
    _check_dec(spec, dec)
    gains = spec.poly.conjugate().times_t()(dec.eigenvalues)
    Q = (dec.modes * gains) @ dec.modes.conj().T
    phi_e = dec.modes[:, ctx.mask]
    C_q = phi_e.conj().T @ (dec.grid.weights[:, None] * Q)
    sigma_e = dec.eigenvalues[ctx.mask]
    logger.debug(
        "point-wise filter assembled n=%d effective_rank=%d",
        dec.grid.n,
        ctx.effective_rank,
    )
    return np.conj(C_q.T / sigma_e[None, :])


def _pointwise_apply(
    A: np.ndarray, ctx: RkhsContext, f: Signal
) -> Signal:
    residual = span_residual(ctx, f)
    if residual > SPAN_WARN_TOL:
        warnings.warn(
            f"signal has relative energy {residual:.3g} outside the effective "
            "RKHS span; returning the filtered projection",
            OutOfSpanWarning,
            stacklevel=3,
        )
    return Signal(ctx.grid, A @ effective_coefficients(ctx, f))


def filter_pointwise(spec: FilterSpec, ctx: RkhsContext, f: Signal) -> Signal:
    """Return ``g(v) = conj(<q_v, f>_H)`` at every node.

    For signals in H(K) this equals :func:`filter_operator`.  Signals with
    more than ``1e-6`` relative energy outside the effective span trigger an
    :class:`OutOfSpanWarning`; the result is then the filtered projection.
    """
    if f.grid != ctx.grid:
        raise GridError(f"grid mismatch: {ctx.grid} vs {f.grid}")
    return _pointwise_apply(_pointwise_operator(spec, ctx), ctx, f)


def filter_pointwise_batch(
    spec: FilterSpec, ctx: RkhsContext, signals: Sequence[Signal]
) -> list[Signal]:
    """Point-wise filter many signals with one assembled section matrix."""
    for f in signals:
        if f.grid != ctx.grid:
            raise GridError(f"grid mismatch: {ctx.grid} vs {f.grid}")
    A = _pointwise_operator(spec, ctx)
    return [_pointwise_apply(A, ctx, f) for f in signals]


def bank_decompose(spec: FilterSpec, f: Signal) -> list[Signal]:
    """Split ``p(T_K) f`` into ``a_r T_(K^box r) f`` per degree ``r``.

    Term ``r`` lies in H(K^box (r+1)); the terms sum to the filter output.
    """
    K = spec.kernel
    terms: list[Signal] = []
    power: GridKernel | None = None
    for r, a in enumerate(spec.poly.coeffs):
        if r == 0:
            terms.append(f * a)
            continue
        power = K if power is None else box_product(power, K)
        terms.append(apply_operator(power, f) * a)
    return terms
