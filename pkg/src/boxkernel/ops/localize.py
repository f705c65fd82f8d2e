"""Spatial and spectral localization of RKHS signals.

An RKHS-finite signal ``f = sum_t a_t k_t`` has Fourier coefficients
``f_hat_i = sigma_i sum_t a_t conj(theta_i(t))`` in the eigenbasis of its
kernel, so it cannot be bandlimited unless the spectrum vanishes.  This
module measures that tradeoff and designs coefficients against it.
"""

import logging
from collections.abc import Sequence

import numpy as np
from scipy import linalg

from boxkernel.core.exceptions import DesignError, GridError, SpectralError
from boxkernel.core.models import (
    BandlimitReport,
    BandReport,
    DesignResult,
    RkhsFiniteSignal,
    Signal,
    SpectralDecomposition,
    SpectralResponse,
)
from boxkernel.ops.grid import check_index, l2_norm
from boxkernel.ops.spectral import project

logger = logging.getLogger(__name__)

RESPONSE_GUARD = 1e-8
"""Eigenfunction magnitude at v below which the response is undefined."""


def bandlimit_check(
    f: Signal, dec: SpectralDecomposition, B: int, tol: float = 1e-3
) -> BandlimitReport:
    """Test whether ``|f_hat_i| <= tol ||f||`` for every mode ``i > B``.

    Raises:
        SpectralError: If ``B`` is negative or exceeds ``dec.m``.
    """
    if not 0 <= B <= dec.m:
        raise SpectralError(f"band limit B={B} outside [0, {dec.m}]")
    coeffs = np.abs(project(dec, f))
    out = float(np.max(coeffs[B:], initial=0.0))
    norm = l2_norm(f)
    return BandlimitReport(passed=out <= tol * norm, max_out_of_band=out, norm=norm)


def _section_rows(
    dec: SpectralDecomposition, centers: Sequence[int]
) -> np.ndarray:
    """Matrix with entry ``(i, t) = sigma_i conj(theta_i(t))``."""
    idx = [check_index(dec.grid, c) for c in centers]
    return dec.eigenvalues[:, None] * np.conj(dec.modes[idx, :]).T


def fourier_closed_form(
    fs: RkhsFiniteSignal, dec: SpectralDecomposition
) -> np.ndarray:
    """``f_hat_i = sigma_i sum_t a_t conj(theta_i(t))`` for every mode."""
    if fs.kernel.grid != dec.grid:
        raise GridError(f"grid mismatch: {fs.kernel.grid} vs {dec.grid}")
    if not fs.centers:
        return np.zeros(dec.m, dtype=complex)
    return _section_rows(dec, fs.centers) @ np.array(fs.coeffs)


def uncertainty_residuals(
    fs: RkhsFiniteSignal, dec: SpectralDecomposition, B: int
) -> BandReport:
    """Bin the closed-form Fourier energy of ``fs`` into three bands.

    The bands are modes ``[1, B]``, ``[B+1, |T|]`` and ``[|T|+1, m]``
    (1-based), where ``|T|`` is the number of centers.
    """
    if not 0 <= B <= dec.m:
        raise SpectralError(f"band limit B={B} outside [0, {dec.m}]")
    fhat = fourier_closed_form(fs, dec)
    energy = np.abs(fhat) ** 2
    size = len(fs.centers)
    mid_end = max(B, size)
    return BandReport(
        B=B,
        size=size,
        coefficients=fhat,
        low_energy=float(energy[:B].sum()),
        mid_energy=float(energy[B:mid_end].sum()),
        tail_energy=float(energy[mid_end:].sum()),
    )


def design_coeffs(
    centers: Sequence[int],
    dec: SpectralDecomposition,
    B: int,
    targets: Sequence[complex],
    band_end: int | None = None,
) -> DesignResult:
    """Choose expansion coefficients with prescribed low-band response.

    Solves ``min sum_{B < i <= band_end} |f_hat_i|^2`` subject to
    ``f_hat_i = targets_i`` for ``i <= B`` through the KKT system of the
    equality-constrained least-squares problem.  ``band_end`` defaults to
    the number of centers; the tail beyond it is reported but not
    optimized.

    Raises:
        DesignError: If the constraint matrix has rank below ``B``; the
            error carries the rank found.
        SpectralError: If ``B`` or ``band_end`` are out of range.
    """
    centers = list(centers)
    targets = np.asarray(targets, dtype=complex)
    size = len(centers)
    if not 1 <= B <= size:
        raise SpectralError(f"design needs 1 <= B <= |T|={size}, got B={B}")
    if targets.shape != (B,):
        raise DesignError(f"expected {B} targets, got shape {targets.shape}")
    band_end = min(size, dec.m) if band_end is None else band_end
    if not B <= band_end <= dec.m:
        raise SpectralError(
            f"band_end={band_end} outside [B={B}, m={dec.m}]"
        )
    S = _section_rows(dec, centers)
    C, M = S[:B], S[B:band_end]
    rank = int(np.linalg.matrix_rank(C))
    if rank < B:
        raise DesignError(
            f"constraint matrix has rank {rank} < B={B}", rank=rank
        )

    kkt = np.zeros((size + B, size + B), dtype=complex)
    kkt[:size, :size] = 2 * M.conj().T @ M
    kkt[:size, size:] = C.conj().T
    kkt[size:, :size] = C
    rhs = np.concatenate([np.zeros(size, dtype=complex), targets])
    solution, *_ = linalg.lstsq(kkt, rhs)
    coeffs = solution[:size]

    fhat = S @ coeffs
    mid = float(np.sum(np.abs(fhat[B:band_end]) ** 2))
    tail = float(np.sum(np.abs(fhat[band_end:]) ** 2))
    logger.debug(
        "designed %d coefficients B=%d band_end=%d mid=%.3g",
        size,
        B,
        band_end,
        mid,
    )
    return DesignResult(coeffs=coeffs, mid_energy=mid, tail_energy=tail, rank=rank)


def spectral_response(
    alpha: Sequence[complex],
    centers: Sequence[int],
    dec: SpectralDecomposition,
    v_index: int,
) -> SpectralResponse:
    """Read the filter response off the expansion of a section ``q_v``.

    ``p(sigma_i) = sum_l alpha_l conj(theta_i(l)) / conj(theta_i(v))``.
    Modes with ``|theta_i(v)| <= 1e-8`` are marked invalid and carry NaN.
    """
    v = check_index(dec.grid, v_index)
    alpha = np.asarray(alpha, dtype=complex)
    idx = [check_index(dec.grid, c) for c in centers]
    if alpha.size != len(idx):
        raise SpectralError(
            f"{alpha.size} coefficients but {len(idx)} centers"
        )
    numer = np.conj(dec.modes[idx, :]).T @ alpha
    denom = np.conj(dec.modes[v, :])
    valid = np.abs(denom) > RESPONSE_GUARD
    values = np.full(dec.m, np.nan + 0j)
    values[valid] = numer[valid] / denom[valid]
    return SpectralResponse(values=values, valid=valid)
