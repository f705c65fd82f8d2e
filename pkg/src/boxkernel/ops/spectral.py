"""Nyström eigendecomposition of discretized integral operators.

The operator ``T_K f = int K(u, v) f(v) dv`` on a midpoint grid becomes
``K D`` with ``D = diag(w)``.  It is similar to the Hermitian matrix
``D^1/2 K D^1/2``, whose orthonormal eigenvectors rescaled by
``D^-1/2`` are eigenfunction samples orthonormal in the quadrature inner
product.
"""

import logging

import numpy as np
from scipy import linalg

from boxkernel.core.exceptions import GridError, KernelInvariantError, SpectralError
from boxkernel.core.models import (
    HERMITIAN_TOL,
    Grid,
    GridKernel,
    KernelTag,
    Signal,
    SpectralDecomposition,
    SpectrumKind,
    hermitian_defect,
)

logger = logging.getLogger(__name__)

CLAMP_TOL = 1e-10
"""Relative size of negative eigenvalues clamped to zero for kernel kind."""

SIGN_TOL = 1e-8
"""Magnitude of the first component fixed real-positive in each mode."""


def _weighted(K: GridKernel) -> np.ndarray:
    M = K.matrix
    H = (M + M.conj().T) / 2
    if not np.any(H.imag):
        H = H.real
    sqrt_w = np.sqrt(K.grid.weights)
    return sqrt_w[:, None] * H * sqrt_w[None, :]


def _fix_signs(modes: np.ndarray) -> np.ndarray:
    for i in range(modes.shape[1]):
        big = np.flatnonzero(np.abs(modes[:, i]) > SIGN_TOL)
        if big.size:
            z = modes[big[0], i]
            modes[:, i] *= np.conj(z) / abs(z)
    return modes


def _resolve_m(m: int | str, n: int) -> int:
    if m == "all":
        return n
    if isinstance(m, bool) or not isinstance(m, (int, np.integer)):
        raise SpectralError(f"m must be a positive integer or 'all', got {m!r}")
    if not 1 <= m <= n:
        raise SpectralError(f"requested m={m} modes but the grid has n={n}")
    return int(m)


def decompose(
    K: GridKernel,
    m: int | str = "all",
    kind: SpectrumKind | str | None = None,
) -> SpectralDecomposition:
    """Eigendecompose the integral operator of a Hermitian ``K``.

    Args:
        K: A Hermitian kernel or symmetric graphon.
        m: Number of modes to keep, or ``"all"``.
        kind: Ordering convention.  Defaults to ``graphon`` for graphon-tagged
            input and ``kernel`` otherwise.

    Returns:
        The top-``m`` eigenpairs.  Kernel kind is sorted descending with
        negatives down to ``-1e-10`` (relative) clamped to zero; graphon kind
        is sorted by descending magnitude.

    Raises:
        KernelInvariantError: If ``K`` is not Hermitian.
        SpectralError: If ``m`` exceeds the grid, or a kernel-kind spectrum
            has eigenvalues below the clamp tolerance.
    """
    defect = hermitian_defect(K.matrix)
    if defect > HERMITIAN_TOL:
        raise KernelInvariantError(
            f"hermitian: cannot decompose, max |K - K^H| = {defect:.3g}"
        )
    n = K.grid.n
    m = _resolve_m(m, n)
    if kind is None:
        kind = (
            SpectrumKind.graphon
            if K.tag is KernelTag.graphon
            else SpectrumKind.kernel
        )
    kind = SpectrumKind(kind)

    values, vectors = linalg.eigh(_weighted(K))
    if kind is SpectrumKind.kernel:
        order = np.arange(n)[::-1]
        values = values[order]
        floor = -CLAMP_TOL * max(1.0, float(values[0]))
        if values[-1] < floor:
            raise SpectralError(
                f"kernel spectrum has eigenvalue {values[-1]:.3g} below "
                f"{floor:.3g}; the kernel is not positive semidefinite"
            )
        values = np.where(values < 0, 0.0, values)
    else:
        order = np.argsort(-np.abs(values), kind="stable")
        values = values[order]
    vectors = vectors[:, order[:m]]
    modes = _fix_signs(vectors / np.sqrt(K.grid.weights)[:, None])
    logger.debug(
        "decomposed n=%d kind=%s m=%d leading=%.6g",
        n,
        kind.value,
        m,
        values[0],
    )
    return SpectralDecomposition(K.grid, values[:m], modes, kind)


# ---------------------------------------------------------------------------
# Closed-form spectra
# ---------------------------------------------------------------------------


def _min_pair(i, u):
    return 1.0 / ((i - 0.5) ** 2 * np.pi**2), np.sqrt(2) * np.sin(
        (i - 0.5) * np.pi * u
    )


def _bridge_pair(i, u):
    return 1.0 / (i**2 * np.pi**2), np.sqrt(2) * np.sin(i * np.pi * u)


def _one_minus_max_pair(i, u):
    return 1.0 / ((i - 0.5) ** 2 * np.pi**2), np.sqrt(2) * np.cos(
        (i - 0.5) * np.pi * u
    )


_CLOSED_FORMS = {
    "min": _min_pair,
    "min_bridge": _bridge_pair,
    "one_minus_max": _one_minus_max_pair,
}


def closed_form_pair(name: str, i: int, grid: Grid) -> tuple[float, Signal]:
    """Return the analytic i-th eigenpair (1-based) of a catalog graphon.

    Supported names are ``min``, ``min_bridge`` and ``one_minus_max``, all
    on ``[0, 1]``.

    Raises:
        GridError: If the grid is not on ``[0, 1]``.
        SpectralError: For an unknown name or ``i < 1``.
    """
    if name not in _CLOSED_FORMS:
        raise SpectralError(
            f"no closed-form spectrum for {name!r}; known: "
            f"{', '.join(sorted(_CLOSED_FORMS))}"
        )
    if (grid.lo, grid.hi) != (0.0, 1.0):
        raise GridError(
            f"closed-form spectra live on [0, 1], grid spans "
            f"[{grid.lo}, {grid.hi}]"
        )
    if int(i) != i or i < 1:
        raise SpectralError(f"mode number must be >= 1, got {i}")
    value, samples = _CLOSED_FORMS[name](int(i), grid.nodes)
    return float(value), Signal(grid, samples)


def min_graphon_oracle(i: int, grid: Grid) -> tuple[float, Signal]:
    """Closed-form eigenpair of ``min(u, v)``: ``1/((i-1/2)^2 pi^2)``."""
    return closed_form_pair("min", i, grid)


# ---------------------------------------------------------------------------
# Reconstruction
# ---------------------------------------------------------------------------


def _outer_sum(dec: SpectralDecomposition, values: np.ndarray, r: int):
    phi = dec.modes[:, :r]
    return (phi * values[:r]) @ phi.conj().T


def mercer_reconstruct(dec: SpectralDecomposition, r: int) -> GridKernel:
    """Return ``sum_{i<=r} sigma_i theta_i theta_i^H``.

    Kernel-kind reconstructions are tagged kernel; graphon-kind ones are
    tagged symbol since truncation can leave ``[0, 1]``.

    Raises:
        SpectralError: If ``r`` is negative or exceeds ``dec.m``.
    """
    if not 0 <= r <= dec.m:
        raise SpectralError(
            f"cannot reconstruct with r={r} terms from {dec.m} modes"
        )
    M = _outer_sum(dec, dec.eigenvalues, r)
    if dec.kind is SpectrumKind.kernel:
        return GridKernel(dec.grid, (M + M.conj().T) / 2, KernelTag.kernel)
    return GridKernel(dec.grid, M, KernelTag.symbol)


def sqrt_symbol(dec: SpectralDecomposition) -> GridKernel:
    """Return the symbol ``S = sum sqrt(sigma_i) theta_i theta_i^H``.

    ``S box S`` reproduces the Mercer reconstruction of ``dec``.

    Raises:
        SpectralError: If any eigenvalue is below ``-1e-10`` (relative).
    """
    sigma = dec.eigenvalues
    floor = -CLAMP_TOL * max(1.0, float(np.max(np.abs(sigma), initial=0.0)))
    if np.any(sigma < floor):
        raise SpectralError(
            f"square root needs a nonnegative spectrum, min eigenvalue "
            f"{sigma.min():.3g}"
        )
    M = _outer_sum(dec, np.sqrt(np.clip(sigma, 0.0, None)), dec.m)
    return GridKernel(dec.grid, (M + M.conj().T) / 2, KernelTag.kernel)


# ---------------------------------------------------------------------------
# Coefficients and eigenspace comparison
# ---------------------------------------------------------------------------


def project(dec: SpectralDecomposition, f: Signal) -> np.ndarray:
    """Return ``<f, theta_i>`` for every retained mode."""
    if f.grid != dec.grid:
        raise GridError(f"grid mismatch: {f.grid} vs {dec.grid}")
    return dec.modes.conj().T @ (dec.grid.weights * f.values)


def synthesize(dec: SpectralDecomposition, coeffs: np.ndarray) -> Signal:
    """Return ``sum_i c_i theta_i``."""
    return Signal(dec.grid, dec.modes @ np.asarray(coeffs, dtype=complex))


def eigenvalue_clusters(
    values: np.ndarray, gap: float = 1e-8
) -> list[np.ndarray]:
    """Group consecutive indices whose values differ by at most ``gap``."""
    clusters = [[0]] if len(values) else []
    for i in range(1, len(values)):
        if abs(values[i] - values[i - 1]) <= gap:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    return [np.array(c) for c in clusters]


def eigenspace_angles(
    a: SpectralDecomposition,
    b: SpectralDecomposition,
    count: int | None = None,
    gap: float = 1e-8,
) -> np.ndarray:
    """Largest principal angle between matched eigenspaces, per mode.

    Modes ``0 .. count-1`` of both decompositions are grouped into clusters
    of nearly equal eigenvalues of ``b``; each cluster is compared as a
    subspace, so sign and rotation freedom inside degenerate eigenspaces
    does not count as a mismatch.

    Returns:
        An array of length ``count`` holding, for each mode, the largest
        principal angle (radians) of its cluster.
    """
    if a.grid != b.grid:
        raise GridError(f"grid mismatch: {a.grid} vs {b.grid}")
    count = min(a.m, b.m) if count is None else count
    if count > min(a.m, b.m):
        raise SpectralError(
            f"cannot compare {count} modes of decompositions with "
            f"{a.m} and {b.m} modes"
        )
    sqrt_w = np.sqrt(a.grid.weights)[:, None]
    angles = np.zeros(count)
    for idx in eigenvalue_clusters(b.eigenvalues[:count], gap):
        theta = linalg.subspace_angles(
            sqrt_w * a.modes[:, idx], sqrt_w * b.modes[:, idx]
        )
        angles[idx] = float(np.max(theta))
    return angles
