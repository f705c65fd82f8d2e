"""Graphon and digraphon constructions.

A symmetric graphon ``W`` induces the reproducing kernels ``W^(box 2n)``
whose spectra are ``lambda_i^(2n)``; an asymmetric one (a digraphon)
induces ``W box W*``.  The graphon Fourier transform is the expansion in
the eigenfunctions of ``T_W``.
"""

import logging

import numpy as np

from boxkernel.core.exceptions import (
    AlgebraError,
    DigraphonError,
    KernelInvariantError,
    NumericalInvariantError,
    SpectralError,
)
from boxkernel.core.models import (
    HERMITIAN_TOL,
    DigraphonCheck,
    FourierCoefficients,
    GridKernel,
    KernelTag,
    Signal,
    SpectralDecomposition,
    SpectrumKind,
    SquareRelationReport,
    hermitian_defect,
)
from boxkernel.ops.boxalg import box_power
from boxkernel.ops.grid import check_index
from boxkernel.ops.kernel import adjoint, box_product, validate_psd
from boxkernel.ops.spectral import (
    decompose,
    eigenspace_angles,
    project,
    synthesize,
)

logger = logging.getLogger(__name__)

TRIVIAL_TOL = 1e-12
"""Largest entry below which a digraphon kernel counts as zero."""


def _require_graphon(W: GridKernel) -> None:
    if W.tag is not KernelTag.graphon:
        raise KernelInvariantError(
            f"graphon-tag: expected a graphon, got {W.tag.value}"
        )


def _rng(rng: np.random.Generator | None, seed: int) -> np.random.Generator:
    return rng if rng is not None else np.random.default_rng(seed)


def induced_graphon_kernel(W: GridKernel, n: int = 1) -> GridKernel:
    """Return the kernel ``K = W^(box 2n)`` with ``T_K = T_W^(2n)``.

    Raises:
        KernelInvariantError: If ``W`` is not a symmetric graphon.
        AlgebraError: If ``n < 1``.
        NumericalInvariantError: If the result fails the PSD check.
    """
    _require_graphon(W)
    defect = hermitian_defect(W.matrix)
    if defect > HERMITIAN_TOL:
        raise KernelInvariantError(
            f"symmetric: graphon is asymmetric (max |W - W^T| = {defect:.3g}); "
            "use digraphon_kernel"
        )
    if int(n) != n or n < 1:
        raise AlgebraError(f"induced kernel order must be >= 1, got {n}")
    M = box_power(W, 2 * int(n)).matrix
    K = GridKernel(W.grid, (M + M.conj().T) / 2, KernelTag.kernel)
    report = validate_psd(K)
    if not report.passed:
        raise NumericalInvariantError(
            f"psd: induced kernel W^(box {2 * n}) has min eigenvalue "
            f"{report.min_eigenvalue:.3g}"
        )
    return K


def gft(f: Signal, dec: SpectralDecomposition) -> FourierCoefficients:
    """Return ``f_hat_i = <f, phi_i>`` for every mode of ``dec``."""
    return FourierCoefficients(dec, project(dec, f))


def igft(coeffs: FourierCoefficients) -> Signal:
    """Return ``sum_i f_hat_i phi_i``."""
    return synthesize(coeffs.dec, coeffs.values)


def kv_fourier(dec_W: SpectralDecomposition, v_index: int) -> FourierCoefficients:
    """Fourier coefficients of the section ``k_v`` of ``K = W box W``.

    Entry ``i`` is ``lambda_i^2 conj(phi_i(v))``, which is ``lambda_i^2
    phi_i(v)`` for real eigenfunctions.

    Raises:
        SpectralError: If ``dec_W`` is not a graphon-kind decomposition.
    """
    if dec_W.kind is not SpectrumKind.graphon:
        raise SpectralError("kv_fourier needs a graphon-kind decomposition")
    v = check_index(dec_W.grid, v_index)
    lam = dec_W.eigenvalues
    return FourierCoefficients(dec_W, lam**2 * np.conj(dec_W.modes[v, :]))


def digraphon_kernel(
    W: GridKernel,
    rng: np.random.Generator | None = None,
    seed: int = 0,
    trials: int = 5,
    tol: float = 1e-10,
) -> tuple[GridKernel, DigraphonCheck]:
    """Return ``K = W box W*`` and a check of ``T_K = T_W T_W*``.

    ``W`` need not be symmetric.  The check applies both sides to
    ``trials`` random signals drawn from ``rng`` (or a generator seeded with
    ``seed``) and confirms that ``K`` is positive semidefinite.

    Raises:
        DigraphonError: If ``K`` is numerically zero.
    """
    _require_graphon(W)
    M = box_product(W, adjoint(W)).matrix
    scale = float(np.max(np.abs(M)))
    if scale < TRIVIAL_TOL:
        raise DigraphonError(
            f"nontrivial: induced kernel has max entry {scale:.3g}"
        )
    K = GridKernel(W.grid, (M + M.conj().T) / 2, KernelTag.kernel)

    w = W.grid.weights[:, None]
    F = _rng(rng, seed).standard_normal((W.grid.n, trials))
    lhs = W.matrix @ (w * (W.matrix.conj().T @ (w * F)))
    rhs = K.matrix @ (w * F)
    deviation = float(np.max(np.abs(lhs - rhs)))
    psd = validate_psd(K)
    passed = deviation <= tol and psd.passed
    logger.debug(
        "digraphon n=%d deviation=%.3g psd=%s", W.grid.n, deviation, psd.passed
    )
    return K, DigraphonCheck(max_deviation=deviation, psd=psd, passed=passed)


def square_relation_report(
    W: GridKernel,
    modes: int = 10,
    rng: np.random.Generator | None = None,
    seed: int = 0,
    trials: int = 20,
) -> SquareRelationReport:
    """Check the chain between a symmetric graphon and ``W box W``.

    Compares the top ``modes`` eigenvalues (``sigma_i = lambda_i^2``), the
    matched eigenspaces by principal angles, and ``T_(W box W) f`` against
    ``T_W^2 f`` on ``trials`` random signals.
    """
    K = induced_graphon_kernel(W, 1)
    dec_W = decompose(W)
    dec_K = decompose(K)
    if modes > W.grid.n:
        raise SpectralError(
            f"cannot compare {modes} modes on a grid with n={W.grid.n}"
        )
    lambdas = dec_W.eigenvalues[:modes]
    sigmas = dec_K.eigenvalues[:modes]
    sq = lambdas**2
    rel = np.abs(sigmas - sq) / np.where(sq > 0, sq, 1.0)
    angles = eigenspace_angles(dec_W, dec_K, modes)

    w = W.grid.weights[:, None]
    F = _rng(rng, seed).standard_normal((W.grid.n, trials))
    via_kernel = K.matrix @ (w * F)
    via_square = W.matrix @ (w * (W.matrix @ (w * F)))
    deviation = float(np.max(np.abs(via_kernel - via_square)))
    return SquareRelationReport(
        lambdas=lambdas,
        sigmas=sigmas,
        max_relative_error=float(np.max(rel, initial=0.0)),
        max_angle=float(np.max(angles, initial=0.0)),
        operator_deviation=deviation,
    )
