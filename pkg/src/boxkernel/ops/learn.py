"""Representer-theorem filter learning on an operator spectrum.

A filter is a function of the eigenvalues.  Given targets ``y_i`` at
abscissae ``sigma_i``, the minimizer of squared error plus ``reg ||p||_H^2``
over the RKHS of a design kernel is ``p*(u) = sum_i a_i K(u, sigma_i)``
with ``(G + reg q I) a = y``.
"""

import logging
import warnings
from collections.abc import Callable, Sequence

import numpy as np
from scipy import linalg

from boxkernel.core.exceptions import DuplicateAbscissaWarning, FitError
from boxkernel.core.interfaces import ClosedFormKernel
from boxkernel.core.models import FilterModel, Signal, SpectralDecomposition
from boxkernel.ops.spectral import project

logger = logging.getLogger(__name__)

DUPLICATE_TOL = 1e-12
MATCH_TOL = 1e-9


def _check_domain(kernel: ClosedFormKernel, points: np.ndarray) -> None:
    inside = kernel.contains(points)
    if not np.all(inside):
        lo, hi = kernel.domain
        raise FitError(
            f"points {points[~inside].tolist()} lie outside the design "
            f"kernel domain [{lo}, {hi}]"
        )


def gram(kernel: ClosedFormKernel, points: np.ndarray) -> np.ndarray:
    """Real Gram matrix ``G(i, j) = K(points_i, points_j)``."""
    points = np.asarray(points, dtype=float)
    G = np.asarray(kernel.evaluate(points[:, None], points[None, :]))
    return np.real(G).astype(float)


def fit_filter(
    sigmas: Sequence[float],
    targets: Sequence[float],
    design_kernel: ClosedFormKernel,
    reg: float = 0.0,
) -> FilterModel:
    """Fit ``p*`` to ``targets`` at the abscissae ``sigmas``.

    Args:
        sigmas: Distinct abscissae inside the design kernel's domain.
        targets: Desired filter values, one per abscissa.
        design_kernel: Reproducing kernel on a domain containing the
            abscissae.
        reg: Ridge weight; the system solved is ``(G + reg q I) a = y``.

    Raises:
        FitError: On length mismatch, abscissae outside the domain,
            duplicate abscissae, or a system that is not positive definite.
    """
    sigmas = np.asarray(sigmas, dtype=float)
    y = np.asarray(targets, dtype=float)
    if sigmas.ndim != 1 or sigmas.size < 1:
        raise FitError("fitting needs at least one abscissa")
    if y.shape != sigmas.shape:
        raise FitError(f"{sigmas.size} abscissae but {y.size} targets")
    if reg < 0:
        raise FitError(f"regularization must be >= 0, got {reg}")
    _check_domain(design_kernel, sigmas)
    gaps = np.diff(np.sort(sigmas))
    if np.any(gaps <= DUPLICATE_TOL):
        raise FitError(
            "abscissae must be distinct; collapse repeated eigenvalues first"
        )

    q = sigmas.size
    A = gram(design_kernel, sigmas) + reg * q * np.eye(q)
    try:
        coeffs = linalg.cho_solve(linalg.cho_factor(A), y)
    except linalg.LinAlgError as e:
        raise FitError(
            f"Gram system is not positive definite (q={q}, reg={reg}): {e}"
        ) from e
    logger.debug(
        "fitted %s filter q=%d reg=%g", design_kernel.name, q, reg
    )
    return FilterModel(
        abscissae=sigmas, coeffs=coeffs, design_kernel=design_kernel, reg=reg
    )


def eval_filter(model: FilterModel, u):
    """Return ``p*(u) = sum_i a_i K(u, sigma_i)``; ``u`` may be an array.

    Raises:
        FitError: If any ``u`` lies outside the design kernel's domain.
    """
    points = np.atleast_1d(np.asarray(u, dtype=float))
    _check_domain(model.design_kernel, points)
    K = np.real(
        model.design_kernel.evaluate(
            points[:, None], model.abscissae[None, :]
        )
    )
    values = K @ model.coeffs
    return float(values[0]) if np.ndim(u) == 0 else values


def normal_residual(model: FilterModel, targets: Sequence[float]) -> float:
    """``||(G + reg q I) a - y||`` of a fitted model."""
    G = gram(model.design_kernel, model.abscissae)
    A = G + model.reg * model.q * np.eye(model.q)
    return float(np.linalg.norm(A @ model.coeffs - np.asarray(targets)))


def h_norm_sq(model: FilterModel) -> float:
    """``||p*||_H^2 = a^T G a``."""
    G = gram(model.design_kernel, model.abscissae)
    return float(model.coeffs @ G @ model.coeffs)


def apply_learned(
    model: FilterModel,
    dec: SpectralDecomposition,
    f: Signal,
    response: Sequence[float] | None = None,
) -> Signal:
    """Return ``sum_i p*(sigma_i) <f, theta_i> theta_i``.

    Every abscissa of the model must be one of the eigenvalues of ``dec``
    (within ``1e-9``).  A caller-supplied ``response`` (one gain per mode)
    replaces the evaluation of the model.

    Raises:
        FitError: On an abscissa with no matching eigenvalue, or a response
            of the wrong length.
    """
    sigma = dec.eigenvalues
    if response is None:
        distance = np.min(
            np.abs(model.abscissae[:, None] - sigma[None, :]), axis=1
        )
        stray = model.abscissae[distance > MATCH_TOL]
        if stray.size:
            raise FitError(
                f"abscissae {stray.tolist()} match no eigenvalue of the "
                "decomposition"
            )
        gains = eval_filter(model, sigma)
    else:
        gains = np.asarray(response, dtype=float)
        if gains.shape != (dec.m,):
            raise FitError(
                f"response has shape {gains.shape}, decomposition has "
                f"{dec.m} modes"
            )
    return Signal(dec.grid, dec.modes @ (gains * project(dec, f)))


def gaussian_bump(center: float, gamma: float) -> Callable[[np.ndarray], np.ndarray]:
    """Return ``u -> exp(-(u - center)^2 / gamma)``."""
    if gamma <= 0:
        raise FitError(f"bump width gamma must be > 0, got {gamma}")

    def bump(u):
        return np.exp(-((np.asarray(u, dtype=float) - center) ** 2) / gamma)

    return bump


def collapse_abscissae(values: np.ndarray) -> np.ndarray:
    """Merge values closer than ``1e-12``, keeping the first of each run."""
    values = np.asarray(values, dtype=float)
    order = np.sort(values)[::-1]
    keep = [order[0]] if order.size else []
    for s in order[1:]:
        if abs(keep[-1] - s) > DUPLICATE_TOL:
            keep.append(s)
    merged = np.array(keep)
    if merged.size < values.size:
        warnings.warn(
            f"merged {values.size - merged.size} repeated eigenvalues into "
            "shared abscissae",
            DuplicateAbscissaWarning,
            stacklevel=3,
        )
    return merged


def fit_spectrum(
    dec: SpectralDecomposition,
    q: int,
    target: Callable[[np.ndarray], np.ndarray],
    design_kernel: ClosedFormKernel,
    reg: float = 0.0,
) -> FilterModel:
    """Fit a filter at the top-``q`` eigenvalues of ``dec``.

    Repeated eigenvalues are collapsed to one abscissa with a shared target
    (see :class:`DuplicateAbscissaWarning`).

    Raises:
        FitError: If ``q`` is not in ``[1, dec.m]``.
    """
    if not 1 <= q <= dec.m:
        raise FitError(f"q={q} outside [1, {dec.m}]")
    abscissae = collapse_abscissae(dec.eigenvalues[:q])
    return fit_filter(abscissae, target(abscissae), design_kernel, reg)
