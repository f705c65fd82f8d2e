"""Data model dataclasses shared across the operation modules.

Every model is immutable after construction: array fields are copied on the
way in and marked read-only, so grids, kernels and decompositions can be
shared freely between concurrent readers.
"""

from collections.abc import Callable
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import TYPE_CHECKING

import numpy as np

from boxkernel.core.exceptions import (
    ExpansionError,
    FitError,
    GridError,
    KernelInvariantError,
    SpectralError,
)

if TYPE_CHECKING:
    from boxkernel.core.interfaces import ClosedFormKernel

HERMITIAN_TOL = 1e-10
"""Relative tolerance of the Hermitian invariant of kernel-tagged matrices."""

GRAPHON_SLACK = 1e-12
"""Slack allowed on the realness and [0, 1] range of graphon entries."""


def _frozen_array(values, dtype=complex) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


def hermitian_defect(matrix: np.ndarray) -> float:
    """Return max |M - M^H| relative to max(1, max |M|)."""
    scale = max(1.0, float(np.max(np.abs(matrix), initial=0.0)))
    return float(np.max(np.abs(matrix - matrix.conj().T), initial=0.0)) / scale


# ----------------------
# Grid
# ----------------------


@dataclass(frozen=True)
class Grid:
    """Midpoint-rule discretization of the interval ``[lo, hi]``.

    Two grids are equal when their endpoints and node counts are equal, so
    grid-mismatch checks compare grids with ``==``.
    """

    lo: float
    hi: float
    n: int

    def __post_init__(self):
        if not np.isfinite(self.lo) or not np.isfinite(self.hi):
            raise GridError(f"grid endpoints must be finite, got {self}")
        if self.hi <= self.lo:
            raise GridError(
                f"grid requires hi > lo, got lo={self.lo}, hi={self.hi}"
            )
        if self.n < 2:
            raise GridError(f"grid requires n >= 2 nodes, got n={self.n}")

    @property
    def step(self) -> float:
        """Width ``(hi - lo) / n`` of one quadrature cell."""
        return (self.hi - self.lo) / self.n

    @cached_property
    def nodes(self) -> np.ndarray:
        """Cell midpoints ``lo + (k + 1/2) (hi - lo) / n``."""
        return _frozen_array(
            self.lo + (np.arange(self.n) + 0.5) * self.step, dtype=float
        )

    @cached_property
    def weights(self) -> np.ndarray:
        """Uniform quadrature weights, each ``(hi - lo) / n``."""
        return _frozen_array(np.full(self.n, self.step), dtype=float)


# ----------------------
# Signal
# ----------------------


@dataclass(frozen=True, eq=False)
class Signal:
    """A complex function sampled on the nodes of a :class:`Grid`."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = _frozen_array(self.values)
        if values.shape != (self.grid.n,):
            raise GridError(
                f"signal has shape {values.shape}, grid expects "
                f"({self.grid.n},)"
            )
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(
        cls, grid: Grid, fn: Callable[[np.ndarray], np.ndarray]
    ) -> "Signal":
        """Sample a vectorized one-variable function on the grid nodes."""
        return cls(grid, np.broadcast_to(fn(grid.nodes), (grid.n,)))

    @classmethod
    def zeros(cls, grid: Grid) -> "Signal":
        return cls(grid, np.zeros(grid.n))

    def _same_grid(self, other: "Signal") -> None:
        if other.grid != self.grid:
            raise GridError(f"grid mismatch: {self.grid} vs {other.grid}")

    def __add__(self, other: "Signal") -> "Signal":
        self._same_grid(other)
        return Signal(self.grid, self.values + other.values)

    def __sub__(self, other: "Signal") -> "Signal":
        self._same_grid(other)
        return Signal(self.grid, self.values - other.values)

    def __neg__(self) -> "Signal":
        return Signal(self.grid, -self.values)

    def __mul__(self, scalar: complex) -> "Signal":
        return Signal(self.grid, complex(scalar) * self.values)

    __rmul__ = __mul__


# ----------------------
# GridKernel
# ----------------------


class KernelTag(str, Enum):
    """Semantic role of a two-variable function."""

    symbol = "symbol"
    graphon = "graphon"
    kernel = "kernel"


@dataclass(frozen=True, eq=False)
class GridKernel:
    """A two-variable function sampled on ``grid x grid``.

    Entry ``(i, j)`` is the value at ``(nodes[i], nodes[j])``.  The tag is
    validated on construction: graphons must be real with entries in
    ``[0, 1]`` and kernels must be Hermitian.

    Raises:
        KernelInvariantError: If the matrix has the wrong shape or violates
            the invariant of its tag.
    """

    grid: Grid
    matrix: np.ndarray
    tag: KernelTag = KernelTag.symbol

    def __post_init__(self):
        matrix = _frozen_array(self.matrix)
        n = self.grid.n
        if matrix.shape != (n, n):
            raise KernelInvariantError(
                f"shape: matrix is {matrix.shape}, grid expects ({n}, {n})"
            )
        tag = KernelTag(self.tag)
        if tag is KernelTag.graphon:
            imag = float(np.max(np.abs(matrix.imag)))
            if imag > GRAPHON_SLACK:
                raise KernelInvariantError(
                    f"graphon-real: max imaginary part {imag:.3g}"
                )
            lo, hi = float(matrix.real.min()), float(matrix.real.max())
            if lo < -GRAPHON_SLACK or hi > 1 + GRAPHON_SLACK:
                raise KernelInvariantError(
                    f"graphon-range: entries span [{lo:.6g}, {hi:.6g}], "
                    "expected [0, 1]"
                )
        elif tag is KernelTag.kernel:
            defect = hermitian_defect(matrix)
            if defect > HERMITIAN_TOL:
                raise KernelInvariantError(
                    f"hermitian: max |K - K^H| = {defect:.3g} exceeds "
                    f"{HERMITIAN_TOL:g}"
                )
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "tag", tag)

    @property
    def is_hermitian(self) -> bool:
        return hermitian_defect(self.matrix) <= HERMITIAN_TOL


# ----------------------
# SpectralDecomposition
# ----------------------


class SpectrumKind(str, Enum):
    """Ordering convention of a decomposition.

    ``kernel`` spectra are nonnegative and descending; ``graphon`` spectra
    are descending by magnitude.
    """

    kernel = "kernel"
    graphon = "graphon"


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Ordered eigenpairs of a discretized self-adjoint integral operator.

    Column ``i`` of :attr:`modes` holds the grid samples of the i-th
    eigenfunction; columns are orthonormal in the quadrature inner product.
    """

    grid: Grid
    eigenvalues: np.ndarray
    modes: np.ndarray
    kind: SpectrumKind

    def __post_init__(self):
        eigenvalues = _frozen_array(self.eigenvalues, dtype=float)
        modes = _frozen_array(self.modes)
        if modes.shape != (self.grid.n, eigenvalues.shape[0]):
            raise SpectralError(
                f"modes have shape {modes.shape}, expected "
                f"({self.grid.n}, {eigenvalues.shape[0]})"
            )
        object.__setattr__(self, "eigenvalues", eigenvalues)
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "kind", SpectrumKind(self.kind))

    @property
    def m(self) -> int:
        """Number of retained modes."""
        return int(self.eigenvalues.shape[0])

    @property
    def is_full(self) -> bool:
        return self.m == self.grid.n

    def eigenfunction(self, i: int) -> Signal:
        """Return the eigenfunction of the i-th mode (0-based)."""
        return Signal(self.grid, self.modes[:, i])

    @property
    def eigenfunctions(self) -> list[Signal]:
        return [self.eigenfunction(i) for i in range(self.m)]


# ----------------------
# RkhsContext
# ----------------------


@dataclass(frozen=True, eq=False)
class RkhsContext:
    """The Hilbert space H(K) seen through a kernel-kind decomposition.

    Only modes with ``sigma_i > rank_tol * sigma_1`` take part in RKHS inner
    products; the rest are numerically null.
    """

    dec: SpectralDecomposition
    rank_tol: float = 1e-10

    def __post_init__(self):
        if self.dec.kind is not SpectrumKind.kernel:
            raise SpectralError(
                "RKHS context requires a kernel-kind decomposition"
            )
        if self.rank_tol < 0:
            raise SpectralError(f"rank_tol must be >= 0, got {self.rank_tol}")

    @property
    def grid(self) -> Grid:
        return self.dec.grid

    @cached_property
    def mask(self) -> np.ndarray:
        """Boolean mask of the effective modes."""
        sigma = self.dec.eigenvalues
        if sigma.size == 0 or sigma[0] <= 0:
            return _frozen_array(np.zeros(sigma.shape, dtype=bool), bool)
        return _frozen_array(sigma > self.rank_tol * sigma[0], bool)

    @property
    def effective_rank(self) -> int:
        return int(np.count_nonzero(self.mask))


# ----------------------
# BoxPolynomial
# ----------------------


@dataclass(frozen=True)
class BoxPolynomial:
    """Coefficients ``a_0 ... a_R`` of ``sum_r a_r K^(box r)``.

    ``a_0`` multiplies the identity ``K^(box 0) = delta``.  Trailing zero
    coefficients are trimmed so equal polynomials compare equal; the zero
    polynomial has no coefficients and degree ``-1``.
    """

    coeffs: tuple[complex, ...] = ()

    def __post_init__(self):
        coeffs = [complex(a) for a in self.coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coeffs", tuple(coeffs))

    @classmethod
    def of(cls, *coeffs: complex) -> "BoxPolynomial":
        return cls(tuple(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def constant(self) -> complex:
        return self.coeffs[0] if self.coeffs else 0j

    def __call__(self, t):
        """Evaluate ``p(t)`` by Horner's rule; ``t`` may be an array."""
        t = np.asarray(t)
        acc = np.zeros(t.shape, dtype=complex)
        for a in reversed(self.coeffs):
            acc = acc * t + a
        return acc

    def conjugate(self) -> "BoxPolynomial":
        return BoxPolynomial(tuple(a.conjugate() for a in self.coeffs))

    def times_t(self) -> "BoxPolynomial":
        """Return ``p(t) * t``."""
        if self.is_zero:
            return self
        return BoxPolynomial((0j, *self.coeffs))


# ----------------------
# FilterSpec
# ----------------------


@dataclass(frozen=True, eq=False)
class FilterSpec:
    """A polynomial filter ``p(T_K)`` over a reproducing kernel."""

    poly: BoxPolynomial
    kernel: GridKernel

    def __post_init__(self):
        if self.kernel.tag is not KernelTag.kernel:
            raise KernelInvariantError(
                f"filter kernel must be tagged kernel, got {self.kernel.tag.value}"
            )

    @property
    def grid(self) -> Grid:
        return self.kernel.grid


# ----------------------
# FourierCoefficients
# ----------------------


@dataclass(frozen=True, eq=False)
class FourierCoefficients:
    """Per-mode coefficients ``<f, phi_i>`` in the basis of a decomposition."""

    dec: SpectralDecomposition
    values: np.ndarray

    def __post_init__(self):
        values = _frozen_array(self.values)
        if values.shape != (self.dec.m,):
            raise SpectralError(
                f"coefficients have shape {values.shape}, decomposition has "
                f"{self.dec.m} modes"
            )
        object.__setattr__(self, "values", values)


# ----------------------
# RkhsFiniteSignal
# ----------------------


@dataclass(frozen=True, eq=False)
class RkhsFiniteSignal:
    """A finite combination ``sum_t a_t k_t`` over distinct grid centers."""

    centers: tuple[int, ...]
    coeffs: tuple[complex, ...]
    kernel: GridKernel

    def __post_init__(self):
        centers = tuple(int(c) for c in self.centers)
        coeffs = tuple(complex(a) for a in self.coeffs)
        if len(centers) != len(coeffs):
            raise ExpansionError(
                f"{len(centers)} centers but {len(coeffs)} coefficients"
            )
        if len(set(centers)) != len(centers):
            raise ExpansionError(f"centers must be distinct, got {centers}")
        n = self.kernel.grid.n
        bad = [c for c in centers if not 0 <= c < n]
        if bad:
            raise GridError(f"center indices {bad} outside [0, {n})")
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "coeffs", coeffs)


# ----------------------
# FilterModel
# ----------------------


@dataclass(frozen=True, eq=False)
class FilterModel:
    """A representer-theorem filter ``p*(u) = sum_i a_i K(u, sigma_i)``."""

    abscissae: np.ndarray
    coeffs: np.ndarray
    design_kernel: "ClosedFormKernel"
    reg: float = 0.0

    def __post_init__(self):
        abscissae = _frozen_array(self.abscissae, dtype=float)
        coeffs = _frozen_array(self.coeffs, dtype=float)
        if abscissae.ndim != 1 or abscissae.size < 1:
            raise FitError("a filter model needs at least one abscissa")
        if coeffs.shape != abscissae.shape:
            raise FitError(
                f"{abscissae.size} abscissae but {coeffs.size} coefficients"
            )
        if not np.all(np.isfinite(coeffs)):
            raise FitError("filter coefficients must be finite")
        if self.reg < 0:
            raise FitError(f"regularization must be >= 0, got {self.reg}")
        lo, hi = self.design_kernel.domain
        outside = abscissae[(abscissae < lo) | (abscissae > hi)]
        if outside.size:
            raise FitError(
                f"abscissae {outside.tolist()} lie outside the design kernel "
                f"domain [{lo}, {hi}]"
            )
        object.__setattr__(self, "abscissae", abscissae)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def q(self) -> int:
        return int(self.abscissae.size)


# ----------------------
# Reports
# ----------------------


@dataclass(frozen=True)
class PsdReport:
    """Outcome of a positive-semidefiniteness check."""

    min_eigenvalue: float
    max_eigenvalue: float
    hermitian: bool
    passed: bool


@dataclass(frozen=True)
class MembershipReport:
    """RKHS norm estimate of a signal and its energy outside the span."""

    score: float
    """Partial sum ``sum |<f, theta_i>|^2 / sigma_i`` over effective modes."""

    residual: float
    """L2 energy of the signal outside the effective span."""

    effective_rank: int


@dataclass(frozen=True)
class BandlimitReport:
    """Outcome of a B-bandlimitation test."""

    passed: bool
    max_out_of_band: float
    norm: float


@dataclass(frozen=True, eq=False)
class BandReport:
    """Fourier magnitudes of an RKHS-finite signal binned into three bands.

    Bands are ``[1, B]``, ``[B + 1, |T|]`` and ``[|T| + 1, m]`` in 1-based
    mode numbering.
    """

    B: int
    size: int
    """Number of centers ``|T|``."""

    coefficients: np.ndarray
    low_energy: float
    mid_energy: float
    tail_energy: float

    @property
    def magnitudes(self) -> np.ndarray:
        return np.abs(self.coefficients)

    @property
    def total_energy(self) -> float:
        return self.low_energy + self.mid_energy + self.tail_energy

    def band_of(self, i: int) -> str:
        """Band label of the 0-based mode ``i``."""
        if i < self.B:
            return "low"
        if i < self.size:
            return "mid"
        return "tail"


@dataclass(frozen=True, eq=False)
class DesignResult:
    """Designed expansion coefficients and the energy they leave behind."""

    coeffs: np.ndarray
    mid_energy: float
    tail_energy: float
    rank: int


@dataclass(frozen=True, eq=False)
class SpectralResponse:
    """Per-mode filter response ``p(sigma_i)`` with its validity mask."""

    values: np.ndarray
    valid: np.ndarray


@dataclass(frozen=True)
class DigraphonCheck:
    """Operator identity ``T_K = T_W T_W*`` checked on random signals."""

    max_deviation: float
    psd: PsdReport
    passed: bool


@dataclass(frozen=True, eq=False)
class SquareRelationReport:
    """Chain check between a graphon W and its induced kernel W box W."""

    lambdas: np.ndarray
    sigmas: np.ndarray
    max_relative_error: float
    """Largest ``|sigma_i - lambda_i^2| / lambda_i^2`` over compared modes."""

    max_angle: float
    """Largest principal angle between matched eigenspaces (radians)."""

    operator_deviation: float
    """Largest ``|T_K f - T_W^2 f|`` over the random test signals."""


@dataclass(frozen=True)
class PropertyResult:
    """One checked property of the verification suite."""

    name: str
    value: float
    threshold: float
    passed: bool
    detail: str = field(default="", compare=False)
