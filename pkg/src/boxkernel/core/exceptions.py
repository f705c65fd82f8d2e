"""Domain exceptions and warnings for the boxkernel library."""


class BoxkernelError(Exception):
    """Base class for all boxkernel library exceptions."""


class GridError(BoxkernelError):
    """Raised for invalid grid parameters, grid mismatches, or bad indices."""


class KernelInvariantError(BoxkernelError):
    """Raised when a two-variable function violates the invariant of its tag.

    The message names the violated invariant (``hermitian``,
    ``graphon-range``, ``shape``, ...) so that callers can tell a
    non-symmetric kernel apart from an out-of-range graphon.
    """


class SpectralError(BoxkernelError):
    """Raised when a spectral request cannot be honoured.

    Examples are asking for more modes than the grid holds, or taking the
    square root of an operator with a negative spectrum.
    """


class AlgebraError(BoxkernelError):
    """Raised for invalid box-power algebra requests."""


class ExpansionError(BoxkernelError):
    """Raised for malformed kernel-section expansions.

    Covers center and coefficient lists of different lengths and repeated
    centers where distinct ones are required.
    """


class DesignError(BoxkernelError):
    """Raised when expansion coefficients cannot be designed.

    Attributes:
        rank: Numerical rank of the constraint matrix that was found.
    """

    def __init__(self, message: str, rank: int | None = None):
        super().__init__(message)
        self.rank = rank


class FitError(BoxkernelError):
    """Raised when a representer filter cannot be fitted or evaluated."""


class DigraphonError(BoxkernelError):
    """Raised when a digraphon induces a numerically trivial kernel."""


class ConfigError(BoxkernelError):
    """Raised when a run configuration fails to parse or validate."""


class NumericalInvariantError(BoxkernelError):
    """Raised when a checked numerical invariant fails at run time."""


class OutOfSpanWarning(UserWarning):
    """Emitted when a signal carries energy outside the effective RKHS span.

    Point-wise filtering then returns the filtered projection of the signal.
    """


class DuplicateAbscissaWarning(UserWarning):
    """Emitted when repeated eigenvalues are merged into one abscissa."""
