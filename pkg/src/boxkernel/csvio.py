"""CSV persistence for signals, kernel tables, spectra and row sets.

Floats are written with ``.17g`` so that equal inputs produce
byte-identical files; complex entries use the ``re+imj`` form that
``complex()`` parses back.
"""

import csv
import io
from collections.abc import Iterable, Sequence
from pathlib import Path

import numpy as np

from boxkernel.core.exceptions import GridError
from boxkernel.core.models import Grid, Signal, SpectralDecomposition


def fmt_float(value: float) -> str:
    """Format a real number round-trip exactly."""
    return format(float(value), ".17g")


def fmt_complex(value: complex) -> str:
    """Format a complex number as ``re+imj``."""
    value = complex(value)
    return f"{value.real:.17g}{value.imag:+.17g}j"


def to_csv(rows: Iterable[dict], fieldnames: Sequence[str]) -> str:
    """Serialise a list of dicts to a CSV string.

    Args:
        rows: Dictionaries to serialise; float values are formatted with
            :func:`fmt_float`, everything else with ``str``.
        fieldnames: Ordered column names.  Extra keys in ``rows`` are ignored.

    Returns:
        A CSV-formatted string including a header row.
    """
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fieldnames, extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _cell(v) for k, v in row.items()})
    return buf.getvalue()


def _cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return fmt_float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return fmt_complex(value)
    return str(value)


def write_csv(
    path: Path, rows: Iterable[dict], fieldnames: Sequence[str]
) -> Path:
    """Write rows to ``path`` and return the path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(to_csv(rows, fieldnames), encoding="utf-8", newline="")
    return path


def read_rows(path: Path) -> list[dict[str, str]]:
    with Path(path).open(encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


# ---------------------------------------------------------------------------
# Signals
# ---------------------------------------------------------------------------

SIGNAL_FIELDS = ["node", "re", "im"]


def signal_rows(signal: Signal) -> list[dict]:
    return [
        {"node": k, "re": float(z.real), "im": float(z.imag)}
        for k, z in enumerate(signal.values)
    ]


def write_signal(path: Path, signal: Signal) -> Path:
    return write_csv(path, signal_rows(signal), SIGNAL_FIELDS)


def read_signal(path: Path, grid: Grid) -> Signal:
    """Load a ``node,re,im`` CSV onto ``grid``.

    Raises:
        GridError: If a column is missing, an entry does not parse, or the
            node column does not enumerate ``0 .. n-1``.
    """
    rows = read_rows(path)
    try:
        nodes = [int(r["node"]) for r in rows]
        values = [complex(float(r["re"]), float(r["im"])) for r in rows]
    except KeyError as e:
        raise GridError(f"{path}: missing column {e}") from e
    except (TypeError, ValueError) as e:
        raise GridError(f"{path}: unreadable entry: {e}") from e
    if nodes != list(range(grid.n)):
        raise GridError(
            f"{path}: signal nodes must be 0..{grid.n - 1} in order, "
            f"got {len(nodes)} rows"
        )
    return Signal(grid, np.array(values))


# ---------------------------------------------------------------------------
# Kernel tables
# ---------------------------------------------------------------------------


def kernel_table_text(matrix: np.ndarray) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    for row in np.asarray(matrix, dtype=complex):
        writer.writerow([fmt_complex(z) for z in row])
    return buf.getvalue()


def write_kernel_table(path: Path, matrix: np.ndarray) -> Path:
    """Write a headerless table, row i holding grid row i."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(kernel_table_text(matrix), encoding="utf-8", newline="")
    return path


def read_kernel_table(path: Path) -> np.ndarray:
    """Read a headerless complex table written by :func:`write_kernel_table`."""
    with Path(path).open(encoding="utf-8", newline="") as fh:
        rows = [
            [complex(cell.strip()) for cell in row]
            for row in csv.reader(fh)
            if row
        ]
    return np.array(rows, dtype=complex)


# ---------------------------------------------------------------------------
# Spectra, coefficients, expansions
# ---------------------------------------------------------------------------

SPECTRUM_FIELDS = ["index", "eigenvalue"]
COEFFICIENT_FIELDS = ["index", "re", "im"]
EXPANSION_FIELDS = ["center_index", "re", "im"]


def spectrum_rows(dec: SpectralDecomposition) -> list[dict]:
    return [
        {"index": i + 1, "eigenvalue": float(s)}
        for i, s in enumerate(dec.eigenvalues)
    ]


def modes_rows(
    dec: SpectralDecomposition, part: str = "real"
) -> tuple[list[dict], list[str]]:
    """Rows of ``node,theta_1,...`` holding the real or imaginary parts."""
    fields = ["node"] + [f"theta_{i + 1}" for i in range(dec.m)]
    modes = dec.modes.imag if part == "imag" else dec.modes.real
    rows = []
    for k in range(dec.grid.n):
        row = {"node": k}
        row.update(
            {f"theta_{i + 1}": float(modes[k, i]) for i in range(dec.m)}
        )
        rows.append(row)
    return rows, fields


def coefficient_rows(values: Sequence[complex]) -> list[dict]:
    return [
        {"index": i + 1, "re": float(z.real), "im": float(z.imag)}
        for i, z in enumerate(np.asarray(values, dtype=complex))
    ]


def expansion_rows(
    centers: Sequence[int], coeffs: Sequence[complex]
) -> list[dict]:
    return [
        {"center_index": int(c), "re": float(z.real), "im": float(z.imag)}
        for c, z in zip(centers, np.asarray(coeffs, dtype=complex))
    ]
