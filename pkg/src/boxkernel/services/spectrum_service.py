"""Service for exporting the spectrum of the configured function."""

from boxkernel.csvio import SPECTRUM_FIELDS, modes_rows, spectrum_rows
from boxkernel.ops import spectral
from boxkernel.services.experiment import Experiment, Output, ServiceResult


class SpectrumService:
    """Decomposes the configured function and exports its eigenpairs.

    Hermitian functions are decomposed directly (graphons in descending
    magnitude order); asymmetric ones are replaced by the kernel they
    induce.

    Args:
        experiment: The resolved run.
    """

    def __init__(self, experiment: Experiment):
        self.experiment = experiment

    def run(self, m: int | str = 10) -> ServiceResult:
        exp = self.experiment
        target = exp.primary if exp.primary.is_hermitian else exp.kernel
        m = min(m, exp.grid.n) if m != "all" else m
        dec = spectral.decompose(target, m)

        result = ServiceResult()
        result.outputs.append(
            Output("spectrum.csv", spectrum_rows(dec), SPECTRUM_FIELDS)
        )
        rows, fields = modes_rows(dec)
        result.outputs.append(Output("modes.csv", rows, fields))
        if dec.modes.imag.any():
            rows, fields = modes_rows(dec, "imag")
            result.outputs.append(Output("modes_imag.csv", rows, fields))
        result.summary = {
            "kind": dec.kind.value,
            "modes": dec.m,
            "leading": float(dec.eigenvalues[0]),
        }
        return result
