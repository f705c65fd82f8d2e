"""Service for band reports and coefficient design of RKHS-finite signals."""

import numpy as np

from boxkernel.config import LocalizeConfig, complex_list
from boxkernel.core.models import RkhsFiniteSignal
from boxkernel.csvio import EXPANSION_FIELDS, expansion_rows
from boxkernel.ops import localize, rkhs
from boxkernel.services.experiment import Experiment, Output, ServiceResult


class LocalizeService:
    """Reports how an RKHS-finite signal spreads over the spectrum.

    The configured expansion is binned into low, mid and tail bands; a
    second expansion is then designed over ``design_centers`` to keep the
    low band (``targets``, defaulting to the low band of the first signal)
    while minimizing the mid band.

    Args:
        experiment: The resolved run.
    """

    def __init__(self, experiment: Experiment):
        self.experiment = experiment

    def run(self, cfg: LocalizeConfig) -> ServiceResult:
        exp = self.experiment
        K = exp.kernel
        dec = exp.kernel_decomposition
        centers = exp.nodes(cfg.centers)
        fs = RkhsFiniteSignal(
            tuple(centers), tuple(complex_list(cfg.coeffs)), K
        )
        report = localize.uncertainty_residuals(fs, dec, cfg.B)
        f = rkhs.expand(fs.centers, fs.coeffs, K)
        band = localize.bandlimit_check(f, dec, cfg.B, cfg.tol)

        result = ServiceResult()
        result.outputs.append(
            Output(
                "bands.csv",
                [
                    {
                        "mode": i + 1,
                        "sigma": float(dec.eigenvalues[i]),
                        "abs_fhat": float(report.magnitudes[i]),
                        "band": report.band_of(i),
                    }
                    for i in range(dec.m)
                ],
                ["mode", "sigma", "abs_fhat", "band"],
            )
        )
        result.summary = {
            "B": cfg.B,
            "low_energy": report.low_energy,
            "mid_energy": report.mid_energy,
            "tail_energy": report.tail_energy,
            "bandlimited": band.passed,
            "max_out_of_band": band.max_out_of_band,
        }

        design_centers = (
            exp.nodes(cfg.design_centers)
            if cfg.design_centers is not None
            else centers
        )
        if cfg.B < 1 or len(design_centers) < cfg.B:
            return result
        targets = (
            np.array(complex_list(cfg.targets))
            if cfg.targets is not None
            else report.coefficients[: cfg.B]
        )
        design = localize.design_coeffs(
            design_centers, dec, cfg.B, targets, band_end=cfg.band_end
        )
        result.outputs.append(
            Output(
                "design.csv",
                expansion_rows(design_centers, design.coeffs),
                EXPANSION_FIELDS,
            )
        )
        result.summary["design_mid_energy"] = design.mid_energy
        result.summary["design_tail_energy"] = design.tail_energy
        result.summary["design_rank"] = design.rank
        return result
