"""Service for graphon-induced kernels and the digraphon check."""

import numpy as np

from boxkernel.config import GraphonConfig
from boxkernel.csvio import SPECTRUM_FIELDS, spectrum_rows
from boxkernel.ops import graphon, spectral
from boxkernel.services.experiment import Experiment, Output, ServiceResult

SQUARE_REL_TOL = 1e-5
SQUARE_ANGLE_TOL = 1e-3


class GraphonService:
    """Builds ``W^(box 2n)`` or ``W box W*`` and checks their relations to W.

    Args:
        experiment: The resolved run; its function must be a graphon.
    """

    def __init__(self, experiment: Experiment):
        self.experiment = experiment

    def run(self, cfg: GraphonConfig) -> ServiceResult:
        if cfg.digraphon:
            return self._digraphon(cfg)
        return self._symmetric(cfg)

    def _symmetric(self, cfg: GraphonConfig) -> ServiceResult:
        exp = self.experiment
        W = exp.primary
        modes = min(cfg.modes, exp.grid.n)
        K = graphon.induced_graphon_kernel(W, cfg.order)
        dec_W = spectral.decompose(W, modes)
        dec_K = spectral.decompose(K, modes)
        power = dec_W.eigenvalues ** (2 * cfg.order)
        rel = np.abs(dec_K.eigenvalues - power) / np.where(power > 0, power, 1.0)
        report = graphon.square_relation_report(
            W, modes, rng=exp.rng, trials=cfg.trials
        )

        result = ServiceResult()
        result.outputs.append(
            Output(
                "graphon.csv",
                [
                    {
                        "index": i + 1,
                        "lambda": float(dec_W.eigenvalues[i]),
                        "sigma": float(dec_K.eigenvalues[i]),
                        "lambda_power": float(power[i]),
                        "relative_error": float(rel[i]),
                    }
                    for i in range(modes)
                ],
                ["index", "lambda", "sigma", "lambda_power", "relative_error"],
            )
        )
        result.summary = {
            "order": cfg.order,
            "max_relative_error": float(rel.max(initial=0.0)),
            "square_max_relative_error": report.max_relative_error,
            "square_max_angle": report.max_angle,
            "operator_deviation": report.operator_deviation,
        }
        if report.operator_deviation > cfg.tol:
            result.failures.append(
                f"T_(W box W) and T_W^2 differ by {report.operator_deviation:.3g}"
            )
        if report.max_relative_error > SQUARE_REL_TOL:
            result.failures.append(
                f"sigma vs lambda^2 relative error {report.max_relative_error:.3g}"
            )
        if report.max_angle > SQUARE_ANGLE_TOL:
            result.failures.append(
                f"eigenspace angle {report.max_angle:.3g} rad"
            )
        return result

    def _digraphon(self, cfg: GraphonConfig) -> ServiceResult:
        exp = self.experiment
        K, check = graphon.digraphon_kernel(
            exp.primary, rng=exp.rng, trials=cfg.trials, tol=cfg.tol
        )
        dec = spectral.decompose(K, min(cfg.modes, exp.grid.n))
        result = ServiceResult()
        result.outputs.append(
            Output("digraphon_spectrum.csv", spectrum_rows(dec), SPECTRUM_FIELDS)
        )
        result.outputs.append(
            Output(
                "digraphon.csv",
                [
                    {"property": "max_deviation", "value": check.max_deviation},
                    {"property": "min_eigenvalue", "value": check.psd.min_eigenvalue},
                    {"property": "max_eigenvalue", "value": check.psd.max_eigenvalue},
                    {"property": "hermitian", "value": check.psd.hermitian},
                    {"property": "passed", "value": check.passed},
                ],
                ["property", "value"],
            )
        )
        result.summary = {
            "max_deviation": check.max_deviation,
            "psd": check.psd.passed,
        }
        if not check.passed:
            result.failures.append(
                f"T_K = T_W T_W* check failed (deviation {check.max_deviation:.3g}, "
                f"psd={check.psd.passed})"
            )
        return result
