"""Service for fitting a representer filter to a Gaussian bump."""

import numpy as np

from boxkernel.config import FitConfig
from boxkernel.ops import learn
from boxkernel.services.experiment import Experiment, Output, ServiceResult
from boxkernel.sources.catalog import get_entry


class FitService:
    """Fits ``p*`` at the top-q eigenvalues to a bump centered at ``sigma_c``.

    Args:
        experiment: The resolved run.
    """

    def __init__(self, experiment: Experiment):
        self.experiment = experiment

    def run(self, cfg: FitConfig) -> ServiceResult:
        dec = self.experiment.primary_decomposition
        design = get_entry(cfg.design_kernel, cfg.design_params)
        target = learn.gaussian_bump(cfg.sigma_c, cfg.gamma)
        model = learn.fit_spectrum(
            dec, min(cfg.q, dec.m), target, design, cfg.reg
        )

        y = target(model.abscissae)
        fitted = learn.eval_filter(model, model.abscissae)
        lo = min(0.0, float(model.abscissae.min()))
        hi = float(model.abscissae.max())
        d_lo, d_hi = design.domain
        u = np.linspace(max(lo, d_lo), min(hi, d_hi), cfg.curve_points)
        curve = learn.eval_filter(model, u)

        result = ServiceResult()
        result.outputs.append(
            Output(
                "filter_curve.csv",
                [{"u": float(a), "p": float(b)} for a, b in zip(u, curve)],
                ["u", "p"],
            )
        )
        result.outputs.append(
            Output(
                "fit_report.csv",
                [
                    {
                        "sigma": float(s),
                        "target": float(t),
                        "fitted": float(p),
                        "residual": float(p - t),
                    }
                    for s, t, p in zip(model.abscissae, y, fitted)
                ],
                ["sigma", "target", "fitted", "residual"],
            )
        )
        stationarity = learn.normal_residual(model, y)
        bound = cfg.tol * max(1.0, float(np.linalg.norm(y)))
        result.summary = {
            "q": model.q,
            "design_kernel": design.name,
            "reg": cfg.reg,
            "max_residual": float(np.max(np.abs(fitted - y))),
            "h_norm_sq": learn.h_norm_sq(model),
            "normal_residual": stationarity,
        }
        if stationarity > bound:
            result.failures.append(
                f"normal equations residual {stationarity:.3g} exceeds {bound:.3g}"
            )
        return result
