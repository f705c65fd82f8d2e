"""Service for graphon Fourier coefficients of kernel-section expansions."""

import numpy as np

from boxkernel.config import FourierConfig, complex_list
from boxkernel.core.models import SpectrumKind
from boxkernel.csvio import EXPANSION_FIELDS, expansion_rows
from boxkernel.ops import graphon, kernel, rkhs, spectral
from boxkernel.services.experiment import Experiment, Output, ServiceResult


class FourierService:
    """Transforms kernel sections of ``K = W box W`` in the eigenbasis of W.

    Each coefficient is computed twice: by the closed form
    ``lambda_i^2 conj(phi_i(v))`` and by quadrature of the sampled section.

    Args:
        experiment: The resolved run; its function must be Hermitian.
    """

    def __init__(self, experiment: Experiment):
        self.experiment = experiment

    def run(self, cfg: FourierConfig) -> ServiceResult:
        exp = self.experiment
        W = exp.primary
        dec = spectral.decompose(W, kind=SpectrumKind.graphon)
        K = kernel.box_product(W, W)
        modes = min(cfg.modes, dec.m)

        centers = exp.nodes(cfg.centers)
        coeffs = np.array(complex_list(cfg.coeffs))
        f = rkhs.expand(centers, coeffs, K)
        quadrature = graphon.gft(f, dec).values
        closed = np.zeros(dec.m, dtype=complex)
        for c, a in zip(centers, coeffs):
            closed += a * graphon.kv_fourier(dec, c).values
        expansion_dev = np.abs(closed - quadrature)[:modes]

        result = ServiceResult()
        result.outputs.append(
            Output("expansion.csv", expansion_rows(centers, coeffs), EXPANSION_FIELDS)
        )
        result.outputs.append(
            Output(
                "fourier.csv",
                [
                    {
                        "index": i + 1,
                        "eigenvalue": float(dec.eigenvalues[i]),
                        "re": float(closed[i].real),
                        "im": float(closed[i].imag),
                        "deviation": float(expansion_dev[i]),
                    }
                    for i in range(modes)
                ],
                ["index", "eigenvalue", "re", "im", "deviation"],
            )
        )

        section_rows = []
        worst = float(expansion_dev.max(initial=0.0))
        for v in exp.nodes(cfg.sections):
            kv = graphon.kv_fourier(dec, v).values
            direct = graphon.gft(rkhs.kernel_section(K, v), dec).values
            dev = np.abs(kv - direct)[:modes]
            worst = max(worst, float(dev.max(initial=0.0)))
            section_rows.extend(
                {
                    "center_index": v,
                    "index": i + 1,
                    "re": float(kv[i].real),
                    "im": float(kv[i].imag),
                    "deviation": float(dev[i]),
                }
                for i in range(modes)
            )
        result.outputs.append(
            Output(
                "kv_fourier.csv",
                section_rows,
                ["center_index", "index", "re", "im", "deviation"],
            )
        )
        result.summary = {
            "f_hat_1": str(complex(closed[0])),
            "max_deviation": worst,
        }
        if worst > cfg.tol:
            result.failures.append(
                f"closed-form and quadrature coefficients differ by "
                f"{worst:.3g} > {cfg.tol:g}"
            )
        return result
