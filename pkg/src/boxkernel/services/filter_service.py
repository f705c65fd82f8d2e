"""Service for running a polynomial filter both ways."""

import numpy as np

from boxkernel.config import FilterConfig, complex_list
from boxkernel.core.models import BoxPolynomial, FilterSpec, RkhsContext, Signal
from boxkernel.csvio import SIGNAL_FIELDS, read_signal, signal_rows
from boxkernel.ops import filtering
from boxkernel.ops.grid import l2_norm
from boxkernel.services.experiment import Experiment, Output, ServiceResult


class FilterService:
    """Filters a configured signal by ``p(T_K)`` over the induced kernel.

    Always runs the operator form and the filter-bank split; with
    ``check_equivalence`` it also runs the point-wise RKHS form and reports
    the node-wise deviation between the two.

    Args:
        experiment: The resolved run.
    """

    def __init__(self, experiment: Experiment):
        self.experiment = experiment

    def polynomial(self, cfg: FilterConfig) -> BoxPolynomial:
        """Configured coefficients, or a random real polynomial of ``degree``."""
        if cfg.poly is not None:
            return BoxPolynomial(tuple(complex_list(cfg.poly)))
        return BoxPolynomial(
            tuple(self.experiment.rng.standard_normal(cfg.degree + 1))
        )

    def signal(self, cfg: FilterConfig) -> Signal:
        exp = self.experiment
        spec = cfg.signal
        if spec.type == "csv":
            return read_signal(spec.path, exp.grid)
        if spec.type == "mode":
            return exp.kernel_decomposition.eigenfunction(spec.mode - 1)
        g = Signal(exp.grid, exp.rng.standard_normal(exp.grid.n))
        if spec.type == "random":
            return g
        return filtering.apply_operator(exp.kernel, g)

    def run(self, cfg: FilterConfig) -> ServiceResult:
        exp = self.experiment
        poly = self.polynomial(cfg)
        f = self.signal(cfg)
        spec = FilterSpec(poly, exp.kernel)
        g_op = filtering.filter_operator(spec, f)
        terms = filtering.bank_decompose(spec, f)

        result = ServiceResult()
        result.outputs.append(
            Output("signal.csv", signal_rows(f), SIGNAL_FIELDS)
        )
        bank = [
            {"degree": r, "node": k, "re": float(z.real), "im": float(z.imag)}
            for r, term in enumerate(terms)
            for k, z in enumerate(term.values)
        ]
        result.outputs.append(
            Output("bank.csv", bank, ["degree", "node", "re", "im"])
        )
        bank_sum = np.sum([t.values for t in terms], axis=0) if terms else 0
        result.summary = {
            "degree": poly.degree,
            "coefficients": [str(a) for a in poly.coeffs],
            "bank_deviation": float(np.max(np.abs(bank_sum - g_op.values))),
        }

        if not cfg.check_equivalence:
            result.outputs.append(
                Output("filtered.csv", signal_rows(g_op), SIGNAL_FIELDS)
            )
            return result

        ctx = RkhsContext(exp.kernel_decomposition)
        g_pw = filtering.filter_pointwise(spec, ctx, f)
        deviation = np.abs(g_op.values - g_pw.values)
        rows = [
            {
                "node": k,
                "operator_re": float(a.real),
                "operator_im": float(a.imag),
                "pointwise_re": float(b.real),
                "pointwise_im": float(b.imag),
                "deviation": float(d),
            }
            for k, (a, b, d) in enumerate(
                zip(g_op.values, g_pw.values, deviation)
            )
        ]
        result.outputs.append(
            Output(
                "filtered.csv",
                rows,
                [
                    "node",
                    "operator_re",
                    "operator_im",
                    "pointwise_re",
                    "pointwise_im",
                    "deviation",
                ],
            )
        )
        norm = l2_norm(g_op)
        relative = l2_norm(g_op - g_pw) / norm if norm else 0.0
        result.summary["max_deviation"] = float(deviation.max())
        result.summary["relative_l2_deviation"] = relative
        if relative > cfg.tol:
            result.failures.append(
                f"operator/point-wise relative deviation {relative:.3g} "
                f"exceeds {cfg.tol:g}"
            )
        return result
