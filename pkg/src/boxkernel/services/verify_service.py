"""Service running the invariant suite of the library at desk scale.

Every property returns one or more :class:`PropertyResult` rows.  Sizes
are fixed so that a run finishes in well under two minutes; thresholds can
be scaled by the ``verify.tol`` factor.  All randomness comes from the
run's generator, in the order the properties are listed.
"""

import dataclasses
import logging
from collections.abc import Callable

import numpy as np

from boxkernel.config import VerifyConfig
from boxkernel.core.exceptions import ConfigError
from boxkernel.core.models import (
    BoxPolynomial,
    FilterSpec,
    GridKernel,
    KernelTag,
    PropertyResult,
    RkhsContext,
    RkhsFiniteSignal,
    Signal,
)
from boxkernel.csvio import to_csv
from boxkernel.ops import (
    boxalg,
    filtering,
    graphon,
    kernel,
    learn,
    localize,
    rkhs,
    spectral,
)
from boxkernel.ops.grid import make_grid, nearest_index
from boxkernel.services.experiment import Experiment, Output, ServiceResult
from boxkernel.services.filter_service import FilterService
from boxkernel.services.spectrum_service import SpectrumService
from boxkernel.sources.catalog import get_entry

logger = logging.getLogger(__name__)

VERIFY_FIELDS = ["property", "value", "threshold", "passed"]


def _rel(actual: np.ndarray, expected: np.ndarray) -> float:
    """Max entrywise deviation relative to ``max(1, max |expected|)``."""
    scale = max(1.0, float(np.max(np.abs(expected))))
    return float(np.max(np.abs(actual - expected))) / scale


def _graphon(name: str, n: int) -> GridKernel:
    return kernel.sample(get_entry(name), make_grid(0, 1, n), KernelTag.graphon)


def _random_poly(rng: np.random.Generator, degree: int, constant=True):
    coeffs = rng.standard_normal(degree + 1)
    if not constant:
        coeffs[0] = 0.0
    return BoxPolynomial(tuple(coeffs))


class VerifyService:
    """Runs the invariant suite and reports one row per checked property.

    Args:
        experiment: The resolved run; only its generator is used, the
            properties build their own grids and kernels.
    """

    def __init__(self, experiment: Experiment):
        self.experiment = experiment
        self.rng = experiment.rng
        self.scale = 1.0
        self._checks: dict[str, Callable[[], list[PropertyResult]]] = {
            "min_spectrum": self.min_spectrum,
            "square_relation": self.square_relation,
            "pointwise_equivalence": self.pointwise_equivalence,
            "box_algebra": self.box_algebra,
            "spectral_transfer": self.spectral_transfer,
            "filter_bank": self.filter_bank,
            "kv_fourier": self.kv_fourier,
            "digraphon": self.digraphon,
            "uncertainty": self.uncertainty,
            "representer": self.representer,
            "determinism": self.determinism,
        }

    @property
    def names(self) -> list[str]:
        return list(self._checks)

    def run(self, cfg: VerifyConfig) -> ServiceResult:
        selected = cfg.properties or self.names
        unknown = sorted(set(selected) - set(self._checks))
        if unknown:
            raise ConfigError(
                f"verify.properties: unknown properties {unknown}; known: "
                f"{', '.join(self.names)}"
            )
        self.scale = cfg.tol
        results: list[PropertyResult] = []
        for name in self.names:
            if name in selected:
                logger.info("verifying %s", name)
                results.extend(self._checks[name]())

        result = ServiceResult()
        result.outputs.append(
            Output(
                "verify.csv",
                [
                    {
                        "property": r.name,
                        "value": r.value,
                        "threshold": r.threshold,
                        "passed": r.passed,
                    }
                    for r in results
                ],
                VERIFY_FIELDS,
            )
        )
        result.summary = {"properties": len(results)}
        result.failures = [
            f"{r.name}: {r.value:.3g} > {r.threshold:.3g}"
            for r in results
            if not r.passed
        ]
        self.results = results
        return result

    def _below(self, name: str, value: float, threshold: float) -> PropertyResult:
        threshold = threshold * self.scale
        return PropertyResult(
            name=name,
            value=float(value),
            threshold=threshold,
            passed=bool(np.isfinite(value) and value <= threshold),
        )

    # -----------------------------------------------------------------------
    # Properties
    # -----------------------------------------------------------------------

    def min_spectrum(self) -> list[PropertyResult]:
        W = _graphon("min", 512)
        dec = spectral.decompose(W, 5)
        exact = np.array(
            [spectral.min_graphon_oracle(i, W.grid)[0] for i in range(1, 6)]
        )
        rel = np.max(np.abs(dec.eigenvalues - exact) / exact)
        return [self._below("min_spectrum_top5_relative", rel, 1e-3)]

    def square_relation(self) -> list[PropertyResult]:
        out = []
        for name in ("min", "min_bridge", "one_minus_max"):
            report = graphon.square_relation_report(
                _graphon(name, 256), 10, rng=self.rng, trials=20
            )
            out.append(
                self._below(
                    f"square_{name}_eigenvalues", report.max_relative_error, 1e-5
                )
            )
            out.append(
                self._below(
                    f"square_{name}_operator", report.operator_deviation, 1e-10
                )
            )
        return out

    def pointwise_equivalence(self) -> list[PropertyResult]:
        W = _graphon("min", 256)
        K = graphon.induced_graphon_kernel(W, 1)
        ctx = RkhsContext(spectral.decompose(K))
        worst = 0.0
        for _ in range(50):
            degree = int(self.rng.integers(0, 5))
            spec = FilterSpec(_random_poly(self.rng, degree), K)
            f = filtering.apply_operator(
                K, Signal(K.grid, self.rng.standard_normal(K.grid.n))
            )
            g_op = filtering.filter_operator(spec, f)
            g_pw = filtering.filter_pointwise(spec, ctx, f)
            norm = np.linalg.norm(g_op.values)
            if norm:
                worst = max(
                    worst, float(np.linalg.norm(g_op.values - g_pw.values) / norm)
                )
        return [self._below("pointwise_equivalence_relative", worst, 1e-6)]

    def box_algebra(self) -> list[PropertyResult]:
        grid = make_grid(0, 1, 64)
        K = kernel.induced_kernel(
            GridKernel(grid, self.rng.uniform(0, 1, (64, 64)))
        )
        assoc = distrib = ident = homo = 0.0
        for _ in range(100):
            p, q, s = (
                _random_poly(self.rng, int(self.rng.integers(0, 4)))
                for _ in range(3)
            )
            a, b = self.rng.standard_normal(2)
            lhs = boxalg.poly_mul(boxalg.poly_mul(p, q), s)
            rhs = boxalg.poly_mul(p, boxalg.poly_mul(q, s))
            assoc = max(assoc, _coeff_gap(lhs, rhs))
            lhs = boxalg.poly_mul(p, boxalg.poly_linear(q, s, a, b))
            rhs = boxalg.poly_linear(
                boxalg.poly_mul(p, q), boxalg.poly_mul(p, s), a, b
            )
            distrib = max(distrib, _coeff_gap(lhs, rhs))
            ident = max(
                ident, _coeff_gap(boxalg.poly_mul(p, boxalg.identity()), p)
            )
            lhs = boxalg.realize(boxalg.poly_mul(p, q), K).matrix
            rhs = kernel.box_product(
                boxalg.realize(p, K), boxalg.realize(q, K)
            ).matrix
            homo = max(homo, _rel(lhs, rhs))
        return [
            self._below("algebra_associativity", assoc, 1e-8),
            self._below("algebra_distributivity", distrib, 1e-8),
            self._below("algebra_identity", ident, 1e-8),
            self._below("algebra_realization_homomorphism", homo, 1e-8),
        ]

    def spectral_transfer(self) -> list[PropertyResult]:
        W = _graphon("min", 64)
        K = graphon.induced_graphon_kernel(W, 1)
        dec = spectral.decompose(K)
        transfer = 0.0
        for _ in range(20):
            p = _random_poly(self.rng, int(self.rng.integers(1, 4)), False)
            transfer = max(
                transfer,
                float(
                    np.max(
                        np.abs(
                            boxalg.spectral_transfer(p, dec).matrix
                            - boxalg.realize(p, K).matrix
                        )
                    )
                ),
            )
        pairwise = 0.0
        for _ in range(20):
            x, y = self.rng.standard_normal((2, dec.m))
            lhs = kernel.box_product(
                boxalg.diagonal_symbol(dec, x), boxalg.diagonal_symbol(dec, y)
            ).matrix
            rhs = boxalg.diagonal_symbol(dec, x * y).matrix
            pairwise = max(pairwise, _rel(lhs, rhs))
        return [
            self._below("spectral_transfer_entrywise", transfer, 1e-6),
            self._below("spectral_transfer_pairwise", pairwise, 1e-8),
        ]

    def filter_bank(self) -> list[PropertyResult]:
        W = _graphon("min", 128)
        K = graphon.induced_graphon_kernel(W, 1)
        f = Signal(K.grid, self.rng.standard_normal(K.grid.n))
        bank = 0.0
        for _ in range(10):
            spec = FilterSpec(_random_poly(self.rng, 4), K)
            terms = filtering.bank_decompose(spec, f)
            total = np.sum([t.values for t in terms], axis=0)
            bank = max(
                bank, _rel(total, filtering.filter_operator(spec, f).values)
            )
        powers = 0.0
        g = f
        for r in range(1, 5):
            g = filtering.apply_operator(K, g)
            direct = filtering.apply_operator(boxalg.box_power(K, r), f)
            powers = max(powers, _rel(direct.values, g.values))
        return [
            self._below("filter_bank_sum", bank, 1e-8),
            self._below("filter_bank_powers", powers, 1e-8),
        ]

    def kv_fourier(self) -> list[PropertyResult]:
        W = _graphon("min", 512)
        grid = W.grid
        dec = spectral.decompose(W)
        K = kernel.box_product(W, W)
        two_path = 0.0
        for v in (0, 100, 255, 400, 511):
            direct = graphon.gft(rkhs.kernel_section(K, v), dec).values
            two_path = max(
                two_path,
                float(np.max(np.abs(graphon.kv_fourier(dec, v).values - direct))),
            )
        centers = [nearest_index(grid, t) for t in (0.2, 0.45, 0.7, 0.86)]
        coeffs = [-2.0, 1.0, -0.5, 0.2]
        fhat = sum(
            a * graphon.kv_fourier(dec, c).values[0]
            for c, a in zip(centers, coeffs)
        )
        lam, phi = spectral.min_graphon_oracle(1, grid)
        closed = lam**2 * sum(
            a * phi.values[c].real for c, a in zip(centers, coeffs)
        )
        return [
            self._below("kv_fourier_two_path", two_path, 1e-6),
            self._below("kv_fourier_example_fhat1", abs(fhat - closed), 1e-4),
        ]

    def digraphon(self) -> list[PropertyResult]:
        grid = make_grid(0, 1, 32)
        deviation = 0.0
        psd_failures = 0
        for _ in range(20):
            W = GridKernel(
                grid, self.rng.uniform(0, 1, (32, 32)), KernelTag.graphon
            )
            _, check = graphon.digraphon_kernel(W, rng=self.rng, tol=1e-12)
            deviation = max(deviation, check.max_deviation)
            psd_failures += int(not check.psd.passed)
        return [
            self._below("digraphon_operator", deviation, 1e-12),
            self._below("digraphon_psd_failures", psd_failures, 0),
        ]

    def uncertainty(self) -> list[PropertyResult]:
        W = _graphon("min", 256)
        K = kernel.retag(W, KernelTag.kernel)
        dec = spectral.decompose(K)
        centers = [
            int(c) for c in self.rng.choice(K.grid.n, size=8, replace=False)
        ]
        coeffs = self.rng.standard_normal(8)
        fs = RkhsFiniteSignal(tuple(centers), tuple(coeffs), K)
        closed = localize.fourier_closed_form(fs, dec)
        quadrature = spectral.project(dec, rkhs.expand(centers, coeffs, K))
        identity_gap = float(np.max(np.abs(closed - quadrature)))

        B = 3
        targets = self.rng.standard_normal(B)
        band_end = B + 4
        energies = [
            localize.design_coeffs(
                centers[:size], dec, B, targets, band_end=band_end
            ).mid_energy
            for size in range(B + 1, B + 5)
        ]
        increase = max(
            (later - earlier) / max(earlier, 1e-300)
            for earlier, later in zip(energies, energies[1:])
        )
        return [
            self._below("uncertainty_closed_form", identity_gap, 1e-6),
            self._below("uncertainty_design_monotone", max(increase, 0.0), 1e-8),
        ]

    def representer(self) -> list[PropertyResult]:
        dec = spectral.decompose(_graphon("min", 256))
        design = get_entry("min")
        abscissae = dec.eigenvalues[:35]
        target = learn.gaussian_bump(0.05, 1e-3)

        model = learn.fit_spectrum(dec, 35, target, design, 0.0)
        interp = float(
            np.max(np.abs(learn.eval_filter(model, abscissae) - target(abscissae)))
        )

        residuals = []
        for q in (15, 20, 25, 30, 35):
            m = learn.fit_spectrum(dec, q, target, design, 0.0)
            residuals.append(
                float(np.max(np.abs(learn.eval_filter(m, abscissae) - target(abscissae))))
            )
        growth = max(b - a for a, b in zip(residuals, residuals[1:]))

        sq_errors, norms = [], []
        q = 25
        y = target(abscissae[:q])
        for reg in (0.0, 1e-4, 1e-2, 1.0):
            m = learn.fit_filter(abscissae[:q], y, design, reg)
            sq_errors.append(float(np.sum((learn.eval_filter(m, abscissae[:q]) - y) ** 2)))
            norms.append(learn.h_norm_sq(m))
        violation = max(
            max(a - b for a, b in zip(sq_errors, sq_errors[1:])),
            max(b - a for a, b in zip(norms, norms[1:])),
        )
        return [
            self._below("representer_interpolation", interp, 1e-8),
            self._below("representer_bump_monotone", max(growth, 0.0), 1e-12),
            self._below("representer_regularization_path", max(violation, 0.0), 1e-10),
        ]

    def determinism(self) -> list[PropertyResult]:
        """Render spectrum and filter outputs from two fresh runs of the
        configuration and count the files that differ."""
        base = self.experiment
        cfg = base.config
        filter_cfg = dataclasses.replace(cfg.filter, check_equivalence=True)

        def render() -> list[str]:
            exp = Experiment(cfg, base.source)
            outputs = (
                SpectrumService(exp).run(cfg.spectrum.m).outputs
                + FilterService(exp).run(filter_cfg).outputs
            )
            return [to_csv(o.rows, o.fields) for o in outputs]

        first, second = render(), render()
        mismatches = sum(a != b for a, b in zip(first, second))
        mismatches += abs(len(first) - len(second))
        return [self._below("determinism_mismatch", float(mismatches), 0)]


def _coeff_gap(p: BoxPolynomial, q: BoxPolynomial) -> float:
    size = max(len(p.coeffs), len(q.coeffs), 1)
    a = np.zeros(size, dtype=complex)
    b = np.zeros(size, dtype=complex)
    a[: len(p.coeffs)] = p.coeffs
    b[: len(q.coeffs)] = q.coeffs
    return float(np.max(np.abs(a - b)) / max(1.0, float(np.max(np.abs(b)))))
