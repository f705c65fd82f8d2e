"""Unit tests for core domain models."""

import numpy as np
import pytest

from boxkernel.core.exceptions import (
    ExpansionError,
    FitError,
    GridError,
    KernelInvariantError,
    SpectralError,
)
from boxkernel.core.models import (
    BandReport,
    BoxPolynomial,
    FilterModel,
    FilterSpec,
    Grid,
    GridKernel,
    KernelTag,
    RkhsContext,
    RkhsFiniteSignal,
    Signal,
    SpectralDecomposition,
    SpectrumKind,
)
from boxkernel.sources.catalog import get_entry


@pytest.fixture()
def grid():
    return Grid(0.0, 1.0, 8)


class TestGrid:
    def test_nodes_are_cell_midpoints(self, grid):
        np.testing.assert_allclose(grid.nodes, (np.arange(8) + 0.5) / 8)

    def test_weights_sum_to_length(self):
        g = Grid(-1.0, 2.0, 7)
        assert g.weights.sum() == pytest.approx(3.0)

    def test_nodes_are_read_only(self, grid):
        with pytest.raises(ValueError):
            grid.nodes[0] = 1.0

    @pytest.mark.parametrize(
        "lo, hi, n", [(0, 1, 1), (1, 1, 4), (1, 0, 4), (0, np.inf, 4)]
    )
    def test_invalid_parameters_raise(self, lo, hi, n):
        with pytest.raises(GridError):
            Grid(lo, hi, n)

    def test_equal_parameters_compare_equal(self):
        assert Grid(0.0, 1.0, 4) == Grid(0.0, 1.0, 4)
        assert Grid(0.0, 1.0, 4) != Grid(0.0, 1.0, 5)


class TestSignal:
    def test_shape_mismatch_raises(self, grid):
        with pytest.raises(GridError):
            Signal(grid, np.zeros(7))

    def test_arithmetic(self, grid):
        f = Signal(grid, np.ones(8))
        g = Signal.from_function(grid, lambda u: u)
        np.testing.assert_allclose((2 * f - g).values, 2 - grid.nodes)
        np.testing.assert_allclose((-f).values, -np.ones(8))

    def test_grid_mismatch_on_add(self, grid):
        with pytest.raises(GridError):
            Signal.zeros(grid) + Signal.zeros(Grid(0.0, 1.0, 9))

    def test_values_are_complex_and_frozen(self, grid):
        f = Signal(grid, np.arange(8))
        assert f.values.dtype == complex
        with pytest.raises(ValueError):
            f.values[0] = 3


class TestGridKernel:
    def test_graphon_rejects_out_of_range(self, grid):
        with pytest.raises(KernelInvariantError, match="graphon-range"):
            GridKernel(grid, 2 * np.ones((8, 8)), KernelTag.graphon)

    def test_graphon_rejects_complex(self, grid):
        with pytest.raises(KernelInvariantError, match="graphon-real"):
            GridKernel(grid, 0.5j * np.ones((8, 8)), KernelTag.graphon)

    def test_kernel_rejects_non_hermitian(self, grid):
        M = np.triu(np.ones((8, 8)))
        with pytest.raises(KernelInvariantError, match="hermitian"):
            GridKernel(grid, M, KernelTag.kernel)

    def test_symbol_accepts_anything_square(self, grid):
        K = GridKernel(grid, np.triu(np.ones((8, 8))) * (3 - 1j))
        assert K.tag is KernelTag.symbol
        assert not K.is_hermitian

    def test_shape_checked(self, grid):
        with pytest.raises(KernelInvariantError, match="shape"):
            GridKernel(grid, np.ones((8, 7)))

    def test_tag_accepts_string(self, grid):
        K = GridKernel(grid, np.eye(8), "kernel")
        assert K.tag is KernelTag.kernel


class TestSpectralDecomposition:
    def test_mode_shape_checked(self, grid):
        with pytest.raises(SpectralError):
            SpectralDecomposition(
                grid, np.ones(3), np.ones((8, 2)), SpectrumKind.kernel
            )

    def test_eigenfunction_and_full(self, grid):
        dec = SpectralDecomposition(
            grid, np.ones(8), np.eye(8), SpectrumKind.kernel
        )
        assert dec.is_full
        assert dec.m == 8
        np.testing.assert_array_equal(dec.eigenfunction(2).values, np.eye(8)[:, 2])


class TestRkhsContext:
    def test_mask_drops_tiny_modes(self, grid):
        dec = SpectralDecomposition(
            grid,
            np.array([1.0, 1e-3, 1e-12, 0.0]),
            np.eye(8)[:, :4],
            SpectrumKind.kernel,
        )
        ctx = RkhsContext(dec)
        np.testing.assert_array_equal(ctx.mask, [True, True, False, False])
        assert ctx.effective_rank == 2

    def test_requires_kernel_kind(self, grid):
        dec = SpectralDecomposition(
            grid, np.ones(2), np.eye(8)[:, :2], SpectrumKind.graphon
        )
        with pytest.raises(SpectralError):
            RkhsContext(dec)


class TestBoxPolynomial:
    def test_trailing_zeros_trimmed(self):
        assert BoxPolynomial.of(1, 2, 0, 0) == BoxPolynomial.of(1, 2)
        assert BoxPolynomial.of(0, 0).is_zero
        assert BoxPolynomial.of(0, 0).degree == -1

    def test_horner_evaluation(self):
        p = BoxPolynomial.of(1, -2, 3)
        t = np.array([0.0, 0.5, 2.0])
        np.testing.assert_allclose(p(t), 1 - 2 * t + 3 * t**2)

    def test_times_t_and_conjugate(self):
        p = BoxPolynomial.of(1j, 2)
        assert p.times_t().coeffs == (0j, 1j, 2 + 0j)
        assert p.conjugate().coeffs == (-1j, 2 + 0j)
        assert p.constant == 1j


class TestFilterSpec:
    def test_requires_kernel_tag(self, grid):
        with pytest.raises(KernelInvariantError):
            FilterSpec(BoxPolynomial.of(1), GridKernel(grid, np.eye(8)))


class TestRkhsFiniteSignal:
    def test_duplicate_centers_rejected(self, grid):
        K = GridKernel(grid, np.eye(8), KernelTag.kernel)
        with pytest.raises(ExpansionError):
            RkhsFiniteSignal((1, 1), (1.0, 2.0), K)

    def test_length_mismatch_rejected(self, grid):
        K = GridKernel(grid, np.eye(8), KernelTag.kernel)
        with pytest.raises(ExpansionError):
            RkhsFiniteSignal((1, 2), (1.0,), K)

    def test_center_outside_grid(self, grid):
        K = GridKernel(grid, np.eye(8), KernelTag.kernel)
        with pytest.raises(GridError):
            RkhsFiniteSignal((8,), (1.0,), K)


class TestFilterModel:
    def test_abscissae_outside_domain(self):
        with pytest.raises(FitError):
            FilterModel(np.array([1.5]), np.array([1.0]), get_entry("min"))

    def test_negative_reg(self):
        with pytest.raises(FitError):
            FilterModel(
                np.array([0.5]), np.array([1.0]), get_entry("min"), reg=-1
            )

    def test_q(self):
        model = FilterModel(
            np.array([0.5, 0.25]), np.array([1.0, 2.0]), get_entry("min")
        )
        assert model.q == 2


class TestBandReport:
    def test_bands(self):
        report = BandReport(
            B=1,
            size=3,
            coefficients=np.array([3.0, 4.0, 0.0, 1.0]),
            low_energy=9.0,
            mid_energy=16.0,
            tail_energy=1.0,
        )
        assert [report.band_of(i) for i in range(4)] == [
            "low",
            "mid",
            "mid",
            "tail",
        ]
        assert report.total_energy == 26.0
