"""Tests for bandlimitation checks, band reports and coefficient design."""

import numpy as np
import pytest

from boxkernel.core.exceptions import DesignError, SpectralError
from boxkernel.core.models import (
    BoxPolynomial,
    FilterSpec,
    KernelTag,
    RkhsFiniteSignal,
    Signal,
)
from boxkernel.ops import filtering, kernel, localize, rkhs, spectral
from boxkernel.ops.grid import make_grid
from boxkernel.sources.catalog import get_entry


def _min_kernel(n):
    return kernel.sample(get_entry("min"), make_grid(0, 1, n), KernelTag.kernel)


@pytest.fixture(scope="module")
def min256():
    K = _min_kernel(256)
    return K, spectral.decompose(K)


def test_eigenfunction_is_bandlimited(min256):
    _, dec = min256
    report = localize.bandlimit_check(dec.eigenfunction(1), dec, 2)
    assert report.passed
    assert report.norm == pytest.approx(1.0)


def test_kernel_section_is_not_bandlimited():
    K = _min_kernel(32)
    dec = spectral.decompose(K)
    f = rkhs.kernel_section(K, 31)
    for B in range(dec.m):
        assert not localize.bandlimit_check(f, dec, B, tol=1e-6).passed


def test_bandlimit_rejects_bad_B(min256):
    _, dec = min256
    with pytest.raises(SpectralError):
        localize.bandlimit_check(Signal.zeros(dec.grid), dec, dec.m + 1)


def test_closed_form_matches_quadrature(min256):
    K, dec = min256
    fs = RkhsFiniteSignal((10, 80, 200), (1.0, -0.5j, 2.0), K)
    closed = localize.fourier_closed_form(fs, dec)
    quadrature = spectral.project(dec, rkhs.expand(fs.centers, fs.coeffs, K))
    np.testing.assert_allclose(closed, quadrature, atol=1e-10)


def test_band_energies_partition_total(min256):
    K, dec = min256
    fs = RkhsFiniteSignal((10, 80, 200, 230), (1.0, 1.0, -1.0, 0.5), K)
    report = localize.uncertainty_residuals(fs, dec, 2)
    total = np.sum(np.abs(localize.fourier_closed_form(fs, dec)) ** 2)
    assert report.total_energy == pytest.approx(total)
    assert report.size == 4
    assert report.band_of(1) == "low"
    assert report.band_of(3) == "mid"
    assert report.band_of(4) == "tail"
    assert report.tail_energy > 0


def test_design_meets_targets(min256):
    K, dec = min256
    centers = [20, 60, 120, 180, 240]
    targets = np.array([0.1, -0.05])
    result = localize.design_coeffs(centers, dec, 2, targets)
    fs = RkhsFiniteSignal(tuple(centers), tuple(result.coeffs), K)
    fhat = localize.fourier_closed_form(fs, dec)
    np.testing.assert_allclose(fhat[:2], targets, atol=1e-10)
    assert result.rank == 2


def test_design_mid_energy_nonincreasing_over_nested_centers(min256):
    _, dec = min256
    rng = np.random.default_rng(2)
    pool = [int(c) for c in rng.choice(256, size=7, replace=False)]
    B = 3
    targets = rng.standard_normal(B)
    energies = [
        localize.design_coeffs(pool[:size], dec, B, targets, band_end=B + 4).mid_energy
        for size in range(B + 1, B + 5)
    ]
    for earlier, later in zip(energies, energies[1:]):
        assert later <= earlier * (1 + 1e-9) + 1e-30


def test_design_rank_deficient(min256):
    _, dec = min256
    with pytest.raises(DesignError) as info:
        # repeated center: two identical constraint columns
        localize.design_coeffs([50, 50], dec, 2, [1.0, 1.0])
    assert info.value.rank == 1


def test_design_rejects_B_above_centers(min256):
    _, dec = min256
    with pytest.raises(SpectralError):
        localize.design_coeffs([5, 9], dec, 3, [1.0, 1.0, 1.0])


def test_spectral_response_recovers_filter(min256):
    K, dec = min256
    p = BoxPolynomial.of(0.5, 2.0, -1.0)
    spec = FilterSpec(p, K)
    v = 128
    alpha = filtering.q_expansion(spec, v)
    response = localize.spectral_response(alpha, range(K.grid.n), dec, v)
    expected = p(dec.eigenvalues)
    sigma_ok = np.abs(dec.modes[v]) > 1e-3
    np.testing.assert_allclose(
        response.values[sigma_ok], expected[sigma_ok], rtol=1e-6
    )


def test_spectral_response_marks_vanishing_modes():
    grid = make_grid(-1, 1, 65)
    K = kernel.sample(get_entry("gaussian", {"sigma": 0.5}), grid, KernelTag.kernel)
    dec = spectral.decompose(K, 4)
    center = 32
    assert abs(grid.nodes[center]) < 1e-15
    response = localize.spectral_response([1.0], [10], dec, center)
    assert response.valid[0]
    assert not response.valid[1]
    assert np.isnan(response.values[1])
