"""Tests for Nyström decomposition, closed-form spectra and reconstruction."""

import numpy as np
import pytest

from boxkernel.core.exceptions import GridError, KernelInvariantError, SpectralError
from boxkernel.core.models import GridKernel, KernelTag, Signal, SpectrumKind
from boxkernel.ops import kernel, spectral
from boxkernel.ops.grid import make_grid
from boxkernel.sources.catalog import get_entry


def _graphon(name, n):
    return kernel.sample(get_entry(name), make_grid(0, 1, n), KernelTag.graphon)


@pytest.fixture(scope="module")
def min512():
    W = _graphon("min", 512)
    return W, spectral.decompose(W)


def test_min_eigenvalues_match_closed_form(min512):
    W, dec = min512
    for i in range(1, 6):
        exact, _ = spectral.min_graphon_oracle(i, W.grid)
        assert dec.eigenvalues[i - 1] == pytest.approx(exact, rel=1e-3)


def test_min_eigenfunctions_match_closed_form(min512):
    W, dec = min512
    for i in range(1, 4):
        _, phi = spectral.min_graphon_oracle(i, W.grid)
        np.testing.assert_allclose(
            dec.eigenfunction(i - 1).values, phi.values, atol=1e-3
        )


def test_modes_are_orthonormal_in_quadrature(min512):
    W, dec = min512
    gram = dec.modes.conj().T @ (W.grid.weights[:, None] * dec.modes)
    np.testing.assert_allclose(gram, np.eye(dec.m), atol=1e-10)


def test_sign_convention_first_component_positive(min512):
    _, dec = min512
    assert np.all(dec.modes[0, :10].real > 0)
    np.testing.assert_array_equal(dec.modes[0, :10].imag, 0)


def test_default_kind_follows_tag(min512):
    W, dec = min512
    assert dec.kind is SpectrumKind.graphon
    assert spectral.decompose(kernel.retag(W, "kernel"), 3).kind is SpectrumKind.kernel


def test_truncated_decomposition(min512):
    W, dec = min512
    top = spectral.decompose(W, 4)
    assert top.m == 4
    np.testing.assert_allclose(top.eigenvalues, dec.eigenvalues[:4])


@pytest.mark.parametrize("m", [0, 513, 2.5, "some"])
def test_invalid_m(min512, m):
    W, _ = min512
    with pytest.raises(SpectralError):
        spectral.decompose(W, m)


def test_non_hermitian_rejected():
    S = kernel.sample(get_entry("sine"), make_grid(0, 1, 32))
    with pytest.raises(KernelInvariantError):
        spectral.decompose(S)


def test_negative_spectrum_rejected_for_kernel_kind():
    grid = make_grid(0, 1, 8)
    K = GridKernel(grid, -np.eye(8), KernelTag.kernel)
    with pytest.raises(SpectralError):
        spectral.decompose(K)


def test_graphon_kind_orders_by_magnitude():
    grid = make_grid(0, 1, 4)
    M = np.diag([0.1, -0.5, 0.3, 0.0]) / grid.weights
    dec = spectral.decompose(GridKernel(grid, M), kind="graphon")
    np.testing.assert_allclose(dec.eigenvalues, [-0.5, 0.3, 0.1, 0.0], atol=1e-15)


@pytest.mark.parametrize("name", ["min", "min_bridge", "one_minus_max"])
def test_closed_form_pairs_are_eigenpairs(name):
    W = _graphon(name, 512)
    for i in (1, 2, 3):
        lam, phi = spectral.closed_form_pair(name, i, W.grid)
        applied = W.matrix @ (W.grid.weights * phi.values)
        np.testing.assert_allclose(applied, lam * phi.values, atol=2e-5)


def test_closed_form_requires_unit_interval():
    with pytest.raises(GridError):
        spectral.closed_form_pair("min", 1, make_grid(0, 2, 8))


def test_closed_form_unknown_name():
    with pytest.raises(SpectralError):
        spectral.closed_form_pair("gaussian", 1, make_grid(0, 1, 8))


def test_mercer_error_decreases(min512):
    W, dec = min512
    errors = [
        np.max(np.abs(spectral.mercer_reconstruct(dec, r).matrix - W.matrix))
        for r in (1, 2, 5, 10)
    ]
    assert all(b < a for a, b in zip(errors, errors[1:]))
    assert errors[-1] < 0.025


def test_mercer_full_reconstruction_is_exact():
    W = _graphon("min", 64)
    dec = spectral.decompose(kernel.retag(W, "kernel"))
    K = spectral.mercer_reconstruct(dec, dec.m)
    assert K.tag is KernelTag.kernel
    np.testing.assert_allclose(K.matrix, W.matrix, atol=1e-12)


def test_mercer_graphon_kind_tagged_symbol(min512):
    _, dec = min512
    assert spectral.mercer_reconstruct(dec, 3).tag is KernelTag.symbol


def test_sqrt_symbol_squares_back():
    W = _graphon("min", 64)
    K = kernel.retag(W, "kernel")
    S = spectral.sqrt_symbol(spectral.decompose(K))
    np.testing.assert_allclose(
        kernel.box_product(S, S).matrix, K.matrix, atol=1e-12
    )


def test_project_synthesize_inverse():
    W = _graphon("min", 64)
    dec = spectral.decompose(W)
    f = Signal(W.grid, np.random.default_rng(1).standard_normal(64))
    back = spectral.synthesize(dec, spectral.project(dec, f))
    np.testing.assert_allclose(back.values, f.values, atol=1e-10)


def test_eigenvalue_clusters():
    clusters = spectral.eigenvalue_clusters(np.array([3.0, 2.0, 2.0, 1.0]))
    assert [c.tolist() for c in clusters] == [[0], [1, 2], [3]]


def test_eigenspace_angles_of_same_decomposition_vanish(min512):
    _, dec = min512
    angles = spectral.eigenspace_angles(dec, dec, 5)
    np.testing.assert_allclose(angles, 0, atol=1e-6)
