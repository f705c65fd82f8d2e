"""Tests for the midpoint grid and the discrete L2 inner product."""

import numpy as np
import pytest

from boxkernel.core.exceptions import GridError
from boxkernel.core.models import Signal
from boxkernel.ops.grid import (
    check_index,
    inner_l2,
    l2_norm,
    make_grid,
    nearest_index,
    same_grid,
)


def test_make_grid_rejects_fractional_n():
    with pytest.raises(GridError):
        make_grid(0, 1, 2.5)


def test_make_grid_rejects_single_node():
    with pytest.raises(GridError):
        make_grid(0, 1, 1)


def test_quadrature_of_polynomial():
    grid = make_grid(0, 1, 200)
    f = Signal.from_function(grid, lambda u: u**2)
    one = Signal(grid, np.ones(grid.n))
    # midpoint rule error for u^2 is h^2 / 12
    assert inner_l2(f, one).real == pytest.approx(1 / 3, abs=1e-5)


def test_inner_product_conjugates_second_argument():
    grid = make_grid(0, 1, 4)
    f = Signal(grid, np.full(4, 1j))
    g = Signal(grid, np.ones(4))
    assert inner_l2(f, g) == pytest.approx(1j)
    assert inner_l2(g, f) == pytest.approx(-1j)


def test_inner_product_is_linear_in_first_argument():
    grid = make_grid(0, 1, 16)
    rng = np.random.default_rng(3)
    f, g, h = (
        Signal(grid, rng.standard_normal(16) + 1j * rng.standard_normal(16))
        for _ in range(3)
    )
    a, b = 2 - 1j, -0.5 + 3j
    assert inner_l2(f * a + g * b, h) == pytest.approx(
        a * inner_l2(f, h) + b * inner_l2(g, h), abs=1e-12
    )


def test_l2_norm_of_constant():
    grid = make_grid(-1, 1, 10)
    assert l2_norm(Signal(grid, 3 * np.ones(10))) == pytest.approx(
        3 * np.sqrt(2)
    )


def test_grid_mismatch_raises():
    a = Signal.zeros(make_grid(0, 1, 4))
    b = Signal.zeros(make_grid(0, 2, 4))
    with pytest.raises(GridError):
        inner_l2(a, b)
    with pytest.raises(GridError):
        same_grid(a, b)


@pytest.mark.parametrize(
    "position, expected", [(0.0, 0), (0.3, 1), (0.5, 1), (1.0, 3)]
)
def test_nearest_index(position, expected):
    # nodes 0.125, 0.375, 0.625, 0.875; 0.5 is a tie and goes low
    assert nearest_index(make_grid(0, 1, 4), position) == expected


def test_nearest_index_outside_interval():
    with pytest.raises(GridError):
        nearest_index(make_grid(0, 1, 4), 1.5)


def test_check_index():
    grid = make_grid(0, 1, 4)
    assert check_index(grid, 3) == 3
    with pytest.raises(GridError):
        check_index(grid, 4)
    with pytest.raises(GridError):
        check_index(grid, -1)
