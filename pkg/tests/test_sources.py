"""Tests for the closed-form kernel catalog and CSV kernel tables."""

import numpy as np
import pytest

from boxkernel.core.exceptions import ConfigError, KernelInvariantError
from boxkernel.csvio import write_kernel_table
from boxkernel.ops.grid import make_grid
from boxkernel.sources.catalog import catalog_names, get_entry
from boxkernel.sources.table import TableKernel


def test_catalog_lists_every_entry():
    assert catalog_names() == sorted(
        [
            "average",
            "constant",
            "cosine",
            "gaussian",
            "laplace",
            "linear",
            "min",
            "min_bridge",
            "one_minus_max",
            "periodic",
            "poly2",
            "row",
            "sinc",
            "sine",
        ]
    )


@pytest.mark.parametrize(
    "name, u, v, expected",
    [
        ("min", 0.3, 0.7, 0.3),
        ("min_bridge", 0.3, 0.7, 0.3 * 0.3),
        ("one_minus_max", 0.3, 0.7, 0.3),
        ("average", 0.2, 0.6, 0.4),
        ("poly2", 0.5, 0.5, 1.5625),
        ("row", 0.25, 0.9, 0.25),
        ("cosine", 1.0, 1.0, 1.0),
        ("sine", 0.0, np.pi / 2, -1.0),
        ("gaussian", 0.0, 0.1, np.exp(-0.5)),
        ("laplace", 0.0, 1.0, np.exp(-1.0)),
        ("periodic", 0.0, 1.0, 1.0),
        ("sinc", 0.0, 0.0, 1.0),
    ],
)
def test_entry_values(name, u, v, expected):
    assert float(get_entry(name).evaluate(u, v)) == pytest.approx(expected)


def test_params_override_defaults():
    k = get_entry("gaussian", {"sigma": 0.5})
    assert k.params == {"sigma": 0.5}
    assert float(k.evaluate(0.0, 0.5)) == pytest.approx(np.exp(-0.5))


def test_unknown_name():
    with pytest.raises(ConfigError, match="unknown kernel"):
        get_entry("matern")


def test_unknown_parameter():
    with pytest.raises(ConfigError):
        get_entry("min", {"sigma": 1.0})


@pytest.mark.parametrize("value", [0, -1.0, float("nan"), "wide"])
def test_parameter_must_be_positive_number(value):
    with pytest.raises(ConfigError):
        get_entry("laplace", {"sigma": value})


def test_reproducing_flags():
    assert get_entry("min").is_reproducing
    assert not get_entry("sine").is_reproducing
    assert not get_entry("average").is_reproducing


def test_domain_and_contains():
    k = get_entry("min")
    assert k.domain == (0.0, 1.0)
    np.testing.assert_array_equal(k.contains([-0.1, 0.5, 1.0]), [False, True, True])
    assert get_entry("gaussian").contains([1e6]).all()


def test_sample_constant_broadcasts():
    grid = make_grid(0, 1, 5)
    M = get_entry("constant").sample(grid)
    assert M.shape == (5, 5)
    assert np.all(M == 1)


def test_table_round_trip(tmp_path):
    grid = make_grid(0, 1, 6)
    M = get_entry("min").sample(grid) + 1j * np.eye(6)
    path = write_kernel_table(tmp_path / "k.csv", M)
    table = TableKernel.from_csv(path)
    np.testing.assert_array_equal(table.sample(grid), M)
    assert table.name == "k.csv"


def test_table_grid_size_mismatch(tmp_path):
    path = write_kernel_table(tmp_path / "k.csv", np.eye(4))
    with pytest.raises(KernelInvariantError, match="shape"):
        TableKernel.from_csv(path).sample(make_grid(0, 1, 5))


def test_table_domain_mismatch():
    table = TableKernel(np.eye(4), domain=(0, 1))
    with pytest.raises(KernelInvariantError):
        table.sample(make_grid(-1, 1, 4))


def test_table_must_be_square():
    with pytest.raises(KernelInvariantError):
        TableKernel(np.ones((3, 4)))


def test_table_unreadable_entry(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1,2\nx,4\n", encoding="utf-8")
    with pytest.raises(KernelInvariantError):
        TableKernel.from_csv(path)
