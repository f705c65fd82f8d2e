"""Unit tests for CLI commands.

All tests use Typer's CliRunner with small grids written to ``tmp_path``.
"""

import json
from unittest.mock import patch

import numpy as np
import pytest
from typer.testing import CliRunner

from boxkernel.core.exceptions import FitError
from boxkernel_cli.main import EXIT_CONFIG, EXIT_ERROR, EXIT_NUMERICAL, app

runner = CliRunner()


# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------


@pytest.fixture()
def write_config(tmp_path):
    def write(**blocks):
        path = tmp_path / "config.json"
        data = {"version": 1, "grid": {"n": 32}, **blocks}
        path.write_text(json.dumps(data), encoding="utf-8")
        return path

    return write


@pytest.fixture()
def out_dir(tmp_path):
    return tmp_path / "out"


def _invoke(*args):
    return runner.invoke(app, [str(a) for a in args])


def _error_line(output):
    """The JSON error record printed on failure."""
    for line in output.splitlines():
        if line.startswith("{"):
            return json.loads(line)
    raise AssertionError(f"no JSON error line in {output!r}")


# ---------------------------------------------------------------------------
# spectrum command
# ---------------------------------------------------------------------------


def test_spectrum_writes_files(write_config, out_dir):
    result = _invoke("spectrum", "-c", write_config(), "-o", out_dir)
    assert result.exit_code == 0, result.output
    lines = (out_dir / "spectrum.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == "index,eigenvalue"
    assert len(lines) == 11
    assert (out_dir / "modes.csv").exists()


def test_spectrum_min_leading_eigenvalue(write_config, out_dir):
    result = _invoke("spectrum", "-c", write_config(grid={"n": 512}), "-o", out_dir)
    assert result.exit_code == 0
    first = (out_dir / "spectrum.csv").read_text(encoding="utf-8").splitlines()[1]
    index, value = first.split(",")
    assert index == "1"
    assert float(value) == pytest.approx(4 / np.pi**2, rel=1e-4)


def test_spectrum_records_resolved_config(write_config, out_dir):
    _invoke("spectrum", "-c", write_config(seed=7), "-o", out_dir)
    run = json.loads((out_dir / "run.json").read_text(encoding="utf-8"))
    assert run["seed"] == 7
    assert run["output_dir"] == str(out_dir)
    assert run["grid"]["n"] == 32


def test_spectrum_rejects_tol(write_config, out_dir):
    result = _invoke("spectrum", "-c", write_config(), "-o", out_dir, "--tol", "1e-3")
    assert result.exit_code == EXIT_CONFIG
    assert _error_line(result.output)["error"] == "config"


def test_spectrum_is_deterministic(write_config, tmp_path):
    path = write_config(kernel={"name": "gaussian"})
    _invoke("spectrum", "-c", path, "-o", tmp_path / "a")
    _invoke("spectrum", "-c", path, "-o", tmp_path / "b")
    for name in ("spectrum.csv", "modes.csv", "run.json"):
        a = (tmp_path / "a" / name).read_text(encoding="utf-8")
        b = (tmp_path / "b" / name).read_text(encoding="utf-8")
        if name == "run.json":
            a = a.replace(str(tmp_path / "a"), "")
            b = b.replace(str(tmp_path / "b"), "")
        assert a == b


# ---------------------------------------------------------------------------
# Configuration errors
# ---------------------------------------------------------------------------


def test_missing_version(tmp_path, out_dir):
    path = tmp_path / "config.json"
    path.write_text("{}", encoding="utf-8")
    result = _invoke("spectrum", "-c", path, "-o", out_dir)
    assert result.exit_code == EXIT_CONFIG
    record = _error_line(result.output)
    assert record["code"] == EXIT_CONFIG
    assert "version" in record["message"]


def test_unknown_key(write_config, out_dir):
    result = _invoke("fit", "-c", write_config(fit={"lambda": 1}), "-o", out_dir)
    assert result.exit_code == EXIT_CONFIG
    assert "fit.lambda" in _error_line(result.output)["message"]


def test_missing_config_file(tmp_path, out_dir):
    result = _invoke("spectrum", "-c", tmp_path / "absent.json", "-o", out_dir)
    assert result.exit_code == EXIT_CONFIG


def test_unknown_kernel(write_config, out_dir):
    result = _invoke("spectrum", "-c", write_config(kernel={"name": "nope"}), "-o", out_dir)
    assert result.exit_code == EXIT_CONFIG


# ---------------------------------------------------------------------------
# filter command
# ---------------------------------------------------------------------------


def test_filter_check_equivalence(write_config, out_dir):
    result = _invoke("filter", "-c", write_config(), "-o", out_dir, "--check-equivalence")
    assert result.exit_code == 0, result.output
    header = (out_dir / "filtered.csv").read_text(encoding="utf-8").splitlines()[0]
    assert header.endswith("deviation")
    assert (out_dir / "bank.csv").exists()
    assert (out_dir / "signal.csv").exists()


def test_filter_failed_check_exits_numerical(write_config, out_dir):
    result = _invoke(
        "filter",
        "-c",
        write_config(),
        "-o",
        out_dir,
        "--check-equivalence",
        "--tol",
        "1e-300",
    )
    assert result.exit_code == EXIT_NUMERICAL
    assert _error_line(result.output)["error"] == "numerical"
    # files are still written before the failure is reported
    assert (out_dir / "filtered.csv").exists()


def test_filter_without_check(write_config, out_dir):
    result = _invoke("filter", "-c", write_config(), "-o", out_dir)
    assert result.exit_code == 0
    header = (out_dir / "filtered.csv").read_text(encoding="utf-8").splitlines()[0]
    assert header == "node,re,im"


def test_filter_malformed_signal_csv(write_config, tmp_path, out_dir):
    bad = tmp_path / "signal.csv"
    rows = [f"{k},{'abc' if k == 5 else 1.0},0" for k in range(32)]
    bad.write_text("node,re,im\n" + "\n".join(rows) + "\n", encoding="utf-8")
    path = write_config(filter={"signal": {"type": "csv", "path": str(bad)}})
    result = _invoke("filter", "-c", path, "-o", out_dir)
    assert result.exit_code == EXIT_ERROR
    record = _error_line(result.output)
    assert record["error"] == "GridError"
    assert "unreadable entry" in record["message"]


def test_filter_signal_path_not_a_string(write_config, out_dir):
    path = write_config(filter={"signal": {"type": "csv", "path": 5}})
    result = _invoke("filter", "-c", path, "-o", out_dir)
    assert result.exit_code == EXIT_CONFIG
    assert "filter.signal.path" in _error_line(result.output)["message"]


def test_fourier_center_outside_grid(write_config, out_dir):
    path = write_config(fourier={"centers": [1.5], "coeffs": [1.0]})
    result = _invoke("fourier", "-c", path, "-o", out_dir)
    assert result.exit_code == EXIT_CONFIG
    assert "fourier.centers[0]" in _error_line(result.output)["message"]


# ---------------------------------------------------------------------------
# Other commands
# ---------------------------------------------------------------------------


def test_fourier(write_config, out_dir):
    result = _invoke("fourier", "-c", write_config(grid={"n": 128}), "-o", out_dir)
    assert result.exit_code == 0, result.output
    assert (out_dir / "kv_fourier.csv").exists()
    assert (out_dir / "expansion.csv").exists()


def test_graphon_digraphon(write_config, out_dir):
    path = write_config(kernel={"name": "row"}, graphon={"digraphon": True})
    result = _invoke("graphon", "-c", path, "-o", out_dir)
    assert result.exit_code == 0, result.output
    text = (out_dir / "digraphon.csv").read_text(encoding="utf-8")
    assert "passed,true" in text


def test_localize(write_config, out_dir):
    result = _invoke("localize", "-c", write_config(), "-o", out_dir)
    assert result.exit_code == 0, result.output
    assert (out_dir / "bands.csv").exists()
    assert (out_dir / "design.csv").exists()


def test_fit(write_config, out_dir):
    result = _invoke("fit", "-c", write_config(fit={"q": 10}), "-o", out_dir)
    assert result.exit_code == 0, result.output
    lines = (out_dir / "fit_report.csv").read_text(encoding="utf-8").splitlines()
    assert len(lines) == 11


def test_fit_error_maps_to_exit_one(write_config, out_dir):
    with patch("boxkernel_cli.main.FitService") as service:
        service.return_value.run.side_effect = FitError("singular Gram matrix")
        result = _invoke("fit", "-c", write_config(), "-o", out_dir)
    assert result.exit_code == EXIT_ERROR
    record = _error_line(result.output)
    assert record["error"] == "FitError"
    assert record["message"] == "singular Gram matrix"


def test_verify_subset(write_config, out_dir):
    path = write_config(verify={"properties": ["determinism"]})
    result = _invoke("verify", "-c", path, "-o", out_dir)
    assert result.exit_code == 0, result.output
    assert "determinism_mismatch" in result.output
    lines = (out_dir / "verify.csv").read_text(encoding="utf-8").splitlines()
    assert lines == ["property,value,threshold,passed", "determinism_mismatch,0,0,true"]


def test_verify_is_deterministic(write_config, tmp_path):
    path = write_config(verify={"properties": ["min_spectrum", "determinism"]})
    for name in ("a", "b"):
        result = _invoke("verify", "-c", path, "-o", tmp_path / name)
        assert result.exit_code == 0, result.output
    for name in ("verify.csv", "run.json"):
        a = (tmp_path / "a" / name).read_text(encoding="utf-8")
        b = (tmp_path / "b" / name).read_text(encoding="utf-8")
        if name == "run.json":
            a = a.replace(str(tmp_path / "a"), "")
            b = b.replace(str(tmp_path / "b"), "")
        assert a == b


def test_verify_unknown_property(write_config, out_dir):
    path = write_config(verify={"properties": ["speed"]})
    result = _invoke("verify", "-c", path, "-o", out_dir)
    assert result.exit_code == EXIT_CONFIG


def test_verbose_flag(write_config, out_dir):
    result = _invoke("-v", "spectrum", "-c", write_config(), "-o", out_dir)
    assert result.exit_code == 0
