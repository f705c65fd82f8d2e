"""CLI entry point for the boxkernel tool.

This module is the composition root of the application.  It is the only
place that turns a configuration file into an :class:`Experiment`, picks
the service for a subcommand and writes its files.  Services and ops never
touch the filesystem or the console.
"""

import dataclasses
import functools
import json
import sys
import time
from collections.abc import Callable
from pathlib import Path

# Ensure UTF-8 output on Windows where stdout may default to cp1252.
if hasattr(sys.stdout, "reconfigure"):
    sys.stdout.reconfigure(encoding="utf-8", errors="replace")
if hasattr(sys.stderr, "reconfigure"):
    sys.stderr.reconfigure(encoding="utf-8", errors="replace")

import typer
from rich.console import Console
from rich.table import Table

from boxkernel import config as config_mod
from boxkernel.config import RunConfig
from boxkernel.core.exceptions import (
    BoxkernelError,
    ConfigError,
    NumericalInvariantError,
)
from boxkernel.csvio import write_csv
from boxkernel.logs import configure_logging
from boxkernel.services.experiment import Experiment, ServiceResult
from boxkernel.services.filter_service import FilterService
from boxkernel.services.fit_service import FitService
from boxkernel.services.fourier_service import FourierService
from boxkernel.services.graphon_service import GraphonService
from boxkernel.services.localize_service import LocalizeService
from boxkernel.services.spectrum_service import SpectrumService
from boxkernel.services.verify_service import VerifyService

EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

app = typer.Typer(add_completion=False)

console = Console(legacy_windows=False)

_verbose: bool = False


@app.callback()
def _main_callback(
    verbose: bool = typer.Option(
        False,
        "--verbose",
        "-v",
        help="Log progress and print the elapsed time.",
    ),
) -> None:
    """Boxkernel: filtering with integral operators through RKHS."""
    global _verbose
    _verbose = verbose
    configure_logging(verbose)


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _print_footer(elapsed: float) -> None:
    """Print elapsed time.  Only prints when ``--verbose`` is active."""
    if not _verbose:
        return
    console.print(f"\n[dim]{elapsed:.1f}s[/dim]")


def _timed(func):
    """Decorator that prints elapsed time after a command."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        try:
            return func(*args, **kwargs)
        finally:
            _print_footer(time.perf_counter() - t0)

    return wrapper


def _fail(kind: str, code: int, message: str) -> None:
    """Print the human message and the JSON error line, then exit."""
    console.print(f"[red]Error:[/red] {message}", highlight=False)
    typer.echo(
        json.dumps({"error": kind, "code": code, "message": message}),
        err=True,
    )
    raise typer.Exit(code)


def _summary_table(command: str, result: ServiceResult, written: list[Path]):
    table = Table(title=f"{command}", show_header=True, header_style="bold")
    table.add_column("Key")
    table.add_column("Value", justify="right")
    for key, value in result.summary.items():
        if isinstance(value, float):
            value = f"{value:.6g}"
        table.add_row(str(key), str(value))
    table.add_row("files", ", ".join(p.name for p in written))
    return table


def _verify_table(result: ServiceResult) -> Table:
    table = Table(title="verify", show_header=True, header_style="bold")
    table.add_column("Property")
    table.add_column("Value", justify="right")
    table.add_column("Threshold", justify="right")
    table.add_column("Result")
    for row in result.outputs[0].rows:
        state = "[green]pass[/green]" if row["passed"] else "[red]FAIL[/red]"
        table.add_row(
            row["property"],
            f"{row['value']:.3g}",
            f"{row['threshold']:.3g}",
            state,
        )
    return table


def _execute(
    command: str,
    config_path: Path | None,
    out: Path | None,
    tol: float | None,
    build: Callable[[Experiment], ServiceResult],
    adjust: Callable[[RunConfig], RunConfig] | None = None,
) -> None:
    """Load the config, run one service, write its files and report.

    Args:
        command: Subcommand name; selects the config block ``--tol`` hits.
        config_path: JSON run configuration, or ``None`` for defaults.
        out: Output directory overriding ``output_dir``.
        tol: Tolerance overriding the block's ``tol``.
        build: Runs the service on the resolved experiment.
        adjust: Optional extra flag overrides applied to the config.
    """
    try:
        cfg = config_mod.load(config_path).with_overrides(
            command, None if out is None else str(out), tol
        )
        if adjust is not None:
            cfg = adjust(cfg)
        out_dir = Path(cfg.output_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "run.json").write_text(cfg.dumps(), encoding="utf-8")
        result = build(Experiment(cfg))
    except ConfigError as e:
        _fail("config", EXIT_CONFIG, str(e))
    except NumericalInvariantError as e:
        _fail("numerical", EXIT_NUMERICAL, str(e))
    except BoxkernelError as e:
        _fail(type(e).__name__, EXIT_ERROR, str(e))
    except OSError as e:
        _fail("io", EXIT_ERROR, str(e))

    written = [
        write_csv(out_dir / o.name, o.rows, o.fields) for o in result.outputs
    ]
    if command == "verify":
        console.print(_verify_table(result))
    console.print(_summary_table(command, result, written))
    if not result.passed:
        _fail("numerical", EXIT_NUMERICAL, "; ".join(result.failures))


# ---------------------------------------------------------------------------
# Shared options
# ---------------------------------------------------------------------------

_CONFIG = typer.Option(
    None, "--config", "-c", help="JSON run configuration."
)
_OUT = typer.Option(None, "--out", "-o", help="Output directory.")
_TOL = typer.Option(None, "--tol", help="Override the command's tolerance.")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


@app.command()
@_timed
def spectrum(
    config: Path | None = _CONFIG,
    out: Path | None = _OUT,
    tol: float | None = _TOL,
) -> None:
    """Decompose the configured function and export eigenvalues and modes."""
    _execute(
        "spectrum",
        config,
        out,
        tol,
        lambda exp: SpectrumService(exp).run(exp.config.spectrum.m),
    )


@app.command("filter")
@_timed
def filter_(
    config: Path | None = _CONFIG,
    out: Path | None = _OUT,
    tol: float | None = _TOL,
    check_equivalence: bool = typer.Option(
        False,
        "--check-equivalence",
        help="Also run the point-wise RKHS filter and report the deviation.",
    ),
) -> None:
    """Apply a box-polynomial filter to the configured signal."""

    def adjust(cfg: RunConfig) -> RunConfig:
        if not check_equivalence:
            return cfg
        return dataclasses.replace(
            cfg,
            filter=dataclasses.replace(cfg.filter, check_equivalence=True),
        )

    _execute(
        "filter",
        config,
        out,
        tol,
        lambda exp: FilterService(exp).run(exp.config.filter),
        adjust,
    )


@app.command()
@_timed
def fourier(
    config: Path | None = _CONFIG,
    out: Path | None = _OUT,
    tol: float | None = _TOL,
) -> None:
    """Graphon Fourier coefficients of kernel sections of ``W box W``."""
    _execute(
        "fourier",
        config,
        out,
        tol,
        lambda exp: FourierService(exp).run(exp.config.fourier),
    )


@app.command()
@_timed
def graphon(
    config: Path | None = _CONFIG,
    out: Path | None = _OUT,
    tol: float | None = _TOL,
) -> None:
    """Induced kernels of a graphon and the square-relation report."""
    _execute(
        "graphon",
        config,
        out,
        tol,
        lambda exp: GraphonService(exp).run(exp.config.graphon),
    )


@app.command()
@_timed
def localize(
    config: Path | None = _CONFIG,
    out: Path | None = _OUT,
    tol: float | None = _TOL,
) -> None:
    """Band energies and low-band coefficient design."""
    _execute(
        "localize",
        config,
        out,
        tol,
        lambda exp: LocalizeService(exp).run(exp.config.localize),
    )


@app.command()
@_timed
def fit(
    config: Path | None = _CONFIG,
    out: Path | None = _OUT,
    tol: float | None = _TOL,
) -> None:
    """Fit a representer filter to a Gaussian bump on the spectrum."""
    _execute(
        "fit",
        config,
        out,
        tol,
        lambda exp: FitService(exp).run(exp.config.fit),
    )


@app.command()
@_timed
def verify(
    config: Path | None = _CONFIG,
    out: Path | None = _OUT,
    tol: float | None = _TOL,
) -> None:
    """Run the invariant suite and print pass/fail per property."""
    _execute(
        "verify",
        config,
        out,
        tol,
        lambda exp: VerifyService(exp).run(exp.config.verify),
    )


if __name__ == "__main__":
    app()
