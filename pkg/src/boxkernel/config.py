"""Run configuration: strict JSON parsing into frozen dataclasses.

Every block has defaults, so ``{"version": 1}`` is a complete
configuration.  Unknown keys at any level are rejected with their dotted
path.
"""

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from boxkernel.core.exceptions import ConfigError

CONFIG_VERSION = 1

_ROLES = ("symbol", "graphon", "kernel")
_SIGNAL_TYPES = ("range", "random", "mode", "csv")


# ---------------------------------------------------------------------------
# Blocks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GridConfig:
    lo: float = 0.0
    hi: float = 1.0
    n: int = 256


@dataclass(frozen=True)
class KernelConfig:
    """Catalog entry by ``name`` and ``params``, or a CSV ``table`` path."""

    name: str = "min"
    params: dict = field(default_factory=dict)
    table: str | None = None


@dataclass(frozen=True)
class SignalConfig:
    """Input signal of the ``filter`` subcommand.

    ``range`` is ``T_K g`` for a random ``g``; ``random`` is ``g`` itself;
    ``mode`` is eigenfunction ``mode`` (1-based); ``csv`` loads ``path``.
    """

    type: str = "range"
    mode: int = 1
    path: str | None = None


@dataclass(frozen=True)
class SpectrumConfig:
    m: int | str = 10


@dataclass(frozen=True)
class FilterConfig:
    """``poly`` is ``[a0, a1, ...]``; when absent a random polynomial of
    ``degree`` is drawn from the run generator."""

    poly: list | None = None
    degree: int = 3
    check_equivalence: bool = False
    tol: float = 1e-6
    signal: SignalConfig = field(default_factory=SignalConfig)


@dataclass(frozen=True)
class FourierConfig:
    centers: list = field(default_factory=lambda: [0.2, 0.45, 0.7, 0.86])
    coeffs: list = field(default_factory=lambda: [-2.0, 1.0, -0.5, 0.2])
    sections: list = field(default_factory=lambda: [0.5])
    modes: int = 10
    tol: float = 1e-6


@dataclass(frozen=True)
class GraphonConfig:
    order: int = 1
    modes: int = 10
    trials: int = 20
    digraphon: bool = False
    tol: float = 1e-10


@dataclass(frozen=True)
class LocalizeConfig:
    centers: list = field(default_factory=lambda: [0.2, 0.45, 0.7, 0.86])
    coeffs: list = field(default_factory=lambda: [-2.0, 1.0, -0.5, 0.2])
    B: int = 2
    design_centers: list | None = None
    targets: list | None = None
    band_end: int | None = None
    tol: float = 1e-3


@dataclass(frozen=True)
class FitConfig:
    q: int = 25
    sigma_c: float = 0.05
    gamma: float = 1e-3
    reg: float = 1e-6
    design_kernel: str = "gaussian"
    design_params: dict = field(default_factory=lambda: {"sigma": 0.05})
    curve_points: int = 201
    tol: float = 1e-8


@dataclass(frozen=True)
class VerifyConfig:
    properties: list | None = None
    tol: float = 1.0
    """Scale applied to every property threshold."""


@dataclass(frozen=True)
class RunConfig:
    version: int = CONFIG_VERSION
    seed: int = 0
    output_dir: str = "out"
    role: str = "graphon"
    grid: GridConfig = field(default_factory=GridConfig)
    kernel: KernelConfig = field(default_factory=KernelConfig)
    spectrum: SpectrumConfig = field(default_factory=SpectrumConfig)
    filter: FilterConfig = field(default_factory=FilterConfig)
    fourier: FourierConfig = field(default_factory=FourierConfig)
    graphon: GraphonConfig = field(default_factory=GraphonConfig)
    localize: LocalizeConfig = field(default_factory=LocalizeConfig)
    fit: FitConfig = field(default_factory=FitConfig)
    verify: VerifyConfig = field(default_factory=VerifyConfig)

    def with_overrides(
        self,
        command: str | None = None,
        output_dir: str | None = None,
        tol: float | None = None,
    ) -> "RunConfig":
        """Return a copy with CLI flag overrides applied."""
        config = self
        if output_dir is not None:
            config = dataclasses.replace(config, output_dir=str(output_dir))
        if tol is not None and command is not None:
            block = getattr(config, command, None)
            if block is None or not hasattr(block, "tol"):
                raise ConfigError(f"--tol has no meaning for {command!r}")
            if not (math.isfinite(tol) and tol > 0):
                raise ConfigError(f"--tol must be a positive number, got {tol}")
            config = dataclasses.replace(
                config, **{command: dataclasses.replace(block, tol=float(tol))}
            )
        return config

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    def dumps(self) -> str:
        """The resolved config as sorted, indented JSON."""
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def _type_name(value: Any) -> str:
    return type(value).__name__


def _check_value(path: str, default: Any, value: Any) -> Any:
    """Validate ``value`` against the type of the field's default."""
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{path}: expected a boolean, got {_type_name(value)}")
        return value
    if isinstance(default, int) and not isinstance(default, bool):
        if path.endswith("spectrum.m") and value == "all":
            return value
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path}: expected an integer, got {value!r}")
        return value
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path}: expected a number, got {value!r}")
        if not math.isfinite(value):
            raise ConfigError(f"{path}: must be finite, got {value!r}")
        return float(value)
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError(f"{path}: expected a string, got {value!r}")
        return value
    if isinstance(default, dict):
        if not isinstance(value, dict):
            raise ConfigError(f"{path}: expected an object, got {value!r}")
        return dict(value)
    if isinstance(default, list):
        if not isinstance(value, list):
            raise ConfigError(f"{path}: expected an array, got {value!r}")
        return list(value)
    # Optional fields default to None; the block validators check them.
    return value


def _build(cls, data: Any, path: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{path or 'config'}: expected an object")
    known = {f.name: f for f in dataclasses.fields(cls)}
    for key in data:
        if key not in known:
            dotted = f"{path}.{key}" if path else key
            raise ConfigError(f"unknown config key {dotted!r}")
    defaults = cls()
    kwargs = {}
    for name, value in data.items():
        dotted = f"{path}.{name}" if path else name
        default = getattr(defaults, name)
        if dataclasses.is_dataclass(default):
            kwargs[name] = _build(type(default), value, dotted)
        else:
            kwargs[name] = _check_value(dotted, default, value)
    return cls(**kwargs)


def _positive_int(path: str, value: int, minimum: int = 1) -> None:
    if value < minimum:
        raise ConfigError(f"{path}: must be >= {minimum}, got {value}")


def _numbers(path: str, values: list | None) -> None:
    if values is None:
        return
    if not isinstance(values, list):
        raise ConfigError(f"{path}: expected an array, got {values!r}")
    for i, v in enumerate(values):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{path}[{i}]: expected a number, got {v!r}")


def _positions(
    path: str, values: list | None, grid: GridConfig, default: list | None
) -> None:
    """Positions must be numbers inside the grid interval.

    Defaults are laid out on the unit interval and are left to the command
    that uses them.
    """
    _numbers(path, values)
    if values == default:
        return
    for i, v in enumerate(values or []):
        if not grid.lo <= v <= grid.hi:
            raise ConfigError(
                f"{path}[{i}]: {v} lies outside the grid [{grid.lo}, {grid.hi}]"
            )


def _coefficients(path: str, values: list | None) -> None:
    """Coefficients are numbers or ``[re, im]`` pairs."""
    if values is None:
        return
    if not isinstance(values, list):
        raise ConfigError(f"{path}: expected an array, got {values!r}")
    for i, v in enumerate(values):
        if isinstance(v, list):
            _numbers(f"{path}[{i}]", v)
            if len(v) != 2:
                raise ConfigError(f"{path}[{i}]: expected [re, im]")
        else:
            _numbers(path, [v])


def validate(config: RunConfig) -> RunConfig:
    """Cross-field checks that the per-field type checks cannot express."""
    if config.version != CONFIG_VERSION:
        raise ConfigError(
            f"version: expected {CONFIG_VERSION}, got {config.version}"
        )
    if config.role not in _ROLES:
        raise ConfigError(f"role: must be one of {_ROLES}, got {config.role!r}")
    g = config.grid
    if g.hi <= g.lo:
        raise ConfigError(f"grid: hi must exceed lo, got [{g.lo}, {g.hi}]")
    _positive_int("grid.n", g.n, 2)
    if config.kernel.table is not None and not isinstance(
        config.kernel.table, str
    ):
        raise ConfigError("kernel.table: expected a path string")
    m = config.spectrum.m
    if m != "all":
        _positive_int("spectrum.m", m)

    f = config.filter
    _coefficients("filter.poly", f.poly)
    _positive_int("filter.degree", f.degree, 0)
    if f.signal.type not in _SIGNAL_TYPES:
        raise ConfigError(
            f"filter.signal.type: must be one of {_SIGNAL_TYPES}, got "
            f"{f.signal.type!r}"
        )
    if f.signal.type == "csv" and not f.signal.path:
        raise ConfigError("filter.signal.path: required for csv signals")
    if f.signal.path is not None and not isinstance(f.signal.path, str):
        raise ConfigError("filter.signal.path: expected a path string")
    _positive_int("filter.signal.mode", f.signal.mode)

    fo = config.fourier
    _positions("fourier.centers", fo.centers, g, FourierConfig().centers)
    _coefficients("fourier.coeffs", fo.coeffs)
    _positions("fourier.sections", fo.sections, g, FourierConfig().sections)
    if len(fo.centers) != len(fo.coeffs):
        raise ConfigError("fourier: centers and coeffs differ in length")
    _positive_int("fourier.modes", fo.modes)

    gr = config.graphon
    _positive_int("graphon.order", gr.order)
    _positive_int("graphon.modes", gr.modes)
    _positive_int("graphon.trials", gr.trials)

    lo = config.localize
    _positions("localize.centers", lo.centers, g, LocalizeConfig().centers)
    _coefficients("localize.coeffs", lo.coeffs)
    _positions("localize.design_centers", lo.design_centers, g, None)
    _coefficients("localize.targets", lo.targets)
    if len(lo.centers) != len(lo.coeffs):
        raise ConfigError("localize: centers and coeffs differ in length")
    _positive_int("localize.B", lo.B, 0)
    if lo.band_end is not None:
        if isinstance(lo.band_end, bool) or not isinstance(lo.band_end, int):
            raise ConfigError("localize.band_end: expected an integer")

    fi = config.fit
    _positive_int("fit.q", fi.q)
    _positive_int("fit.curve_points", fi.curve_points, 2)
    if fi.gamma <= 0:
        raise ConfigError(f"fit.gamma: must be > 0, got {fi.gamma}")
    if fi.reg < 0:
        raise ConfigError(f"fit.reg: must be >= 0, got {fi.reg}")

    if config.verify.properties is not None:
        for i, name in enumerate(config.verify.properties):
            if not isinstance(name, str):
                raise ConfigError(f"verify.properties[{i}]: expected a name")
    for block in ("filter", "fourier", "graphon", "localize", "fit", "verify"):
        tol = getattr(config, block).tol
        if tol <= 0:
            raise ConfigError(f"{block}.tol: must be > 0, got {tol}")
    return config


def parse(data: Any) -> RunConfig:
    """Build and validate a :class:`RunConfig` from decoded JSON."""
    if isinstance(data, dict) and "version" not in data:
        raise ConfigError("version: missing; expected 1")
    return validate(_build(RunConfig, data, ""))


def load(path: Path | str | None) -> RunConfig:
    """Load a run configuration; ``None`` yields the defaults.

    Raises:
        ConfigError: If the file cannot be read, is not valid JSON, or fails
            validation.
    """
    if path is None:
        return validate(RunConfig())
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON: {e}") from e
    return parse(data)


def complex_list(values: list | None) -> list[complex]:
    """Decode numbers and ``[re, im]`` pairs into complex values."""
    if values is None:
        return []
    return [complex(v[0], v[1]) if isinstance(v, list) else complex(v) for v in values]
