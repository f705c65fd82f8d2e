"""Closed-form kernel catalog.

Each entry is a vectorized rule ``(u, v) -> value`` together with its
default parameters, the interval on which it is total, and whether it is a
reproducing (positive-semidefinite) kernel on that interval.  Entries are
looked up by name with :func:`get_entry`.
"""

import math
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field

import numpy as np

from boxkernel.core.exceptions import ConfigError
from boxkernel.core.interfaces import ClosedFormKernel

Rule = Callable[..., np.ndarray]

_UNIT = (0.0, 1.0)
_REAL_LINE = (-math.inf, math.inf)


@dataclass(frozen=True)
class _Recipe:
    rule: Rule
    defaults: Mapping[str, float] = field(default_factory=dict)
    domain: tuple[float, float] = _UNIT
    reproducing: bool = True
    description: str = ""


def _constant(u, v):
    return np.ones(np.broadcast(u, v).shape)


def _linear(u, v):
    return u * v


def _min(u, v):
    return np.minimum(u, v)


def _min_bridge(u, v):
    return np.minimum(u, v) * (1.0 - np.maximum(u, v))


def _one_minus_max(u, v):
    return 1.0 - np.maximum(u, v)


def _average(u, v):
    return (u + v) / 2.0


def _laplace(u, v, sigma):
    return np.exp(-np.abs(u - v) / sigma)


def _periodic(u, v, length):
    return np.exp(-(2.0 / length**2) * np.sin(np.pi * (u - v)) ** 2)


def _gaussian(u, v, sigma):
    return np.exp(-((u - v) ** 2) / (2.0 * sigma**2))


def _poly2(u, v):
    return (1.0 + u * v) ** 2


def _sinc(u, v, B):
    # np.sinc is the normalized sinc, sin(pi x) / (pi x)
    return (B / np.pi) * np.sinc(B * (u - v) / np.pi)


def _cosine(u, v):
    return np.cos(u - v)


def _sine(u, v):
    return np.sin(u - v)


def _row(u, v):
    return u + 0.0 * v


_CATALOG: dict[str, _Recipe] = {
    "constant": _Recipe(_constant, description="1"),
    "linear": _Recipe(_linear, description="u v"),
    "min": _Recipe(_min, description="min(u, v)"),
    "min_bridge": _Recipe(
        _min_bridge, description="min(u, v) (1 - max(u, v))"
    ),
    "one_minus_max": _Recipe(_one_minus_max, description="1 - max(u, v)"),
    "average": _Recipe(
        _average, reproducing=False, description="(u + v) / 2"
    ),
    "laplace": _Recipe(
        _laplace,
        {"sigma": 1.0},
        _REAL_LINE,
        description="exp(-|u - v| / sigma)",
    ),
    "periodic": _Recipe(
        _periodic,
        {"length": 1.0},
        _REAL_LINE,
        description="exp(-(2 / length^2) sin^2(pi (u - v)))",
    ),
    "gaussian": _Recipe(
        _gaussian,
        {"sigma": 0.1},
        _REAL_LINE,
        description="exp(-(u - v)^2 / (2 sigma^2))",
    ),
    "poly2": _Recipe(_poly2, description="(1 + u v)^2"),
    "sinc": _Recipe(
        _sinc,
        {"B": math.pi},
        _REAL_LINE,
        description="(B / pi) sinc((B / pi) (u - v))",
    ),
    "cosine": _Recipe(_cosine, domain=_REAL_LINE, description="cos(u - v)"),
    "sine": _Recipe(
        _sine, domain=_REAL_LINE, reproducing=False, description="sin(u - v)"
    ),
    "row": _Recipe(_row, reproducing=False, description="u"),
}


class CatalogKernel(ClosedFormKernel):
    """A named closed-form kernel with bound parameters.

    Args:
        name: Catalog identifier, see :func:`catalog_names`.
        params: Overrides for the entry's default parameters.
        domain: Optional override of the entry's default domain.

    Raises:
        ConfigError: If the name is unknown, a parameter is not accepted by
            the entry, or a parameter value is not a positive finite number.
    """

    def __init__(
        self,
        name: str,
        params: Mapping[str, float] | None = None,
        domain: tuple[float, float] | None = None,
    ):
        if name not in _CATALOG:
            raise ConfigError(
                f"unknown kernel {name!r}; choose one of "
                f"{', '.join(catalog_names())}"
            )
        recipe = _CATALOG[name]
        params = dict(params or {})
        unknown = sorted(set(params) - set(recipe.defaults))
        if unknown:
            raise ConfigError(
                f"kernel {name!r} does not accept parameters {unknown}"
            )
        bound = {**recipe.defaults, **params}
        for key, value in bound.items():
            if not isinstance(value, (int, float)) or not (
                math.isfinite(value) and value > 0
            ):
                raise ConfigError(
                    f"kernel {name!r} parameter {key!r} must be a positive "
                    f"number, got {value!r}"
                )
        self._name = name
        self._recipe = recipe
        self._params = {k: float(v) for k, v in bound.items()}
        self._domain = (
            tuple(float(x) for x in domain) if domain else recipe.domain
        )

    def __repr__(self) -> str:
        return f"CatalogKernel({self._name!r}, {self._params})"

    @property
    def name(self) -> str:
        return self._name

    @property
    def params(self) -> dict[str, float]:
        return dict(self._params)

    @property
    def domain(self) -> tuple[float, float]:
        return self._domain

    @property
    def is_reproducing(self) -> bool:
        return self._recipe.reproducing

    @property
    def description(self) -> str:
        return self._recipe.description

    def evaluate(self, u, v) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        return np.asarray(self._recipe.rule(u, v, **self._params))


def catalog_names() -> list[str]:
    """Return the catalog identifiers in sorted order."""
    return sorted(_CATALOG)


def get_entry(
    name: str,
    params: Mapping[str, float] | None = None,
    domain: tuple[float, float] | None = None,
) -> CatalogKernel:
    """Look up a catalog entry and bind its parameters."""
    return CatalogKernel(name, params, domain)
