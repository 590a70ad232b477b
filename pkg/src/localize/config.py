"""Run configuration: TOML files, environment overrides and strict schemas.

Precedence (lowest first): dataclass defaults, ``--config`` file, environment
variables ``LOCALIZE_<KEY>`` (nested keys joined by ``__``, e.g.
``LOCALIZE_SCHEDULE__T_GRID``), command-line flags.
"""

from __future__ import annotations

import dataclasses
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised on 3.10
    import tomli as tomllib

ENV_PREFIX = "LOCALIZE_"

__all__ = [
    "ConfigError",
    "ENV_PREFIX",
    "SCHEMAS",
    "load_config",
    "config_to_dict",
]


class ConfigError(ValueError):
    """Schema violation; ``key`` names the offending entry."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


@dataclass
class Schedule:
    t_grid: list[float] = field(default_factory=lambda: [0.02, 0.01, 0.005, 0.0025])
    eps_grid: list[float] = field(default_factory=lambda: [0.4, 0.2, 0.1, 0.05, 0.025])
    cutoff: float | None = None


def _kind(kind: str, default_factory):
    return field(default_factory=default_factory, metadata={"kind": kind})


@dataclass
class GenusConfig:
    genus: str = "a_hat"  # a_hat | l | witten | custom | cancellation
    dimension: int = 4
    pontryagin: list[int] = field(default_factory=lambda: [-48])
    spin: bool = True
    order: int = 5
    reduced: bool = True
    q_coefficients: list[str] = _kind("str_list", list)  # custom Q(x) = sum c_j x^j, rationals as strings


@dataclass
class HeatKernelConfig:
    group: str = "A1"
    t: float = 0.5
    point: list[float] = field(default_factory=lambda: [0.0])
    cutoff: float | None = None
    tol: float = 1e-12


@dataclass
class ModuliVolumeConfig:
    group: str = "A1"
    genus: int = 2
    holonomy: list[float] = field(default_factory=lambda: [0.3])
    insertion: str = "1"
    tol: float = 1e-8
    fit_points: int = 0
    schedule: Schedule = field(default_factory=lambda: Schedule(t_grid=[0.008, 0.004, 0.002, 0.001]))


@dataclass
class ModuliIntersectConfig:
    group: str = "A1"
    genus: int = 2
    holonomy: list[float] = field(default_factory=lambda: [1.0])
    insertion: str = "1"
    tol: float = 1e-8
    derivative_order: int = 0
    derivative_form: str = "character"
    wall_adaptive_t: bool = False
    schedule: Schedule = field(default_factory=Schedule)


@dataclass
class ModuliMCConfig:
    group: str = "A1"
    genus: int = 2
    holonomy: list[float] = field(default_factory=lambda: [0.3])
    t: list[float] = field(default_factory=lambda: [1.0, 0.5, 0.25])
    samples: int = 100_000
    seed: int = 20240601
    sigmas: float = 3.0


@dataclass
class MirrorQuinticConfig:
    order: int = 3
    convention: str = "auto"  # auto | minus | plus
    oracles: bool = True


@dataclass
class MirrorLocalConfig:
    target: str = "conifold"  # conifold | local_p2
    order: int = 7
    convention: str = "auto"
    oracles: bool = True


@dataclass
class MirrorToricConfig:
    """Either ``projective_dim`` (P^n with bundle degrees) or explicit toric data.

    Explicit data: ``divisors`` rows are D_a in the Kähler basis, ``relations``
    exponent vectors of the monomial ideal, ``pairing`` rows ``[e_1..e_n, value]``
    and ``line_bundles`` rows c1(L_j); ``projective_dim = 0`` selects it.
    """

    projective_dim: int = 4
    bundle: list[int] = field(default_factory=lambda: [5])
    divisors: list[list[int]] = _kind("int_matrix", list)
    relations: list[list[int]] = _kind("int_matrix", list)
    pairing: list[list[int]] = _kind("int_matrix", list)
    line_bundles: list[list[int]] = _kind("int_matrix", list)
    order: int = 4
    convention: str = "auto"
    cutoff: int = 2  # degree cutoff for the printed HG[B] summands


SCHEMAS: dict[str, type] = {
    "genus": GenusConfig,
    "heatkernel": HeatKernelConfig,
    "moduli-volume": ModuliVolumeConfig,
    "moduli-intersect": ModuliIntersectConfig,
    "moduli-mc": ModuliMCConfig,
    "mirror-quintic": MirrorQuinticConfig,
    "mirror-local": MirrorLocalConfig,
    "mirror-toric": MirrorToricConfig,
}


def _field_types(cls) -> dict[str, dataclasses.Field]:
    return {f.name: f for f in dataclasses.fields(cls)}


def _coerce(value: Any, default: Any, key: str, kind: str | None = None):
    """Light type check against the default value's type (or an explicit kind)."""
    if kind == "str_list":
        if not isinstance(value, list) or not all(isinstance(v, (str, int)) and not isinstance(v, bool) for v in value):
            raise ConfigError(f"{key}: expected a list of strings", key)
        return [str(v) for v in value]
    if kind == "int_matrix":
        ok = isinstance(value, list) and all(
            isinstance(row, list) and all(isinstance(v, int) and not isinstance(v, bool) for v in row) for row in value)
        if not ok:
            raise ConfigError(f"{key}: expected a list of integer lists", key)
        return [list(row) for row in value]
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{key}: expected a boolean, got {value!r}", key)
        return value
    if isinstance(default, int) and not isinstance(default, bool):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{key}: expected an integer, got {value!r}", key)
        return value
    if isinstance(default, float) or default is None:
        if value is None:
            return None
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key}: expected a number, got {value!r}", key)
        return float(value)
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError(f"{key}: expected a string, got {value!r}", key)
        return value
    if isinstance(default, list):
        if not isinstance(value, list):
            value = [value]
        if default and isinstance(default[0], int) and not isinstance(default[0], bool):
            if not all(isinstance(v, int) and not isinstance(v, bool) for v in value):
                raise ConfigError(f"{key}: expected a list of integers", key)
            return list(value)
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
            raise ConfigError(f"{key}: expected a list of numbers", key)
        return [float(v) for v in value]
    return value


def _apply(obj, data: Mapping[str, Any], prefix: str = ""):
    fields = _field_types(type(obj))
    for key, value in data.items():
        full = f"{prefix}{key}"
        if key not in fields:
            raise ConfigError(f"unknown configuration key '{full}'", full)
        current = getattr(obj, key)
        if dataclasses.is_dataclass(current):
            if not isinstance(value, Mapping):
                raise ConfigError(f"{full}: expected a table", full)
            _apply(current, value, prefix=f"{full}.")
        else:
            setattr(obj, key, _coerce(value, current, full, fields[key].metadata.get("kind")))


def _parse_env_value(text: str):
    try:
        return tomllib.loads(f"v = {text}")["v"]
    except tomllib.TOMLDecodeError:
        return text


def _all_keys(cls, prefix="") -> set[str]:
    out = set()
    for f in dataclasses.fields(cls):
        default = f.default_factory() if f.default_factory is not dataclasses.MISSING else f.default
        if dataclasses.is_dataclass(default):
            out |= _all_keys(type(default), prefix + f.name + "__")
        else:
            out.add(prefix + f.name)
    return out


def _env_overrides(cls, environ: Mapping[str, str]) -> dict:
    known_anywhere = set().union(*(_all_keys(c) for c in SCHEMAS.values()))
    mine = _all_keys(cls)
    out: dict = {}
    for name, raw in environ.items():
        if not name.startswith(ENV_PREFIX):
            continue
        key = name[len(ENV_PREFIX):].lower()
        if key not in known_anywhere:
            raise ConfigError(f"unknown configuration key '{key}' in environment variable {name}", key)
        if key not in mine:
            continue  # belongs to another subcommand
        parts = key.split("__")
        node = out
        for p in parts[:-1]:
            node = node.setdefault(p, {})
        node[parts[-1]] = _parse_env_value(raw)
    return out


def load_config(subcommand: str, path: str | Path | None = None, overrides: Mapping[str, Any] | None = None,
                environ: Mapping[str, str] | None = None):
    """Resolve the configuration dataclass for ``subcommand``."""
    if subcommand not in SCHEMAS:
        raise ConfigError(f"unknown subcommand '{subcommand}'", subcommand)
    cls = SCHEMAS[subcommand]
    cfg = cls()
    if path is not None:
        try:
            with open(path, "rb") as fh:
                data = tomllib.load(fh)
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {path}") from exc
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
        _apply(cfg, data)
    _apply(cfg, _env_overrides(cls, os.environ if environ is None else environ))
    if overrides:
        _apply(cfg, overrides)
    return cfg


def config_to_dict(cfg) -> dict:
    return dataclasses.asdict(cfg)
