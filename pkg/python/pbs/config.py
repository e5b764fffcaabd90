"""Run configuration: defaults, JSON file, environment, then --set overrides."""

# pylint: disable=too-many-instance-attributes

from __future__ import annotations

import json
import logging
import math
import os
import re
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Final, final

from .exprlang import ExprSyntaxError, parse
from .quadrature import QuadratureSpec
from .superpotential import (
    DEFAULT_SEED,
    MAX_ABS_K,
    NORM_SPLITS,
    PbsFamily,
    bounded_phi_family,
    build_family,
)

logger = logging.getLogger(__name__)

CONFIG_ENV: Final = "PBS_CONFIG"

_K_SYMBOL_RE = re.compile(r"\bk\b")

DEFAULT_TOLERANCES: Final[Mapping[str, float]] = {
    "identity": 1e-10,
    "norm_product": 1e-14,
    "biorth": 1e-10,
    "family_independence": 1e-12,
    "factorization": 1e-12,
    "metric": 1e-10,
    "norm_formula": 1e-8,
    "asymptotic": 0.05,
    "asymptotic_slope": 0.15,
    "moment": 1e-10,
    "normalization": 1e-12,
    "eigen_analytic": 1e-12,
    "eigen_numeric": 1e-9,
    "resolution_oracle": 1e-8,
    "resolution": 1e-6,
    "weak_eigen": 1e-8,
    "weak_pairing": 1e-10,
    "quasi_basis": 1e-6,
    "continuity": 0.05,
}


class ConfigError(ValueError):
    """Invalid configuration value; ``path`` is the dotted key."""

    def __init__(self, path: str, message: str) -> None:
        """Record the offending key."""
        super().__init__(f"{path}: {message}")
        self.path = path


@final
class NormSplit:
    """Normalization split names."""

    @staticmethod
    def from_string(value: str) -> str:
        """Parse a string."""
        v = value.strip().lower().replace("-", "_")
        if v in NORM_SPLITS:
            return v
        raise ValueError(f"norm_split must be one of {NORM_SPLITS}")


def substitute_k(text: str, k: float) -> str:
    """Replace the symbol k by its numeric value."""
    return _K_SYMBOL_RE.sub(f"({k!r})", text)


def parse_complex(text: str) -> complex:
    """'1+0.5i' style literal."""
    cleaned = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(cleaned)
    except ValueError as exc:
        raise ValueError(f"not a complex number: {text!r}") from exc


@dataclass(frozen=True, slots=True)
class Config:
    """Everything a suite run depends on."""

    s_a: str = "x^2/4"
    phi: str | None = None
    k: float = 0.5
    norm_split: str = "symmetric"
    nmax: int = 30
    seed: int = DEFAULT_SEED
    family_label: str = "config"
    z: str = "1+0.5i"
    bump_center: float = 0.0
    bump_width: float = 2.0
    resolution_radius: float = 6.0
    resolution_nmax: int = 25
    resolution_grid: tuple[int, int] = (200, 128)
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    tolerances: Mapping[str, float] = field(
        default_factory=lambda: dict(DEFAULT_TOLERANCES)
    )

    def __post_init__(self) -> None:
        if not math.isfinite(self.k) or abs(self.k) > MAX_ABS_K:
            raise ConfigError("k", f"must be finite with |k| <= {MAX_ABS_K}")
        try:
            split = NormSplit.from_string(self.norm_split)
            object.__setattr__(self, "norm_split", split)
        except ValueError as exc:
            raise ConfigError("norm_split", str(exc)) from exc
        if self.nmax < 1:
            raise ConfigError("nmax", "must be >= 1")
        if self.resolution_nmax < 1:
            raise ConfigError("resolution_nmax", "must be >= 1")
        if not self.bump_width > 0:
            raise ConfigError("bump_width", "must be > 0")
        if not self.resolution_radius > 0:
            raise ConfigError("resolution_radius", "must be > 0")
        if len(self.resolution_grid) != 2 or min(self.resolution_grid) < 16:
            raise ConfigError("resolution_grid", "needs two node counts >= 16")
        for name, value in self.tolerances.items():
            if not (isinstance(value, (int, float)) and value > 0):
                raise ConfigError(f"tolerances.{name}", "must be > 0")
        try:
            parse_complex(self.z)
        except ValueError as exc:
            raise ConfigError("z", str(exc)) from exc

    @property
    def z_value(self) -> complex:
        """Parsed z."""
        return parse_complex(self.z)

    def tolerance(self, name: str) -> float:
        """Tolerance by name, falling back to the defaults."""
        return float(self.tolerances.get(name, DEFAULT_TOLERANCES[name]))

    def family(self) -> PbsFamily:
        """Family described by s_a (or phi) and k."""
        source, key = (self.phi, "phi") if self.phi is not None else (self.s_a, "s_A")
        try:
            expr = parse(substitute_k(source, self.k))
        except ExprSyntaxError as exc:
            raise ConfigError(key, str(exc)) from exc
        if self.phi is not None:
            return bounded_phi_family(expr, self.k, self.norm_split, self.family_label)
        return build_family(expr, self.k, self.norm_split, self.family_label)

    def to_dict(self) -> dict[str, Any]:
        """Echo for reports (stable key order)."""
        return {
            "s_A": self.s_a,
            "phi": self.phi,
            "k": self.k,
            "norm_split": self.norm_split,
            "nmax": self.nmax,
            "seed": self.seed,
            "family_label": self.family_label,
            "z": self.z,
            "bump": {"center": self.bump_center, "width": self.bump_width},
            "resolution": {
                "radius": self.resolution_radius,
                "nmax": self.resolution_nmax,
                "grid": list(self.resolution_grid),
            },
            "quadrature": {
                "hermite_points": self.quadrature.hermite_points,
                "legendre_points": self.quadrature.legendre_points,
                "legendre_panels": self.quadrature.legendre_panels,
                "laguerre_points": self.quadrature.laguerre_points,
                "tolerance": self.quadrature.tolerance,
            },
            "tolerances": dict(sorted(self.tolerances.items())),
        }


# flat key -> (Config field, converter)
_SCALARS: Final = {
    "s_A": ("s_a", str),
    "s_a": ("s_a", str),
    "phi": ("phi", str),
    "k": ("k", float),
    "norm_split": ("norm_split", str),
    "nmax": ("nmax", int),
    "seed": ("seed", int),
    "family_label": ("family_label", str),
    "z": ("z", str),
    "bump.center": ("bump_center", float),
    "bump.width": ("bump_width", float),
    "resolution.radius": ("resolution_radius", float),
    "resolution.nmax": ("resolution_nmax", int),
}

_QUADRATURE_KEYS: Final = {f.name for f in fields(QuadratureSpec)}


def _flatten(data: Mapping[str, Any], prefix: str = "") -> Iterable[tuple[str, Any]]:
    for key, value in data.items():
        path = f"{prefix}{key}"
        if isinstance(value, Mapping) and key != "tolerances":
            yield from _flatten(value, f"{path}.")
        else:
            yield path, value


def apply_mapping(base: Config, data: Mapping[str, Any]) -> Config:
    """Overlay a (possibly nested) mapping onto a config."""
    changes: dict[str, Any] = {}
    quad: dict[str, Any] = {}
    tolerances = dict(base.tolerances)
    for path, value in _flatten(data):
        try:
            if path in _SCALARS:
                name, conv = _SCALARS[path]
                changes[name] = None if value is None and name == "phi" else conv(value)
            elif path.startswith("quadrature."):
                key = path.split(".", 1)[1]
                if key not in _QUADRATURE_KEYS:
                    raise ConfigError(path, "unknown quadrature key")
                quad[key] = float(value) if key == "tolerance" else int(value)
            elif path == "tolerances" and isinstance(value, Mapping):
                tolerances.update({str(k): float(v) for k, v in value.items()})
            elif path.startswith("tolerances."):
                tolerances[path.split(".", 1)[1]] = float(value)
            elif path == "resolution.grid":
                grid = [int(g) for g in value]
                changes["resolution_grid"] = (
                    (grid[0], grid[1]) if len(grid) == 2 else tuple(grid)
                )
            else:
                raise ConfigError(path, "unknown key")
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(path, str(exc)) from exc
    if quad:
        try:
            changes["quadrature"] = replace(base.quadrature, **quad)
        except ValueError as exc:
            raise ConfigError("quadrature", str(exc)) from exc
    changes["tolerances"] = tolerances
    return replace(base, **changes)


def _coerce_override(raw: str) -> Any:
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def apply_overrides(base: Config, overrides: Iterable[str]) -> Config:
    """Apply ``key=value`` pairs (dotted keys, JSON-or-string values)."""
    data: dict[str, Any] = {}
    for item in overrides:
        key, sep, raw = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(item, "override must look like key=value")
        key = key.strip()
        value = _coerce_override(raw.strip())
        if key in {"s_A", "s_a", "phi", "z", "family_label", "norm_split"}:
            value = raw.strip()
        data[key] = value
    return apply_mapping(base, data)


def load_config(
    path: str | Path | None = None,
    overrides: Iterable[str] = (),
    environ: Mapping[str, str] | None = None,
) -> Config:
    """Defaults, then the JSON file (argument or PBS_CONFIG), then overrides."""
    env = os.environ if environ is None else environ
    config = Config()
    source = path if path is not None else env.get(CONFIG_ENV)
    if source:
        file_path = Path(source)
        try:
            data = json.loads(file_path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(str(file_path), f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(str(file_path), f"invalid JSON: {exc.msg}") from exc
        if not isinstance(data, Mapping):
            raise ConfigError(str(file_path), "top level must be an object")
        config = apply_mapping(config, data)
        logger.debug("loaded config from %s", file_path)
    return apply_overrides(config, overrides)
