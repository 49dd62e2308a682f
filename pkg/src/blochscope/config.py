"""Run configuration: flat key=value files plus CLI flag overrides.

The file format is deliberately primitive: one `key = value` per line, '#'
comments, no sections.  Flags win over file values.  Every key is validated
before any computation starts; unknown keys are errors, not warnings.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path

from .estimators import ScanSettings
from .norms import SearchSettings


class ConfigError(ValueError):
    """Malformed configuration file or unknown key."""


_BOOL_TRUE = {"1", "true", "yes", "on"}
_BOOL_FALSE = {"0", "false", "no", "off"}


@dataclass(frozen=True)
class RunConfig:
    """Everything a command needs, echoed back verbatim into reports."""

    symbol: str = "identity"
    alpha: float = 1.0
    beta: float | None = None
    weight: str = "valpha:1"
    out: str | None = None
    format: str = "csv"
    figures: bool = True
    # supremum search
    depth: int = 20
    max_angles: int = 4096
    refine_rounds: int = 40
    shrink: float = 0.25
    rel_tol: float = 1e-6
    abs_tol: float = 1e-12
    # boundary scan
    k_min: int = 3
    k_max: int = 20
    angles: int = 64
    tail_window: int = 4
    compact_tol: float = 1e-3
    j_max: int = 256

    def search_settings(self) -> SearchSettings:
        return SearchSettings(
            depth=self.depth,
            max_angles=self.max_angles,
            refine_rounds=self.refine_rounds,
            shrink=self.shrink,
            rel_tol=self.rel_tol,
            abs_tol=self.abs_tol,
        )

    def scan_settings(self) -> ScanSettings:
        return ScanSettings(
            k_min=self.k_min,
            k_max=self.k_max,
            angles=self.angles,
            tail_window=self.tail_window,
            compact_tol=self.compact_tol,
            j_max=self.j_max,
            search=self.search_settings(),
        )

    def echo(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(key: str, raw: str):
    t = _FIELD_TYPES[key]
    if t in ("bool",):
        low = raw.strip().lower()
        if low in _BOOL_TRUE:
            return True
        if low in _BOOL_FALSE:
            return False
        raise ConfigError(f"key '{key}': expected a boolean, got {raw!r}")
    try:
        if t in ("int",):
            return int(raw)
        if t in ("float",):
            return float(raw)
        if t in ("float | None",):
            return float(raw)
    except ValueError as exc:
        raise ConfigError(f"key '{key}': {exc}") from exc
    return raw.strip()


def parse_config_file(path: str | Path) -> dict:
    """Read a key=value file into a validated dict of RunConfig fields."""
    out: dict = {}
    text = Path(path).read_text()
    for ln, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{ln}: expected 'key = value'")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in _FIELD_TYPES:
            raise ConfigError(f"{path}:{ln}: unknown key '{key}'")
        out[key] = _coerce(key, raw)
    return out


def build_config(file_values: dict | None = None, overrides: dict | None = None) -> RunConfig:
    """Layer defaults < file < explicit overrides into a RunConfig."""
    cfg = RunConfig()
    if file_values:
        cfg = replace(cfg, **file_values)
    if overrides:
        unknown = set(overrides) - set(_FIELD_TYPES)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg = replace(cfg, **overrides)
    if cfg.format not in ("csv", "json"):
        raise ConfigError(f"format must be 'csv' or 'json', got {cfg.format!r}")
    return cfg
