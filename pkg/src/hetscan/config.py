"""Flat key=value configuration files with optional [section] blocks.

Used for simulation settings (flat) and benchmark grids (one section per
grid cell; top-level keys provide defaults for every cell).  Lines starting
with '#' and blank lines are ignored.
"""

from __future__ import annotations

from dataclasses import fields

from .simulate import SimConfig


class ConfigError(ValueError):
    """Malformed configuration text or unknown keys."""


_INT_KEYS = {"n_obs", "n_predictors", "n_groupings", "n_levels"}
_STR_KEYS = {"family"}


def parse_sections(text: str) -> tuple[dict, list[tuple[str, dict]]]:
    """Split config text into top-level defaults and named sections."""
    defaults: dict = {}
    sections: list[tuple[str, dict]] = []
    current = defaults
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if not name:
                raise ConfigError(f"line {lineno}: empty section name")
            current = {}
            sections.append((name, current))
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value")
        if key in current:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        current[key] = value
    return defaults, sections


def _coerce(key: str, value: str):
    if key in _STR_KEYS:
        return value
    try:
        if key in _INT_KEYS:
            return int(value)
        return float(value)
    except ValueError:
        raise ConfigError(f"key {key!r}: cannot parse {value!r}") from None


def sim_config_from_items(items: dict, label: str = "config") -> SimConfig:
    """Build a SimConfig from string key/value pairs, rejecting unknown keys."""
    allowed = {f.name for f in fields(SimConfig)} - {"seed"}
    kwargs = {}
    for key, value in items.items():
        if key not in allowed:
            raise ConfigError(f"{label}: unknown key {key!r}")
        kwargs[key] = _coerce(key, value)
    try:
        return SimConfig(**kwargs)
    except ValueError as err:
        raise ConfigError(f"{label}: {err}") from None


def parse_sim_config(text: str) -> SimConfig:
    """Parse a flat simulation config (no sections allowed)."""
    defaults, sections = parse_sections(text)
    if sections:
        raise ConfigError("simulation config takes no [section] blocks")
    return sim_config_from_items(defaults)


def parse_grid(text: str) -> list[SimConfig]:
    """Parse a benchmark grid: defaults plus one [section] per cell."""
    defaults, sections = parse_sections(text)
    if not sections:
        raise ConfigError("grid config needs at least one [cell] section")
    cells = []
    for name, items in sections:
        merged = dict(defaults)
        merged.update(items)
        cells.append(sim_config_from_items(merged, label=f"cell [{name}]"))
    return cells
