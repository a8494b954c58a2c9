"""Flat ``section.key = value`` config files.

Blank lines and ``#`` comments are ignored. Every key must be known;
anything else is a ConfigError so typos fail loudly at startup.
"""

from __future__ import annotations

import dataclasses
import os

from .dfpav import DfpavParams
from .errors import ConfigError
from .mac import MacConfig
from .mobility import MobilityConfig
from .phy import PhyConfig
from .pso import PsoParams
from .sim import SimConfig

_SECTIONS = {
    "phy": PhyConfig,
    "mac": MacConfig,
    "mobility": MobilityConfig,
    "pso": PsoParams,
    "dfpav": DfpavParams,
}

# file key -> dataclass field, where they differ
_ALIASES = {
    "dfpav": {"mbl_bps": "mbl", "step_dbm": "step", "cs_max_m": "cs_max", "p_start_dbm": "p_start"},
    "output": {"metrics_csv": "metrics_out", "trace_csv": "trace_out", "analysis_csv": "analysis_out"},
}

_SIM_KEYS = ("protocol", "duration_s", "seed", "fixed_power_dbm", "epoch_s", "mobility_step_ms")


def known_keys() -> list[str]:
    keys = [f"sim.{k}" for k in _SIM_KEYS]
    keys += [f"output.{k}" for k in _ALIASES["output"]]
    for section, cls in _SECTIONS.items():
        rev = {v: k for k, v in _ALIASES.get(section, {}).items()}
        keys += [f"{section}.{rev.get(f.name, f.name)}" for f in dataclasses.fields(cls)]
    return keys


def _coerce(raw: str, like, key: str):
    try:
        if isinstance(like, bool):
            return raw.lower() in ("1", "true", "yes", "on")
        if isinstance(like, int):
            return int(raw)
        if isinstance(like, float):
            return float(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r} as {type(like).__name__}") from None
    return raw


def parse_config(text: str, source: str = "<config>") -> dict[str, str]:
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'section.key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if "." not in key:
            raise ConfigError(f"{source}:{lineno}: key {key!r} lacks a section")
        out[key] = value
    return out


def build_config(values: dict[str, str], base: SimConfig | None = None) -> SimConfig:
    base = base or SimConfig()
    unknown = sorted(set(values) - set(known_keys()))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    top = {}
    subs = {name: {} for name in _SECTIONS}
    for key, raw in values.items():
        section, name = key.split(".", 1)
        if section == "sim":
            top[name] = _coerce(raw, getattr(base, name), key)
        elif section == "output":
            top[_ALIASES["output"][name]] = raw
        else:
            field = _ALIASES.get(section, {}).get(name, name)
            subs[section][field] = _coerce(raw, getattr(getattr(base, section), field), key)
    try:
        for section, kw in subs.items():
            if kw:
                top[section] = dataclasses.replace(getattr(base, section), **kw)
        return dataclasses.replace(base, **top)
    except ConfigError:
        raise
    except ValueError as e:
        raise ConfigError(str(e)) from e


def load_config(path: str | os.PathLike, base: SimConfig | None = None) -> SimConfig:
    with open(path) as fh:
        return build_config(parse_config(fh.read(), str(path)), base)


def dump_config(cfg: SimConfig) -> str:
    """Render every key of ``cfg`` in the file format (output keys omitted when unset)."""
    lines = [f"sim.{k} = {getattr(cfg, k)}" for k in _SIM_KEYS]
    for key, field in _ALIASES["output"].items():
        if getattr(cfg, field) is not None:
            lines.append(f"output.{key} = {getattr(cfg, field)}")
    for section, cls in _SECTIONS.items():
        rev = {v: k for k, v in _ALIASES.get(section, {}).items()}
        sub = getattr(cfg, section)
        lines += [f"{section}.{rev.get(f.name, f.name)} = {getattr(sub, f.name)}" for f in dataclasses.fields(cls)]
    return "\n".join(lines) + "\n"
