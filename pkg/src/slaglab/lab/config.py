"""Scenario configuration: flat INI-style files plus ``key=value`` overrides.

A config file may start with an optional section header; all keys are read
into one flat namespace::

    t = atan(1/2)
    k = 50
    bounds = 0.1:3, 0:2*pi
    resolution = 65, 129
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import DomainError
from .expr import scalar

__all__ = ["Param", "ScenarioConfig", "load_config", "parse_overrides"]


def _bool(text):
    if isinstance(text, bool):
        return text
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise DomainError(f"not a boolean: {text!r}")


def _bounds(text):
    if isinstance(text, (list, tuple)):
        return tuple(tuple(float(v) for v in b) for b in text)
    out = []
    for part in str(text).split(","):
        lo, sep, hi = part.partition(":")
        if not sep:
            raise DomainError(f"bounds entries look like lo:hi, got {part!r}")
        out.append((scalar(lo), scalar(hi)))
    return tuple(out)


def _ints(text):
    if isinstance(text, int):
        return (text,)
    if isinstance(text, (list, tuple)):
        return tuple(int(v) for v in text)
    return tuple(int(v) for v in str(text).split(","))


def _optional_bool(text):
    if text is None or str(text).strip().lower() in ("", "none", "auto"):
        return None
    return _bool(text)


def _optional_str(text):
    if text is None or str(text).strip().lower() in ("", "none"):
        return None
    return str(text).strip()


CONVERTERS = {
    "float": scalar,
    "int": lambda v: int(scalar(v)),
    "str": lambda v: str(v).strip(),
    "bool": _bool,
    "bounds": _bounds,
    "ints": _ints,
    "optional_bool": _optional_bool,
    "optional_str": _optional_str,
}


@dataclass(frozen=True)
class Param:
    kind: str
    default: object
    help: str = ""


@dataclass
class ScenarioConfig:
    """Scenario id plus typed parameters."""

    scenario: str
    params: dict = field(default_factory=dict)
    out: Path | None = None


def parse_overrides(items) -> dict:
    out = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise DomainError(f"--set expects key=value, got {item!r}")
        out[key.strip()] = value.strip()
    return out


def _read_file(path) -> dict:
    text = Path(path).read_text()
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    if not text.lstrip().startswith("["):
        text = "[params]\n" + text
    parser.read_string(text)
    flat = {}
    for section in parser.sections():
        flat.update(parser[section])
    return flat


def load_config(scenario: str, schema: dict, path=None, overrides=None) -> ScenarioConfig:
    """Merge defaults, file values and overrides, then convert by ``schema``.

    Raises
    ------
    DomainError
        On unknown keys or values that do not convert.
    """
    raw = {}
    if path is not None:
        raw.update(_read_file(path))
    raw.update(overrides or {})
    unknown = sorted(set(raw) - set(schema))
    if unknown:
        raise DomainError(f"unknown parameter(s) for {scenario}: {', '.join(unknown)}")
    params = {}
    for key, spec in schema.items():
        if key in raw:
            try:
                params[key] = CONVERTERS[spec.kind](raw[key])
            except (ValueError, TypeError) as exc:
                raise DomainError(f"bad value for {key}: {raw[key]!r}") from exc
        else:
            params[key] = spec.default
    return ScenarioConfig(scenario, params)
