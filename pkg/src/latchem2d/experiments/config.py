"""Flat ``key = value`` experiment configuration files.

Values are parsed as Python literals where possible (numbers, booleans,
``[..]`` lists); a bare comma-separated value becomes a list; anything else is
kept as a string.  ``#`` starts a comment.  Ranges may be written
``start:stop:step`` (inclusive stop) for integer grids.
"""
from __future__ import annotations

import ast
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ConfigError

_BOOLS = {"true": True, "false": False, "yes": True, "no": False}


def _parse_scalar(text: str):
    low = text.lower()
    if low in _BOOLS:
        return _BOOLS[low]
    if low in ("none", "null"):
        return None
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError):
        return text


def parse_value(text: str):
    text = text.strip()
    if not text:
        raise ConfigError("empty value")
    if text.count(":") in (1, 2) and not text.startswith(("[", "(", "'", '"')):
        parts = text.split(":")
        try:
            nums = [int(p) for p in parts]
        except ValueError:
            nums = None
        if nums is not None:
            start, stop = nums[0], nums[1]
            step = nums[2] if len(nums) == 3 else 1
            if step == 0:
                raise ConfigError(f"zero step in range {text!r}")
            return list(range(start, stop + (1 if step > 0 else -1), step))
    if "," in text and not text.startswith(("[", "(")):
        return [_parse_scalar(p.strip()) for p in text.split(",") if p.strip()]
    value = _parse_scalar(text)
    if isinstance(value, tuple):
        value = list(value)
    return value


def parse_config_text(text: str) -> dict:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: missing key")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            out[key] = parse_value(value)
        except ConfigError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from exc
    return out


@dataclass
class ExperimentConfig:
    """Typed access to a flat configuration with per-experiment defaults."""

    experiment: str
    values: dict = field(default_factory=dict)
    seed: int = 0

    @classmethod
    def from_file(cls, path, experiment: str, defaults: dict | None = None, seed: int | None = None):
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(experiment, parse_config_text(text), defaults, seed)

    @classmethod
    def from_dict(cls, experiment: str, values: dict, defaults: dict | None = None, seed: int | None = None):
        merged = dict(defaults or {})
        merged.update(values)
        if seed is None:
            seed = int(merged.get("seed", 0))
        merged["seed"] = seed
        unknown = sorted(set(values) - set(defaults or {}) - {"seed", "experiment"}) if defaults else []
        if unknown:
            raise ConfigError(f"unknown keys for {experiment}: {', '.join(unknown)}")
        return cls(experiment, merged, seed)

    def get(self, key, default=None):
        return self.values.get(key, default)

    def number(self, key) -> float:
        v = self.values.get(key)
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{key} must be a number, got {v!r}")
        return float(v)

    def integer(self, key) -> int:
        v = self.values.get(key)
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError(f"{key} must be an integer, got {v!r}")
        return v

    def text(self, key, choices=None) -> str:
        v = self.values.get(key)
        if not isinstance(v, str):
            raise ConfigError(f"{key} must be a string, got {v!r}")
        if choices is not None and v not in choices:
            raise ConfigError(f"{key} must be one of {choices}, got {v!r}")
        return v

    def grid(self, key, integer: bool = False, monotone: bool = True) -> list:
        v = self.values.get(key)
        if v is None:
            raise ConfigError(f"missing grid {key}")
        if not isinstance(v, list):
            v = [v]
        if not v:
            raise ConfigError(f"grid {key} is empty")
        for item in v:
            ok = isinstance(item, int) if integer else isinstance(item, (int, float))
            if isinstance(item, bool) or not ok:
                raise ConfigError(f"grid {key} holds a non-numeric entry {item!r}")
        if monotone and len(v) > 1:
            d = np.diff(np.asarray(v, dtype=float))
            if not (np.all(d > 0) or np.all(d < 0)):
                raise ConfigError(f"grid {key} must be strictly monotone")
        return [int(x) for x in v] if integer else [float(x) for x in v]

    def echo(self) -> dict:
        return {"experiment": self.experiment, **{k: self.values[k] for k in sorted(self.values)}}
