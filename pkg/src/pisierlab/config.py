"""Experiment configuration and its flat ``key = value`` file format.

Example::

    experiment = sweep-gt
    n = 6
    p = 1, 2, 3, inf
    spaces = lr:1:3; lr:2:3; lr:4:3
    t = 0.05:0.95:0.05
    samples = 100
    seed = 7
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .cube import caps
from .spaces import parse_exponent, parse_space

EXPERIMENTS = ("verify", "constants", "bounds", "lowerbound", "sweep-gt", "sweep-vt")


class ConfigError(ValueError):
    pass


def _grid(start, stop, step):
    count = int(round((stop - start) / step)) + 1
    return [round(start + i * step, 12) for i in range(count)]


@dataclass
class ExperimentConfig:
    experiment: str = "verify"
    n: list[int] = field(default_factory=lambda: [2, 3, 4, 5])
    p: list[float] = field(default_factory=lambda: [2.0])
    spaces: list[str] = field(default_factory=lambda: ["lr:2:3"])
    t: list[float] = field(default_factory=lambda: _grid(0.1, 0.9, 0.1))
    theta: list[float] = field(default_factory=lambda: [0.25, 0.5, 0.75])
    samples: int = 20
    seed: int = 0
    out: str | None = None
    format: str = "csv"
    restarts: int = 50
    max_iter: int = 500
    workers: int = 1
    timing: bool = False

    def validate(self) -> ExperimentConfig:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; choose from {', '.join(EXPERIMENTS)}")
        for name in ("n", "p", "spaces", "t"):
            if not getattr(self, name):
                raise ConfigError(f"{name} grid must not be empty")
        if any(k < 1 for k in self.n):
            raise ConfigError("n values must be >= 1")
        cap = caps()["cube"]
        if max(self.n) > cap:
            raise ConfigError(f"n={max(self.n)} exceeds the cube cap {cap}")
        if any(not 0 < t < 1 for t in self.t):
            raise ConfigError("t grid must lie inside (0, 1)")
        if any(not 0 < th < 1 for th in self.theta):
            raise ConfigError("theta grid must lie inside (0, 1)")
        for s in self.spaces:
            try:
                parse_space(s)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")
        for name in ("samples", "restarts", "max_iter", "workers"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        return self

    @classmethod
    def defaults(cls, experiment: str) -> ExperimentConfig:
        base = cls(experiment=experiment)
        l3 = ["lr:1:3", "lr:1.5:3", "lr:2:3", "lr:4:3", "lr:inf:3"]
        presets = {
            "verify": dict(n=[2, 3, 4, 5], samples=20),
            "constants": dict(n=[1, 2, 3, 4, 5], p=[2.0], spaces=l3),
            "bounds": dict(n=list(range(1, 9)), p=[1.5, 2.0, 3.0], t=_grid(0.1, 0.9, 0.1)),
            "lowerbound": dict(n=list(range(1, 13)), p=[2.0]),
            "sweep-gt": dict(n=[6], p=[1.0, 2.0, 3.0, float("inf")], spaces=["lr:1:3", "lr:2:3", "lr:4:3"],
                             t=_grid(0.05, 0.95, 0.05), samples=100),
            "sweep-vt": dict(n=list(range(1, 9)), p=[1.5, 2.0, 3.0], t=_grid(0.1, 0.9, 0.1), samples=200),
        }
        if experiment not in presets:
            raise ConfigError(f"unknown experiment {experiment!r}")
        return replace(base, **presets[experiment])


def _parse_ints(text: str) -> list[int]:
    out = []
    for part in text.replace(" ", "").split(","):
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def _parse_floats(text: str, exponent: bool = False) -> list[float]:
    text = text.strip()
    if not exponent and text.count(":") == 2:
        return _grid(*(float(v) for v in text.split(":")))
    conv = parse_exponent if exponent else float
    return [conv(v) for v in text.replace(" ", "").split(",") if v]


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


PARSERS = {
    "experiment": str.strip,
    "n": _parse_ints,
    "p": lambda s: _parse_floats(s, exponent=True),
    "spaces": lambda s: [x for x in s.replace(";", " ").split() if x],
    "t": _parse_floats,
    "theta": _parse_floats,
    "samples": int,
    "seed": int,
    "out": str.strip,
    "format": str.strip,
    "restarts": int,
    "max_iter": int,
    "workers": int,
    "timing": _parse_bool,
}
assert set(PARSERS) == {f.name for f in fields(ExperimentConfig)}


def parse_overrides(pairs: dict[str, str]) -> dict:
    out = {}
    for key, raw in pairs.items():
        key = key.strip().replace("-", "_")
        if key not in PARSERS:
            raise ConfigError(f"unknown config key {key!r}")
        try:
            out[key] = PARSERS[key](raw)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {exc}") from None
    return out


def read_config_file(path: str | Path) -> dict[str, str]:
    pairs = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        pairs[key.strip()] = value.strip()
    return pairs


def row_seed(seed: int, key: str) -> int:
    """Per-row seed derived from the run seed and a stable row key."""
    digest = np.frombuffer(key.encode(), dtype=np.uint8).astype(np.uint32)
    return int(np.random.SeedSequence([seed, *digest.tolist()]).generate_state(1)[0])
