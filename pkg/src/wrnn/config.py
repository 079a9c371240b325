"""Run configuration read from ``key = value`` text files."""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace

from .network import TrainConfig, WrnnTopology

CONFIG_ENV = "WRNN_CONFIG"

_PATH_KEYS = ("input", "model", "output", "curve")


@dataclass(frozen=True)
class RunConfig:
    input: str = ""
    model: str = ""
    output: str = ""
    curve: str = ""
    levels: int = 4
    horizon: int = 6
    learning_rate: float = 0.01
    momentum: float = 0.9
    lr_increase: float = 1.05
    lr_decrease: float = 0.7
    max_error_growth: float = 1.04
    epochs: int = 3000
    train_fraction: float = 1.0
    holdout_hours: int = 500
    seed: int = 0

    def __post_init__(self):
        used = [p for p in (getattr(self, k) for k in _PATH_KEYS) if p]
        if len(set(map(os.path.abspath, used))) != len(used):
            raise ValueError("input, model, output and curve paths must be distinct")
        if self.holdout_hours < 0:
            raise ValueError("holdout_hours must be >= 0")
        # fail early on values the model would reject
        self.train_config()
        self.topology()

    def train_config(self):
        return TrainConfig(learning_rate=self.learning_rate, momentum=self.momentum,
                           lr_increase=self.lr_increase, lr_decrease=self.lr_decrease,
                           max_error_growth=self.max_error_growth, epochs=self.epochs,
                           seed=self.seed, train_fraction=self.train_fraction)

    def topology(self):
        return WrnnTopology(levels=self.levels, horizon=self.horizon)

    def updated(self, **overrides):
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


def parse_config_text(text, source="<config>"):
    """Parse ``key = value`` lines (``#`` starts a comment) into typed values."""
    types = {f.name: f.type for f in fields(RunConfig)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ValueError(f"{source}:{lineno}: expected 'key = value'")
        if key not in types:
            raise ValueError(f"{source}:{lineno}: unknown key {key!r}")
        conv = {"int": int, "float": float, "str": str}[types[key]]
        try:
            values[key] = conv(value)
        except ValueError:
            raise ValueError(f"{source}:{lineno}: bad value for {key}: {value!r}") from None
    return values


def load_config(path=None):
    """Load a config file; ``path=None`` falls back to ``$WRNN_CONFIG``.

    Returns the defaults when neither is given.
    """
    path = path or os.environ.get(CONFIG_ENV)
    if not path:
        return RunConfig()
    with open(path, encoding="utf-8") as fh:
        return RunConfig(**parse_config_text(fh.read(), path))
