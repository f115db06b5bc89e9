"""Run configuration: flat ``key=value`` files with ``#`` comments, plus validation."""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, fields
from pathlib import Path

from .agents import ArbiterConfig

OUT_ENV_VAR = "VOI_ARBITER_OUT"
AGENT_CHOICES = ("arbiter", "qlearning", "replay")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    agent: str = "arbiter"
    alpha: float = 0.8
    gamma: float = 0.9
    max_depth: int = 2
    rho: float = 0.9
    voi_threshold: float = 0.1
    voi_mult: float = 1.005
    epsilon: float = 1e-6
    history_window: int = 10
    replay_capacity: int = 50_000
    replay_batch_size: int = 32
    max_steps: int = 200
    num_runs: int = 100
    num_episodes: int = 500
    base_seed: int = 0
    workers: int = 1
    out_dir: str = "results"

    def validate(self) -> "RunConfig":
        if self.agent not in AGENT_CHOICES:
            raise ConfigError(f"agent must be one of {AGENT_CHOICES}, got {self.agent!r}")
        try:
            self.arbiter_config()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        for name in ("replay_capacity", "max_steps", "num_runs", "num_episodes", "workers"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.replay_batch_size < 0:
            raise ConfigError(f"replay_batch_size must be >= 0, got {self.replay_batch_size}")
        return self

    def arbiter_config(self) -> ArbiterConfig:
        return ArbiterConfig(
            alpha=self.alpha,
            gamma=self.gamma,
            max_depth=self.max_depth,
            rho=self.rho,
            voi_threshold=self.voi_threshold,
            voi_mult=self.voi_mult,
            epsilon=self.epsilon,
            history_window=self.history_window,
        )

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)

    def to_text(self) -> str:
        return "".join(f"{f.name}={getattr(self, f.name)!r}\n".replace("'", "") for f in fields(self))


_TYPES = {f.name: f.type for f in fields(RunConfig)}
_CASTS = {"int": int, "float": float, "str": str}


def coerce(key: str, raw: str):
    if key not in _TYPES:
        raise ConfigError(f"unknown config key {key!r}")
    cast = _CASTS[_TYPES[key]]
    try:
        return cast(raw.strip())
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw.strip()!r}") from None


def parse_config_text(text: str, source: str = "<string>") -> dict:
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key=value, got {line!r}")
        key, raw = line.split("=", 1)
        key = key.strip().replace("-", "_")
        values[key] = coerce(key, raw)
    return values


def load_config(path: str | Path | None = None, overrides: dict | None = None) -> RunConfig:
    """Defaults, then the file at ``path``, then ``overrides``, then $VOI_ARBITER_OUT."""
    values = {}
    if path is not None:
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config file not found: {p}")
        values.update(parse_config_text(p.read_text(), str(p)))
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    if os.environ.get(OUT_ENV_VAR):
        values["out_dir"] = os.environ[OUT_ENV_VAR]
    return RunConfig(**values).validate()
