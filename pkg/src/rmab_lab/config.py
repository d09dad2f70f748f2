"""Flat ``key=value`` experiment configuration.

The same format serves as input file and as run manifest: a manifest lists
every resolved field, so feeding it back reproduces the run.
"""

import os
from dataclasses import dataclass, fields
from pathlib import Path

from . import __version__
from .rng import RNG_ALGORITHM

COMMANDS = ("simulate", "regret", "profile", "oracle-check", "chernoff-check")
DEFAULT_SEED = 12345
SEED_ENV = "RMAB_LAB_SEED"
# written to manifests for provenance, ignored when read back
INFO_KEYS = ("artifact_version", "rng_algorithm")


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(message)
        self.field = field_name


@dataclass
class ExperimentConfig:
    command: str = "simulate"
    p01: float = 0.2
    p11: float = 0.8
    channels: int = 2
    schedule: str = "log"
    horizon: int = 10_000
    checkpoints: str = ""
    reps: int = 1
    seed: int = DEFAULT_SEED
    belief: str = "stationary"
    belief_mode: str = "carry"
    out: str = "results"
    jobs: int = 1
    length: int = 12
    burn_in: int = 1000
    lengths: str = "10,100,1000"
    mu: float = 0.5
    drift: float = 0.1
    b_range: float = 1.0
    n_values: str = "10,100"
    a_values: str = "0,sqrt,0.1n"
    trials: int = 100_000
    generators: str = "bernoulli,drift"

    def to_text(self) -> str:
        lines = [f"{f.name}={getattr(self, f.name)}" for f in fields(self)]
        lines.append(f"artifact_version={__version__}")
        lines.append(f"rng_algorithm={RNG_ALGORITHM}")
        return "\n".join(lines) + "\n"


FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}
_CASTS = {"int": int, "float": float, "str": str, int: int, float: float, str: str}


def parse_text(text: str, source: str = "<config>") -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError("config", f"{source}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key in INFO_KEYS:
            continue
        if key not in FIELD_TYPES:
            raise ConfigError(key, f"{source}:{lineno}: unknown key")
        values[key] = value
    return values


def coerce(values: dict) -> dict:
    out = {}
    for key, value in values.items():
        if value is None:
            continue
        cast = _CASTS[FIELD_TYPES[key]]
        try:
            out[key] = cast(value) if cast is not int else int(str(value), 0)
        except ValueError:
            raise ConfigError(key, f"cannot parse {value!r} as {cast.__name__}") from None
    return out


def resolve(command: str, file_path=None, overrides=None) -> ExperimentConfig:
    """Defaults < environment seed < config file < command-line overrides."""
    values = {}
    env_seed = os.environ.get(SEED_ENV)
    if env_seed:
        values["seed"] = env_seed
    if file_path is not None:
        path = Path(file_path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError("config", f"cannot read {path}: {exc}") from None
        values.update(parse_text(text, str(path)))
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    if "command" in values and values["command"] != command:
        raise ConfigError("command", f"config is for {values['command']!r}, not {command!r}")
    values["command"] = command
    return ExperimentConfig(**coerce(values))
