"""Run configuration: seeds, sample counts, tolerances, output locations.

Precedence, lowest to highest: built-in defaults, the ``EPME_SEED``
environment variable (seed only), a ``key = value`` config file, CLI flags.
Identical configurations produce byte-identical outputs.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

DEFAULT_TOLERANCES = {
    "eigen": 1e-9,
    "det": 1e-9,
    "sigma": 1e-8,
    "pencil_residual": 1e-8,
    "eigenspace_residual": 1e-8,
    "norm_match": 1e-10,
    "det_section": 1e-9,
    "dissipation_delta": 1e-6,
    "catenary_residual": 1e-8,
    "integration": 1e-7,
}

FORMATS = ("csv", "json", "svg")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    seed: int = 42
    num_points: int = 100
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    output_dir: Path = Path("out")
    format: str = "csv"

    def tol(self, name: str) -> float:
        return self.tolerances[name]


def parse_config_file(path) -> dict:
    """Plain ``key = value`` lines; '#' starts a comment."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, _, val = line.partition("=")
        values[key.strip()] = val.strip()
    return values


def _apply(config: RunConfig, values: dict) -> None:
    for key, val in values.items():
        if val is None:
            continue
        if key == "seed":
            config.seed = int(val)
        elif key == "points":
            config.num_points = int(val)
        elif key == "out":
            config.output_dir = Path(val)
        elif key == "format":
            if val not in FORMATS:
                raise ConfigError(f"unknown format {val!r}")
            config.format = val
        elif key.startswith("tol."):
            name = key[4:]
            if name not in config.tolerances:
                raise ConfigError(f"unknown tolerance {name!r}")
            config.tolerances[name] = float(val)
        else:
            raise ConfigError(f"unknown config key {key!r}")


def resolve_config(cli_values: dict | None = None,
                   config_path=None, env=None) -> RunConfig:
    """Build a RunConfig honoring the precedence order."""
    env = os.environ if env is None else env
    config = RunConfig()
    if "EPME_SEED" in env:
        try:
            config.seed = int(env["EPME_SEED"])
        except ValueError:
            raise ConfigError("EPME_SEED must be an integer")
    if config_path is not None:
        _apply(config, parse_config_file(config_path))
    if cli_values:
        _apply(config, cli_values)
    if config.num_points < 1:
        raise ConfigError("points must be at least 1")
    return config
