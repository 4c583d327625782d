"""JSON run configuration for the command-line tool.

A config file is a flat JSON object. ``params`` holds the physical
parameters; every other key selects or tunes an experiment. Unknown keys are
errors. Bench reports embed their resolved config under ``"config"``, and a
report file is itself accepted as a config, which is how runs are replayed.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .ion_model import PhysicalParams, check_regime

CONFIG_ENV = "IONPAIR_CONFIG"
EXPERIMENTS = ("dephasing", "delay", "oracle")
KIND_ALIASES = {
    "collective": "collective-dephasing",
    "independent": "independent-dephasing",
    "collective-dephasing": "collective-dephasing",
    "independent-dephasing": "independent-dephasing",
}


class ConfigError(ValueError):
    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


@dataclass
class RunConfig:
    params: dict = field(default_factory=lambda: asdict(PhysicalParams()))
    experiment: str = "dephasing"
    kind: str = "collective-dephasing"
    sigma_grid: list = field(default_factory=lambda: [0.0])
    delay_grid: list = field(default_factory=list)
    encoding: str = "pair"
    marked: str = "|11>"
    level: str = "logical"
    trials: int = 1000
    seed: int = 0

    def physical(self) -> PhysicalParams:
        return PhysicalParams(**self.params)

    def to_dict(self) -> dict:
        return asdict(self)


_PARAM_KEYS = {f.name for f in fields(PhysicalParams)}
_KEYS = {f.name for f in fields(RunConfig)}


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def validate(data: dict) -> tuple[RunConfig, list[str]]:
    """Build a RunConfig, collecting every violated constraint and regime warning.

    Raises ConfigError listing all problems; returns (config, warnings) otherwise.
    """
    if not isinstance(data, dict):
        raise ConfigError(["config must be a JSON object"])
    problems: list[str] = []
    unknown = sorted(set(data) - _KEYS)
    if unknown:
        problems.append(f"unknown keys: {', '.join(unknown)}")
    merged = RunConfig().to_dict()
    merged.update({k: v for k, v in data.items() if k in _KEYS})

    params = dict(RunConfig().params)
    raw_params = merged["params"]
    if not isinstance(raw_params, dict):
        problems.append("params must be an object")
        raw_params = {}
    bad = sorted(set(raw_params) - _PARAM_KEYS)
    if bad:
        problems.append(f"unknown params: {', '.join(bad)}")
    for k in _PARAM_KEYS & set(raw_params):
        if not _is_number(raw_params[k]):
            problems.append(f"params.{k} must be a finite number")
        else:
            params[k] = float(raw_params[k])
    merged["params"] = params
    if params["eta"] <= 0:
        problems.append("params.eta must be positive")
    if params["omega"] <= 0:
        problems.append("params.omega must be positive")
    if not params["delta"] > 0:
        problems.append("params.delta must be positive")
    if not params["nu"] > params["delta"]:
        problems.append("params.nu must exceed params.delta")

    if merged["experiment"] not in EXPERIMENTS:
        problems.append(f"experiment must be one of {EXPERIMENTS}")
    if merged["kind"] not in KIND_ALIASES:
        problems.append(f"kind must be one of {sorted(set(KIND_ALIASES.values()))}")
    else:
        merged["kind"] = KIND_ALIASES[merged["kind"]]
    if merged["encoding"] not in ("pair", "bare"):
        problems.append("encoding must be 'pair' or 'bare'")
    if merged["level"] not in ("logical", "physical"):
        problems.append("level must be 'logical' or 'physical'")
    marked = str(merged["marked"]).strip().strip("|>")
    if marked not in ("00", "01", "10", "11"):
        problems.append("marked must be one of 00, 01, 10, 11")
    else:
        merged["marked"] = f"|{marked}>"
    for key in ("trials", "seed"):
        v = merged[key]
        if not isinstance(v, int) or isinstance(v, bool):
            problems.append(f"{key} must be an integer")
    if isinstance(merged["trials"], int) and merged["trials"] < 100 and merged["experiment"] != "delay":
        problems.append("trials must be at least 100")
    if isinstance(merged["seed"], int) and merged["seed"] < 0:
        problems.append("seed must be non-negative")
    for key in ("sigma_grid", "delay_grid"):
        grid = merged[key]
        if not isinstance(grid, list) or not all(_is_number(x) and x >= 0 for x in grid):
            problems.append(f"{key} must be a list of non-negative numbers")
        else:
            merged[key] = [float(x) for x in grid]
    if merged["experiment"] == "dephasing" and not merged["sigma_grid"]:
        problems.append("sigma_grid must not be empty")
    if merged["experiment"] == "delay" and not merged["delay_grid"]:
        problems.append("delay_grid must not be empty")
    if problems:
        raise ConfigError(problems)

    cfg = RunConfig(**merged)
    report = check_regime(cfg.physical())
    return cfg, report.warnings()


def load(path: str | os.PathLike) -> dict:
    """Read a config file; a bench report is unwrapped to its embedded config."""
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"{path}: invalid JSON ({exc})"]) from None
    if isinstance(data, dict) and "config" in data and "experiment" in data and "points" in data:
        data = data["config"]
    return data


def default_path() -> str | None:
    return os.environ.get(CONFIG_ENV) or None
