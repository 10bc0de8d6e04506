"""Run configuration: TOML files, shipped presets and command-line overrides.

Unknown keys are rejected with the full dotted key name so that typos
fail fast instead of silently falling back to defaults.
"""
from __future__ import annotations

import copy
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .feedback import ErrorModel, FQErgoConfig
from .hamiltonians import SYSTEMS, build_system

TASKS = ("suite", "single", "entangled")
FORMATS = ("csv", "json", "svg")

DEFAULTS = {
    "preset": "",
    "task": "suite",
    "system": "1q-default",
    "n_states": 20,
    "seed": 0,
    "error_on": False,
    "state": "random_pure",
    "local_opt": True,
    "system_params": {"omega0": 1.0, "j": 0.01, "delta": 0.1, "units": "spin", "per_qubit": True},
    "fqergo": {
        "w": 1.0,
        "tau": 0.8,
        "phases": [["local", 30]],
        "measurement": "exact",
        "n_shots": 0,
        "alpha": 0.01,
        "error": "none",
        "tol": 1e-3,
        "window": 3,
        "drive_mode": "sequential",
        "beta_timing": "sequential",
        "kick": 0.5,
        "kick_threshold": 1e-6,
    },
    "entangled": {"nus": [0.0, 0.7853981633974483, 1.5707963267948966, 2.356194490192345, 3.141592653589793]},
    "output": {"formats": ["csv", "json", "svg"]},
}


class ConfigError(ValueError):
    def __init__(self, message: str, key: str | None = None):
        self.key = key
        super().__init__(f"{key}: {message}" if key else message)


def _check_type(key, default, value):
    if isinstance(default, bool):
        ok = isinstance(value, bool)
    elif isinstance(default, float):
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
    elif isinstance(default, int):
        ok = isinstance(value, int) and not isinstance(value, bool)
    elif isinstance(default, str):
        ok = isinstance(value, str)
    elif isinstance(default, list):
        ok = isinstance(value, list)
    else:
        ok = True
    if not ok:
        raise ConfigError(f"expected {type(default).__name__}, got {value!r}", key)


def merge(base: dict, update: dict, prefix: str = "") -> dict:
    """Deep-merge ``update`` into a copy of ``base`` against the schema."""
    out = copy.deepcopy(base)
    for k, v in update.items():
        key = f"{prefix}{k}"
        if k not in _schema_at(prefix):
            raise ConfigError("unknown configuration key", key)
        schema = _schema_at(prefix)[k]
        if isinstance(schema, dict):
            if not isinstance(v, dict):
                raise ConfigError("expected a table", key)
            out[k] = merge(out.get(k, {}), v, key + ".")
        else:
            _check_type(key, schema, v)
            out[k] = v
    return out


def _schema_at(prefix: str) -> dict:
    node = DEFAULTS
    for part in [p for p in prefix.split(".") if p]:
        node = node[part]
    return node


def preset_names() -> list[str]:
    files = resources.files("fqergo").joinpath("presets").iterdir()
    return sorted(p.name[:-5] for p in files if p.name.endswith(".toml"))


def load_preset(name: str) -> dict:
    res = resources.files("fqergo").joinpath("presets", f"{name}.toml")
    if not res.is_file():
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(preset_names())}", "preset")
    return tomllib.loads(res.read_text())


def parse_override(item: str) -> dict:
    """``"fqergo.tau=1.5"`` -> ``{"fqergo": {"tau": 1.5}}``."""
    key, sep, raw = item.partition("=")
    if not sep or not key:
        raise ConfigError(f"override must look like key=value, got {item!r}")
    try:
        value = tomllib.loads(f"v = {raw}")["v"]
    except tomllib.TOMLDecodeError:
        value = raw
    out = value
    for part in reversed(key.strip().split(".")):
        out = {part: out}
    return out


@dataclass
class RunConfig:
    raw: dict
    task: str
    system: str
    n_states: int
    seed: int
    error_on: bool
    state: str
    local_opt: bool
    fqergo: FQErgoConfig
    system_params: dict
    nus: list
    formats: tuple = field(default_factory=lambda: FORMATS)

    def build_system(self):
        return build_system(self.system, **self.system_params)

    def fingerprint(self) -> dict:
        return {"preset": self.raw.get("preset", ""), "seed": self.seed, "system": self.system, "task": self.task}


def resolve(preset: str | None = None, path=None, overrides=()) -> RunConfig:
    """Layer defaults, preset, config file and overrides (in that order)."""
    layers = []
    file_data = {}
    if path is not None:
        try:
            file_data = tomllib.loads(Path(path).read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from None
    name = preset or file_data.get("preset") or ""
    if name:
        layers.append(load_preset(name))
    layers.append(file_data)
    layers.extend(overrides)
    data = DEFAULTS
    for layer in layers:
        data = merge(data, layer)
    if name:
        data["preset"] = name
    return _build(data)


def _build(data: dict) -> RunConfig:
    if data["task"] not in TASKS:
        raise ConfigError(f"must be one of {TASKS}", "task")
    if data["system"] not in SYSTEMS:
        raise ConfigError(f"must be one of {sorted(SYSTEMS)}", "system")
    if data["n_states"] < 1:
        raise ConfigError("must be >= 1", "n_states")
    fmts = tuple(data["output"]["formats"])
    bad = [f for f in fmts if f not in FORMATS]
    if bad:
        raise ConfigError(f"unknown formats {bad}", "output.formats")
    fq = dict(data["fqergo"])
    try:
        fq["error"] = ErrorModel.parse(fq["error"])
    except ValueError as exc:
        raise ConfigError(str(exc), "fqergo.error") from None
    fq["phases"] = tuple(tuple(p) for p in fq["phases"])
    fq["n_shots"] = fq["n_shots"] or None
    sp = dict(data["system_params"])
    try:
        _, drive_set = build_system(data["system"], **sp)
        fq_cfg = FQErgoConfig(drive_set=drive_set, delta=sp["delta"], seed=data["seed"], **fq)
    except ValueError as exc:
        raise ConfigError(str(exc), "fqergo") from None
    if data["system"] != "2q-global" and any(p == "global" for p, _ in fq_cfg.phases):
        raise ConfigError("global phases need system '2q-global'", "fqergo.phases")
    return RunConfig(
        raw=data,
        task=data["task"],
        system=data["system"],
        n_states=data["n_states"],
        seed=data["seed"],
        error_on=data["error_on"],
        state=data["state"],
        local_opt=data["local_opt"],
        fqergo=fq_cfg,
        system_params=sp,
        nus=list(data["entangled"]["nus"]),
        formats=fmts,
    )
