"""Run configuration read from a plain-text ``key = value`` file.

Blank lines and lines starting with ``#`` are ignored. Keys are either
top-level (``seed``, ``out``, ``start_date``, ``points_per_day``,
``heating_csv``, ``rotating_csv``, ``storage_csv``) or ``section.field``
where the section is one of ``rolling``, ``furnace``, ``building``,
``storage_schedule``, ``storage``, ``dispatch``, ``augment`` or
``target.<target id>``. Unknown keys are errors. See README.md for the full
list and the defaults.
"""
from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any

from .demand_response import TARGET_IDS, DispatchParams
from .errors import ConfigError, SpecError
from .load_models import StorageSpec
from .scenario_gen import AugmentationConfig


@dataclass(frozen=True)
class RollingConfig:
    pulse_power: float = 3200.0  # kW
    pulse_width: float = 1.2  # min
    rough_pass_count: int = 5
    finishing_mill_count: int = 6
    finishing_delay: float = 9.0  # min after the first rough pass
    billet_interval: float = 12.0  # min between billets
    billet_count: int = 100
    start: float = 120.0  # min after midnight


@dataclass(frozen=True)
class FurnaceConfig:
    rated_power: float = 6000.0  # kW
    ramp_up: float = 20.0  # s
    ramp_down: float = 10.0  # s
    max_deviation: float = 0.1
    noise_interval: float = 5.0  # s
    heat_duration: float = 50.0  # min, power on
    heat_gap: float = 25.0  # min, power off between heats
    first_on: float = 0.0  # min after midnight
    heats: int = 19


@dataclass(frozen=True)
class BuildingConfig:
    thermal_resistance: float = 0.02  # degC / kW
    time_constant: float = 10.0  # h
    setpoint: float = 20.0  # degC
    night_setback: float = 1.0  # degC lower between 22:00 and 06:00
    outdoor_mean: float = -8.0  # degC
    outdoor_amplitude: float = 5.0  # degC, warmest at 14:00
    t_in_min: float = 16.0
    t_in_max: float = 24.0


@dataclass(frozen=True)
class StorageScheduleConfig:
    """Nominal daily storage operation used as its baseline (kW, charge > 0)."""

    charge_power: float = 500.0
    charge_start: int = 0  # hour
    charge_hours: int = 4
    discharge_start: int = 17
    discharge_hours: int = 4


@dataclass(frozen=True)
class TargetConfig:
    demand_kw: float


DEFAULT_DEMAND = {"only_night": 6000.0, "all_day": 5000.0, "only_daytime": 7000.0}


@dataclass(frozen=True)
class RunConfig:
    seed: int = 2019
    out: str = "out"
    start_date: str = "2019-01-15"
    points_per_day: int = 24
    heating_csv: str | None = None
    rotating_csv: str | None = None
    storage_csv: str | None = None
    rolling: RollingConfig = field(default_factory=RollingConfig)
    furnace: FurnaceConfig = field(default_factory=FurnaceConfig)
    building: BuildingConfig = field(default_factory=BuildingConfig)
    storage_schedule: StorageScheduleConfig = field(default_factory=StorageScheduleConfig)
    storage: StorageSpec = field(default_factory=StorageSpec)
    dispatch: DispatchParams = field(default_factory=DispatchParams)
    augment: AugmentationConfig = field(default_factory=AugmentationConfig)
    targets: dict[str, TargetConfig] = field(
        default_factory=lambda: {k: TargetConfig(v) for k, v in DEFAULT_DEMAND.items()})

    @property
    def start_time(self) -> datetime:
        try:
            return datetime.fromisoformat(self.start_date)
        except ValueError:
            raise ConfigError(f"start_date: not an ISO date: {self.start_date!r}") from None

    def dispatch_params(self) -> DispatchParams:
        return dataclasses.replace(self.dispatch, storage=self.storage)

    def input_paths(self) -> dict[str, str | None]:
        return {"H": self.heating_csv, "R": self.rotating_csv, "S": self.storage_csv}


SECTIONS = ("rolling", "furnace", "building", "storage_schedule", "storage", "dispatch", "augment")
_TOP_LEVEL = {"seed": int, "out": str, "start_date": str, "points_per_day": int,
              "heating_csv": str, "rotating_csv": str, "storage_csv": str}


def _coerce(raw: str, kind: Any, key: str) -> Any:
    kind = {"int": int, "float": float, "str": str, "bool": bool}.get(kind, kind) if isinstance(kind, str) else kind
    try:
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        if kind is bool:
            if raw.lower() in ("1", "true", "yes", "on"):
                return True
            if raw.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
    except ValueError:
        name = getattr(kind, "__name__", str(kind))
        raise ConfigError(f"{key}: expected {name}, got {raw!r}") from None
    return raw


def _field_kind(cls: type, name: str) -> Any:
    for f in dataclasses.fields(cls):
        if f.name == name:
            t = f.type if isinstance(f.type, str) else getattr(f.type, "__name__", str(f.type))
            return t.split(" |")[0].strip()
    return None


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    top: dict[str, Any] = {}
    sections: dict[str, dict[str, Any]] = {s: {} for s in SECTIONS}
    targets = dict(DEFAULT_DEMAND)
    cfg = RunConfig()
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        where = f"{source}:{lineno}: {key}"
        if key in _TOP_LEVEL:
            top[key] = _coerce(raw, _TOP_LEVEL[key], where)
            continue
        section, _, name = key.rpartition(".")
        if section.startswith("target."):
            tid = section.split(".", 1)[1]
            if tid not in TARGET_IDS or name != "demand_kw":
                raise ConfigError(f"{where}: unknown key")
            targets[tid] = _coerce(raw, float, where)
            continue
        if section not in sections:
            raise ConfigError(f"{where}: unknown key")
        kind = _field_kind(type(getattr(cfg, section)), name)
        if kind is None or kind.startswith("tuple") or kind == "StorageSpec":
            raise ConfigError(f"{where}: unknown key")
        sections[section][name] = _coerce(raw, kind, where)
    try:
        built = {s: dataclasses.replace(getattr(cfg, s), **vals) for s, vals in sections.items()}
        out = dataclasses.replace(cfg, **top, **built,
                                  targets={k: TargetConfig(v) for k, v in targets.items()})
    except SpecError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    for tid, t in out.targets.items():
        if t.demand_kw < 0:
            raise ConfigError(f"{source}: target.{tid}.demand_kw must be >= 0")
    if out.points_per_day < 1 or 1440 % out.points_per_day:
        raise ConfigError(f"{source}: points_per_day must divide 1440")
    out.start_time  # validates the date
    return out


def load_config(path: str | os.PathLike | None) -> RunConfig:
    if path is None:
        return RunConfig()
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    cfg = parse_config(text, str(path))
    # relative input paths are relative to the config file
    fixed = {}
    for key in ("heating_csv", "rotating_csv", "storage_csv"):
        value = getattr(cfg, key)
        if value is not None and not os.path.isabs(value):
            fixed[key] = str(path.parent / value)
    return dataclasses.replace(cfg, **fixed)
