"""Synthetic demo park: one day of heating, rotating and storage baselines.

Stands in for measured park data. Everything is derived from a RunConfig
and its seed, so the same config always yields the same profiles.
"""
from __future__ import annotations

import math

import numpy as np

from .config import RunConfig
from .demand_response import TARGET_IDS, ResponseTarget, make_target
from .errors import SpecError
from .load_models import (
    BuildingThermalSpec,
    FurnaceCycleSpec,
    RollingScheduleSpec,
    eaf_profile,
    building_heat_profile,
    make_band_noise,
    rolling_profile,
    soc_step,
)
from .profile import LoadProfile


def rolling_spec(cfg: RunConfig) -> RollingScheduleSpec:
    r = cfg.rolling
    offsets = tuple(i * r.billet_interval for i in range(r.billet_count))
    return RollingScheduleSpec(
        pulse_power=r.pulse_power, pulse_width=r.pulse_width, rough_pass_count=r.rough_pass_count,
        rough_offsets=offsets, finishing_offsets=offsets, billet_count=r.billet_count,
        finishing_mill_count=r.finishing_mill_count, start=r.start, finishing_delay=r.finishing_delay,
    )


def furnace_cycles(cfg: RunConfig) -> list[FurnaceCycleSpec]:
    f = cfg.furnace
    if f.heats < 0:
        raise SpecError("furnace.heats must be >= 0")
    cycles = []
    for k in range(f.heats):
        t_on = (f.first_on + k * (f.heat_duration + f.heat_gap)) * 60.0
        t_off = t_on + f.heat_duration * 60.0
        plateau = t_off - t_on - f.ramp_up - f.ramp_down
        count = max(1, math.ceil(plateau / f.noise_interval)) if plateau > 0 else 1
        noise = make_band_noise(count, f.max_deviation, seed=cfg.seed * 1000 + k)
        cycles.append(FurnaceCycleSpec(t_on=t_on, t_off=t_off, ramp_up=f.ramp_up, ramp_down=f.ramp_down,
                                       rated_power=f.rated_power, max_deviation=f.max_deviation,
                                       band_noise=noise, noise_interval=f.noise_interval))
    return cycles


def building_load(cfg: RunConfig, n: int, step: float) -> LoadProfile:
    b = cfg.building
    spec = BuildingThermalSpec(thermal_resistance=b.thermal_resistance, time_constant=b.time_constant,
                               t_in_min=b.t_in_min, t_in_max=b.t_in_max)
    hours = np.arange(n + 1) * step / 60.0
    night = ((hours % 24) >= 22) | ((hours % 24) < 6)
    setpoints = np.where(night, b.setpoint - b.night_setback, b.setpoint)
    outdoor = b.outdoor_mean + b.outdoor_amplitude * np.cos(2 * np.pi * (hours[:-1] - 14.0) / 24.0)
    return building_heat_profile(spec, setpoints.tolist(), outdoor.tolist(), cfg.start_time, step, step / 60.0)


def storage_baseline(cfg: RunConfig, n: int, step: float) -> LoadProfile:
    """Nominal charge/discharge routine, checked against the SOC ledger."""
    s = cfg.storage_schedule
    spec = cfg.storage
    dt = step / 60.0
    hours = (np.arange(n) * dt) % 24
    charging = (hours >= s.charge_start) & (hours < s.charge_start + s.charge_hours)
    discharging = (hours >= s.discharge_start) & (hours < s.discharge_start + s.discharge_hours)
    charge_kwh = s.charge_power * charging.sum() * dt * spec.charge_efficiency
    dis_power = charge_kwh * spec.discharge_efficiency / max(discharging.sum() * dt, 1e-12)
    power = np.where(charging, s.charge_power, 0.0) - np.where(discharging, dis_power, 0.0)
    soc = spec.soc_initial
    for p in power:
        soc = soc_step(soc, max(p, 0.0), min(p, 0.0), dt, spec)
    return LoadProfile.from_array(cfg.start_time, step, power)


def simulate_baselines(cfg: RunConfig) -> dict[str, LoadProfile]:
    """Daily baselines keyed by load kind: H (furnace + buildings), R (rolling), S (storage)."""
    n = cfg.points_per_day
    step = 1440 / n
    furnace = eaf_profile(furnace_cycles(cfg), cfg.start_time, step, n)
    heating = furnace.with_values(furnace.array + building_load(cfg, n, step).array)
    rotating = rolling_profile(rolling_spec(cfg), cfg.start_time, step, n)
    return {"H": heating, "R": rotating, "S": storage_baseline(cfg, n, step)}


def demo_targets(cfg: RunConfig, horizon: int, step: float) -> list[ResponseTarget]:
    return [make_target(tid, horizon, cfg.targets[tid].demand_kw, step) for tid in TARGET_IDS]
