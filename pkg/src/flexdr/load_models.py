"""Power models of the industrial park's flexible loads.

Rotating loads (steel rolling) are trains of rectangular pulses, heating
loads (arc/refining furnaces) are trapezoids with a noisy plateau, storage
follows a Thevenin equivalent circuit plus an energy ledger for SOC, and
buildings follow a first-order thermal model.

Time units: rolling schedules use minutes, furnace cycles use seconds,
storage steps use hours. Power is kW throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime
from typing import Sequence

import numpy as np

from .errors import (
    BoundViolationError,
    ComfortViolationError,
    ExclusivityError,
    IdentificationError,
    SpecError,
)
from .profile import LoadProfile

SOC_TOLERANCE = 1e-12


def _require_finite(**values: float) -> None:
    for name, v in values.items():
        if not np.all(np.isfinite(v)):
            raise SpecError(f"{name} must be finite, got {v!r}")


def _scalar_or_array(result: np.ndarray, like) -> float | np.ndarray:
    return float(result) if np.ndim(like) == 0 else result


# --------------------------------------------------------------------------
# Rotating loads
# --------------------------------------------------------------------------

def gate_power(t, t0: float, dt: float, a: float):
    """Rectangular pulse: ``a`` on the closed window [t0, t0 + dt], else 0."""
    _require_finite(t=t, t0=t0, dt=dt, a=a)
    if dt <= 0:
        raise SpecError(f"pulse width must be positive, got {dt}")
    if a < 0:
        raise SpecError(f"pulse power must be non-negative, got {a}")
    t_arr = np.asarray(t, dtype=float)
    out = np.where((t_arr >= t0) & (t_arr <= t0 + dt), float(a), 0.0)
    return _scalar_or_array(out, t)


@dataclass(frozen=True)
class RollingScheduleSpec:
    """Billet schedule of one rolling line.

    ``rough_offsets[i]`` / ``finishing_offsets[i]`` are the delays of billet i
    entering the rough / finishing mill relative to the first billet.
    Each billet makes ``rough_pass_count`` back-to-back rough passes and then
    one pass per finishing stand, every pass a pulse of ``pulse_width``.
    """

    pulse_power: float
    pulse_width: float
    rough_pass_count: int = 1
    rough_offsets: tuple[float, ...] = (0.0,)
    finishing_offsets: tuple[float, ...] = (0.0,)
    billet_count: int = 1
    finishing_mill_count: int = 0
    start: float = 0.0
    finishing_delay: float | None = None
    pass_gap: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "rough_offsets", tuple(float(x) for x in self.rough_offsets))
        object.__setattr__(self, "finishing_offsets", tuple(float(x) for x in self.finishing_offsets))
        _require_finite(pulse_power=self.pulse_power, pulse_width=self.pulse_width, start=self.start,
                        pass_gap=self.pass_gap)
        if self.pulse_power < 0:
            raise SpecError("pulse_power must be >= 0")
        if self.pulse_width <= 0:
            raise SpecError("pulse_width must be > 0")
        if self.rough_pass_count < 1 or self.rough_pass_count % 2 == 0:
            raise SpecError(f"rough_pass_count must be odd and >= 1, got {self.rough_pass_count}")
        if self.billet_count < 0:
            raise SpecError("billet_count must be >= 0")
        if self.finishing_mill_count < 0:
            raise SpecError("finishing_mill_count must be >= 0")
        if self.pass_gap < 0:
            raise SpecError("pass_gap must be >= 0")
        for name in ("rough_offsets", "finishing_offsets"):
            offsets = getattr(self, name)
            if self.billet_count == 0:
                continue
            if len(offsets) != self.billet_count:
                raise SpecError(f"{name} needs {self.billet_count} entries, got {len(offsets)}")
            _require_finite(**{name: np.asarray(offsets)})
            if offsets[0] != 0.0:
                raise SpecError(f"{name}[0] must be 0")
            if any(b < a for a, b in zip(offsets, offsets[1:])):
                raise SpecError(f"{name} must be non-decreasing")
        if self.finishing_delay is not None and self.finishing_delay < 0:
            raise SpecError("finishing_delay must be >= 0")

    @property
    def pass_period(self) -> float:
        return self.pulse_width + self.pass_gap

    @property
    def finishing_start(self) -> float:
        """Time the first billet enters the finishing mill."""
        if self.finishing_delay is not None:
            return self.start + self.finishing_delay
        return self.start + self.rough_pass_count * self.pass_period

    def pulse_starts(self) -> list[float]:
        starts = []
        for i in range(self.billet_count):
            for p in range(self.rough_pass_count):
                starts.append(self.start + self.rough_offsets[i] + p * self.pass_period)
            for m in range(self.finishing_mill_count):
                starts.append(self.finishing_start + self.finishing_offsets[i] + m * self.pass_period)
        return starts


def rolling_line_power(t, spec: RollingScheduleSpec):
    """Instantaneous line power: superposition of every pass pulse."""
    _require_finite(t=t)
    total = np.zeros(np.shape(t), dtype=float)
    for t0 in spec.pulse_starts():
        total = total + gate_power(np.asarray(t, dtype=float), t0, spec.pulse_width, spec.pulse_power)
    return _scalar_or_array(total, t)


def rolling_profile(spec: RollingScheduleSpec, start_time: datetime, step: float, n: int) -> LoadProfile:
    """Interval-mean power of the line on an ``n``-sample grid of ``step`` minutes.

    Pulses are integrated exactly (overlap length x power), so short passes
    are not lost to point sampling.
    """
    edges = np.arange(n + 1) * step
    energy = np.zeros(n)
    for t0 in spec.pulse_starts():
        lo = np.clip(t0, edges[:-1], edges[1:])
        hi = np.clip(t0 + spec.pulse_width, edges[:-1], edges[1:])
        energy += spec.pulse_power * (hi - lo)
    return LoadProfile.from_array(start_time, step, energy / step)


# --------------------------------------------------------------------------
# Heating loads (electric arc / refining furnace)
# --------------------------------------------------------------------------

def make_band_noise(count: int, max_deviation: float, seed: int) -> tuple[float, ...]:
    """Seeded i.i.d. uniform deviations on [-max_deviation, +max_deviation]."""
    rng = np.random.default_rng(seed)
    return tuple(rng.uniform(-max_deviation, max_deviation, size=count).tolist())


@dataclass(frozen=True)
class FurnaceCycleSpec:
    """One on/off cycle of a furnace. Times in seconds.

    ``band_noise`` holds the relative plateau deviation, one value per
    ``noise_interval`` seconds from the start of the plateau; the last value
    is held if the plateau outlasts the series, and an empty series means no
    deviation.
    """

    t_on: float
    t_off: float
    ramp_up: float
    ramp_down: float
    rated_power: float
    max_deviation: float = 0.0
    band_noise: tuple[float, ...] = field(default=())
    noise_interval: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "band_noise", tuple(float(x) for x in self.band_noise))
        _require_finite(t_on=self.t_on, t_off=self.t_off, ramp_up=self.ramp_up,
                        ramp_down=self.ramp_down, rated_power=self.rated_power,
                        max_deviation=self.max_deviation)
        if self.ramp_up <= 0 or self.ramp_down <= 0:
            raise SpecError("ramp_up and ramp_down must be > 0")
        if self.rated_power <= 0:
            raise SpecError("rated_power must be > 0")
        if self.max_deviation < 0:
            raise SpecError("max_deviation must be >= 0")
        if self.t_on + self.ramp_up > self.t_off - self.ramp_down:
            raise SpecError("t_on + ramp_up must not exceed t_off - ramp_down")
        if self.noise_interval <= 0:
            raise SpecError("noise_interval must be > 0")
        if any(abs(e) > self.max_deviation for e in self.band_noise):
            raise SpecError("band_noise exceeds max_deviation")

    @property
    def plateau_start(self) -> float:
        return self.t_on + self.ramp_up

    @property
    def plateau_end(self) -> float:
        return self.t_off - self.ramp_down

    def deviation(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if not self.band_noise:
            return np.zeros_like(t)
        idx = np.floor((t - self.plateau_start) / self.noise_interval).astype(int)
        idx = np.clip(idx, 0, len(self.band_noise) - 1)
        return np.asarray(self.band_noise)[idx]


def eaf_power(t, spec: FurnaceCycleSpec):
    """Furnace power: linear ramp up, banded plateau, linear ramp down."""
    _require_finite(t=t)
    ta = np.asarray(t, dtype=float)
    p = spec.rated_power
    up = (ta > spec.t_on) & (ta <= spec.plateau_start)
    flat = (ta > spec.plateau_start) & (ta <= spec.plateau_end)
    down = (ta > spec.plateau_end) & (ta <= spec.t_off)
    out = np.zeros_like(ta)
    out = np.where(up, p / spec.ramp_up * (ta - spec.t_on), out)
    out = np.where(flat, (1.0 + spec.deviation(ta)) * p, out)
    out = np.where(down, p / spec.ramp_down * (spec.t_off - ta), out)
    return _scalar_or_array(out, t)


def eaf_profile(cycles: Sequence[FurnaceCycleSpec], start_time: datetime, step: float, n: int,
                resolution: float = 1.0) -> LoadProfile:
    """Interval-mean power of a furnace running ``cycles`` on an ``n``-sample grid.

    ``step`` is in minutes, ``resolution`` (seconds) is the quadrature spacing.
    """
    step_s = step * 60.0
    per = max(1, int(round(step_s / resolution)))
    t = np.linspace(0.0, n * step_s, n * per + 1)
    p = np.zeros_like(t)
    for cyc in cycles:
        p += eaf_power(t, cyc)
    # trapezoid per interval
    seg = 0.5 * (p[:-1] + p[1:]) * np.diff(t)
    means = seg.reshape(n, per).sum(axis=1) / step_s
    return LoadProfile.from_array(start_time, step, means)


# --------------------------------------------------------------------------
# Storage: equivalent circuit
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BatteryElectricalState:
    """Thevenin-circuit state of a cell at one (SOC, temperature) point.

    ``r0``/``c0`` form the polarization branch, ``r1`` is the ohmic
    resistance and ``r2`` collects the remaining internal resistance.
    """

    soc: float
    temperature: float
    v_oc: float
    r0: float
    r1: float
    c0: float
    r2: float = 0.0
    v0: float = 0.0
    v_b: float | None = None
    i_b: float = 0.0

    def __post_init__(self) -> None:
        _require_finite(soc=self.soc, v_oc=self.v_oc, r0=self.r0, r1=self.r1, r2=self.r2, c0=self.c0)
        if not 0.0 <= self.soc <= 1.0:
            raise SpecError(f"soc must lie in [0, 1], got {self.soc}")
        if min(self.r0, self.r1, self.r2) < 0:
            raise SpecError("resistances must be >= 0")
        if self.c0 <= 0:
            raise SpecError("c0 must be > 0")

    @property
    def tau(self) -> float:
        return self.r0 * self.c0


def polarization_voltage(current: float, r0: float, c0: float, t: float) -> float:
    """RC-branch voltage ``t`` seconds after a current step from rest."""
    if t < 0:
        raise SpecError("time since step must be >= 0")
    tau = r0 * c0
    if tau == 0:
        return current * r0
    return current * r0 * (1.0 - math.exp(-t / tau))


def battery_terminal_voltage(state: BatteryElectricalState, current: float, t_since_step: float) -> float:
    _require_finite(current=current, t_since_step=t_since_step)
    v0 = polarization_voltage(current, state.r0, state.c0, t_since_step)
    return state.v_oc - v0 - (state.r0 + state.r1) * current


def identify_battery_params(delta_v: float, delta_v1: float, current: float, tau: float,
                            v_oc: float, v_b: float) -> tuple[float, float, float, float]:
    """Pulse-test identification.

    Returns ``(r1, r0, c0, r_total)`` from the instantaneous (ohmic) drop
    ``delta_v``, the relaxation (polarization) drop ``delta_v1`` and the
    polarization time constant ``tau``.
    """
    if current == 0:
        raise ZeroDivisionError("current must be non-zero for identification")
    if tau <= 0:
        raise IdentificationError(f"tau must be > 0, got {tau}")
    r1 = delta_v / current
    r0 = delta_v1 / current
    r_total = (v_oc - v_b) / current
    if r1 < 0 or r0 < 0 or r_total < 0:
        raise IdentificationError(f"negative resistance identified (r1={r1}, r0={r0}, r={r_total})")
    if r0 == 0:
        raise IdentificationError("zero polarization resistance: capacitance undefined")
    return r1, r0, tau / r0, r_total


# --------------------------------------------------------------------------
# Storage: scheduling model
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class StorageSpec:
    """Scheduling parameters; discharge power is negative by convention."""

    energy_capacity: float = 7500.0
    charge_power_max: float = 1000.0
    discharge_power_max: float = -1000.0
    soc_min: float = 0.3
    soc_max: float = 0.95
    soc_initial: float = 0.4
    charge_efficiency: float = 1.0
    discharge_efficiency: float = 1.0

    def __post_init__(self) -> None:
        _require_finite(**{k: getattr(self, k) for k in self.__dataclass_fields__})
        if self.energy_capacity <= 0:
            raise SpecError("energy_capacity must be > 0")
        if not 0.0 <= self.soc_min < self.soc_max <= 1.0:
            raise SpecError("need 0 <= soc_min < soc_max <= 1")
        if not self.soc_min <= self.soc_initial <= self.soc_max:
            raise SpecError("soc_initial must lie in [soc_min, soc_max]")
        if not self.charge_power_max >= 0 >= self.discharge_power_max:
            raise SpecError("need charge_power_max >= 0 >= discharge_power_max")
        for name in ("charge_efficiency", "discharge_efficiency"):
            if not 0.0 < getattr(self, name) <= 1.0:
                raise SpecError(f"{name} must lie in (0, 1]")


def soc_step(soc: float, p_charge: float, p_discharge: float, dt_hours: float, spec: StorageSpec) -> float:
    """Advance SOC by one step of ``dt_hours``.

    Raises ExclusivityError if both powers are non-zero and
    BoundViolationError if the result leaves [soc_min, soc_max]; callers
    must clip their request beforehand.
    """
    _require_finite(soc=soc, p_charge=p_charge, p_discharge=p_discharge, dt_hours=dt_hours)
    if p_charge != 0 and p_discharge != 0:
        raise ExclusivityError("storage cannot charge and discharge in the same step")
    if not 0 <= p_charge <= spec.charge_power_max:
        raise BoundViolationError(f"charge power {p_charge} outside [0, {spec.charge_power_max}]")
    if not spec.discharge_power_max <= p_discharge <= 0:
        raise BoundViolationError(f"discharge power {p_discharge} outside [{spec.discharge_power_max}, 0]")
    delta = (spec.charge_efficiency * p_charge + p_discharge / spec.discharge_efficiency) * dt_hours
    new = soc + delta / spec.energy_capacity
    if new < spec.soc_min - SOC_TOLERANCE or new > spec.soc_max + SOC_TOLERANCE:
        raise BoundViolationError(f"SOC {new:.6g} outside [{spec.soc_min}, {spec.soc_max}]")
    return new


# --------------------------------------------------------------------------
# Building thermal model
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BuildingThermalSpec:
    """First-order building model.

    ``air_heat_capacity`` is carried for completeness; the step equation only
    needs the resistance and the time constant.
    """

    thermal_resistance: float  # degC / kW
    time_constant: float  # same unit as the step passed in
    air_heat_capacity: float = 0.0  # kWh / degC
    t_in_min: float = 18.0
    t_in_max: float = 24.0

    def __post_init__(self) -> None:
        _require_finite(thermal_resistance=self.thermal_resistance, time_constant=self.time_constant,
                        t_in_min=self.t_in_min, t_in_max=self.t_in_max)
        if self.thermal_resistance <= 0:
            raise SpecError("thermal_resistance must be > 0")
        if self.time_constant <= 0:
            raise SpecError("time_constant must be > 0")
        if not self.t_in_min < self.t_in_max:
            raise SpecError("t_in_min must be below t_in_max")


def indoor_temp_step(t_in: float, t_out: float, q_load: float, dt: float, spec: BuildingThermalSpec) -> float:
    _require_finite(t_in=t_in, t_out=t_out, q_load=q_load, dt=dt)
    decay = math.exp(-dt / spec.time_constant)
    return t_in * decay + (spec.thermal_resistance * q_load + t_out) * (1.0 - decay)


def heat_load_required(t_in_next: float, t_in: float, t_out: float, dt: float,
                       spec: BuildingThermalSpec) -> float:
    """Heating power that moves the room from ``t_in`` to ``t_in_next`` in one step."""
    _require_finite(t_in_next=t_in_next, t_in=t_in, t_out=t_out, dt=dt)
    if dt <= 0:
        raise SpecError("dt must be > 0")
    for name, temp in (("t_in", t_in), ("t_in_next", t_in_next)):
        if not spec.t_in_min <= temp <= spec.t_in_max:
            raise ComfortViolationError(f"{name}={temp} outside comfort band [{spec.t_in_min}, {spec.t_in_max}]")
    decay = math.exp(-dt / spec.time_constant)
    return ((t_in_next - t_in * decay) / (1.0 - decay) - t_out) / spec.thermal_resistance


def building_heat_profile(spec: BuildingThermalSpec, setpoints: Sequence[float], outdoor: Sequence[float],
                          start_time: datetime, step: float, dt: float) -> LoadProfile:
    """Heating power needed to track ``setpoints`` (len n + 1) under ``outdoor`` (len n).

    ``step`` is the profile grid in minutes, ``dt`` the same step in the
    time-constant's unit. Negative requirements (cooling) are floored at 0.
    """
    if len(setpoints) != len(outdoor) + 1:
        raise SpecError("need one more setpoint than outdoor samples")
    q = [heat_load_required(setpoints[k + 1], setpoints[k], outdoor[k], dt, spec) for k in range(len(outdoor))]
    return LoadProfile.from_array(start_time, step, np.maximum(q, 0.0))
