"""Demand-response cost, feasibility envelopes and the unresponsiveness-minimizing dispatcher.

A dispatch answers one response target (a window of timesteps with a
requested reduction per step) using the members of one flexible case.
Heating and rotating loads respond by curtailment, capped by what they
currently draw. Storage responds by discharging inside the target and
recharging at steps without a request, returning to its initial SOC by the
end of the horizon.

Unresponsiveness F = F_pre - F_act, with both terms in kWh.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    AccountingError,
    BoundViolationError,
    CapabilityBoundError,
    EnumerationSizeError,
    ExclusivityError,
    SpecError,
)
from .load_models import StorageSpec, soc_step
from .profile import LoadProfile

CHECK_TOLERANCE = 1e-9
ORACLE_MAX_STEPS = 6
ORACLE_MAX_LEVELS = 8


class LoadKind(str, Enum):
    HEATING = "H"
    ROTATING = "R"
    STORAGE = "S"

    @property
    def label(self) -> str:
        return self.name.lower()


MERIT_ORDER = (LoadKind.HEATING, LoadKind.ROTATING, LoadKind.STORAGE)
CURTAILABLE = (LoadKind.HEATING, LoadKind.ROTATING)


@dataclass(frozen=True)
class FlexibleCase:
    members: frozenset[LoadKind]

    def __post_init__(self) -> None:
        members = frozenset(LoadKind(m) for m in self.members)
        if not members:
            raise SpecError("a flexible case needs at least one member")
        object.__setattr__(self, "members", members)

    @classmethod
    def parse(cls, text: str) -> "FlexibleCase":
        parts = [p.strip().upper() for p in text.replace("_", "-").split("-") if p.strip()]
        try:
            kinds = [LoadKind(p) for p in parts]
        except ValueError:
            raise SpecError(f"unknown flexible case {text!r}; expected e.g. H-R-S") from None
        if len(set(kinds)) != len(kinds):
            raise SpecError(f"repeated member in flexible case {text!r}")
        return cls(frozenset(kinds))

    @property
    def id(self) -> str:
        return "-".join(k.value for k in MERIT_ORDER if k in self.members)

    def ordered(self) -> list[LoadKind]:
        return [k for k in MERIT_ORDER if k in self.members]

    def __str__(self) -> str:
        return self.id


# the seven combinations, in the order the database table lists them
ALL_CASES = tuple(FlexibleCase.parse(c) for c in ("H-R-S", "H-R", "H-S", "R-S", "S", "R", "H"))

TARGET_IDS = ("only_night", "all_day", "only_daytime")
NIGHT_HOURS = (22, 6)
DAYTIME_HOURS = (8, 18)


@dataclass(frozen=True)
class ResponseTarget:
    """Requested reduction ``demand[i]`` (kW) at timestep ``window[i]``."""

    id: str
    window: tuple[int, ...]
    demand: tuple[float, ...]
    horizon: int
    step: float = 60.0  # minutes

    def __post_init__(self) -> None:
        object.__setattr__(self, "window", tuple(int(i) for i in self.window))
        object.__setattr__(self, "demand", tuple(float(d) for d in self.demand))
        if self.id not in TARGET_IDS:
            raise SpecError(f"unknown response target {self.id!r}; expected one of {TARGET_IDS}")
        if not self.window:
            raise SpecError("response window must be non-empty")
        if len(self.demand) != len(self.window):
            raise SpecError("need one demand value per window step")
        if list(self.window) != sorted(set(self.window)):
            raise SpecError("window indices must be strictly increasing")
        if self.window[0] < 0 or self.window[-1] >= self.horizon:
            raise SpecError(f"window indices must lie in [0, {self.horizon})")
        if not all(np.isfinite(d) and d >= 0 for d in self.demand):
            raise SpecError("demand must be finite and >= 0")
        if self.step <= 0:
            raise SpecError("step must be > 0")

    @property
    def step_hours(self) -> float:
        return self.step / 60.0

    def demand_series(self) -> np.ndarray:
        out = np.zeros(self.horizon)
        out[list(self.window)] = self.demand
        return out


def window_for(target_id: str, horizon: int, step: float = 60.0) -> tuple[int, ...]:
    """Timestep indices of the standard night / daytime / all-day windows."""
    hours = (np.arange(horizon) * step / 60.0) % 24.0
    if target_id == "all_day":
        mask = np.ones(horizon, dtype=bool)
    elif target_id == "only_night":
        mask = (hours >= NIGHT_HOURS[0]) | (hours < NIGHT_HOURS[1])
    elif target_id == "only_daytime":
        mask = (hours >= DAYTIME_HOURS[0]) & (hours < DAYTIME_HOURS[1])
    else:
        raise SpecError(f"unknown response target {target_id!r}")
    return tuple(np.flatnonzero(mask).tolist())


def make_target(target_id: str, horizon: int, demand: float | Sequence[float], step: float = 60.0,
                window: Sequence[int] | None = None) -> ResponseTarget:
    window = tuple(window) if window is not None else window_for(target_id, horizon, step)
    if np.ndim(demand) == 0:
        demand = [float(demand)] * len(window)
    return ResponseTarget(target_id, window, tuple(demand), horizon, step)


# --------------------------------------------------------------------------
# Cost
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DrCostParams:
    a_dr: float  # currency / kW^2
    b_dr: float  # currency / kW
    p_min: float = 0.0
    p_max: float = float("inf")

    def __post_init__(self) -> None:
        if self.p_min > self.p_max:
            raise SpecError("p_min must not exceed p_max")
        if self.a_dr < 0:
            raise SpecError("a_dr must be >= 0")


def dr_cost(p: float, params: DrCostParams) -> float:
    """Incentive compensation owed for a reduction of ``p`` kW in one period."""
    if not params.p_min <= p <= params.p_max:
        raise CapabilityBoundError(f"reduction {p} kW outside [{params.p_min}, {params.p_max}]")
    return params.a_dr * p * p + params.b_dr * p


# --------------------------------------------------------------------------
# Envelopes
# --------------------------------------------------------------------------

Interval = tuple[float, float]


@dataclass(frozen=True)
class DispatchParams:
    """Regulation limits; defaults are the scheduling parameters of the demo park.

    ``heat_envelope`` / ``rot_envelope`` optionally give a per-timestep
    admissible [lo, hi] adjustment interval on top of the global bounds.
    """

    p_heat_min: float = 0.0
    p_heat_max: float = 4500.0
    p_rot_min: float = 0.0
    p_rot_max: float = 4000.0
    storage: StorageSpec = field(default_factory=StorageSpec)
    heat_envelope: tuple[Interval, ...] | None = None
    rot_envelope: tuple[Interval, ...] | None = None

    def __post_init__(self) -> None:
        if not 0 <= self.p_heat_min <= self.p_heat_max:
            raise SpecError("need 0 <= p_heat_min <= p_heat_max")
        if not 0 <= self.p_rot_min <= self.p_rot_max:
            raise SpecError("need 0 <= p_rot_min <= p_rot_max")
        for name in ("heat_envelope", "rot_envelope"):
            env = getattr(self, name)
            if env is not None:
                env = tuple((float(lo), float(hi)) for lo, hi in env)
                if any(lo > hi for lo, hi in env):
                    raise SpecError(f"{name} has an interval with lo > hi")
                object.__setattr__(self, name, env)

    def bounds(self, kind: LoadKind) -> Interval:
        if kind is LoadKind.HEATING:
            return self.p_heat_min, self.p_heat_max
        if kind is LoadKind.ROTATING:
            return self.p_rot_min, self.p_rot_max
        return 0.0, -self.storage.discharge_power_max

    def envelope(self, kind: LoadKind) -> tuple[Interval, ...] | None:
        if kind is LoadKind.HEATING:
            return self.heat_envelope
        if kind is LoadKind.ROTATING:
            return self.rot_envelope
        return None


def feasible_envelope(member: LoadKind | str, t: int, params: DispatchParams,
                      baseline: LoadProfile | None) -> Interval:
    """Admissible response power of ``member`` at step ``t``.

    Curtailable loads cannot shed more than they draw, so the interval is
    capped at ``baseline[t]``. Storage gets its discharge power limit; its
    SOC feasibility is handled by the scheduler. An empty intersection
    yields (0, 0).
    """
    member = LoadKind(member)
    gmin, gmax = params.bounds(member)
    if member is LoadKind.STORAGE:
        return gmin, gmax
    if baseline is None or not 0 <= t < len(baseline):
        raise SpecError(f"baseline for {member.label} does not cover step {t}")
    lo, hi = gmin, gmax
    env = params.envelope(member)
    if env is not None:
        if t >= len(env):
            raise SpecError(f"{member.label} envelope does not cover step {t}")
        lo, hi = max(lo, env[t][0]), min(hi, env[t][1])
    lo, hi = max(lo, 0.0), min(hi, baseline.values[t])
    if lo > hi or hi <= 0:
        return 0.0, 0.0
    return lo, hi


# --------------------------------------------------------------------------
# Results
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DispatchResult:
    case: str
    target: str
    step_hours: float
    demand: tuple[float, ...]
    responses: dict[str, tuple[float, ...]]  # member id -> kW per step; storage = discharge
    storage_charge: tuple[float, ...]  # kW per step, >= 0
    soc: tuple[float, ...]  # horizon + 1 values
    f_pre: float
    f_act: float
    f: float
    terminal_soc_gap: float = 0.0
    warnings: tuple[str, ...] = ()
    method: str = "greedy"

    def delivered(self) -> np.ndarray:
        return _delivered(self.responses, len(self.demand))


def _delivered(responses: Mapping[str, Sequence[float]], horizon: int) -> np.ndarray:
    total = np.zeros(horizon)
    for kind in MERIT_ORDER:
        if kind.value in responses:
            total = total + np.asarray(responses[kind.value], dtype=float)
    return total


def unresponsiveness(f_pre: float, f_act: float) -> float:
    """Requested minus delivered response energy."""
    if f_pre < 0 or f_act < 0:
        raise AccountingError("response totals must be >= 0")
    if f_act > f_pre:
        if f_act - f_pre > CHECK_TOLERANCE * max(1.0, f_pre):
            raise AccountingError(f"delivered {f_act} exceeds requested {f_pre}")
        return 0.0
    return f_pre - f_act


def _finish(case: FlexibleCase, target: ResponseTarget, responses: dict[str, np.ndarray],
            charge: np.ndarray, soc: Sequence[float], method: str, warnings: Sequence[str] = (),
            gap: float = 0.0) -> DispatchResult:
    dt = target.step_hours
    demand = target.demand_series()
    responses = {k: tuple(np.asarray(v, dtype=float).tolist()) for k, v in responses.items()}
    f_pre = float(np.sum(demand) * dt)
    f_act = float(np.sum(_delivered(responses, target.horizon)) * dt)
    return DispatchResult(
        case=case.id, target=target.id, step_hours=dt, demand=tuple(demand.tolist()),
        responses=responses, storage_charge=tuple(np.asarray(charge, dtype=float).tolist()),
        soc=tuple(float(s) for s in soc), f_pre=f_pre, f_act=f_act, f=unresponsiveness(f_pre, f_act),
        terminal_soc_gap=gap, warnings=tuple(warnings), method=method,
    )


def _check_grid(case: FlexibleCase, target: ResponseTarget,
                baselines: Mapping[LoadKind | str, LoadProfile]) -> dict[LoadKind, LoadProfile]:
    resolved = {LoadKind(k): v for k, v in baselines.items()}
    for kind in case.ordered():
        if kind is LoadKind.STORAGE:
            continue
        prof = resolved.get(kind)
        if prof is None:
            raise SpecError(f"no baseline supplied for {kind.label} loads")
    for kind, prof in resolved.items():
        if len(prof) != target.horizon or abs(prof.step - target.step) > 1e-9:
            raise SpecError(f"{kind.label} baseline ({len(prof)} x {prof.step:g} min) does not match "
                            f"the target grid ({target.horizon} x {target.step:g} min)")
    return resolved


# --------------------------------------------------------------------------
# Greedy dispatcher
# --------------------------------------------------------------------------

def _curtail_step(need: float, intervals: Sequence[Interval]) -> list[float]:
    """Largest total curtailment <= ``need`` with each load off or inside its interval.

    Loads earlier in ``intervals`` are filled first.
    """
    best = [0.0] * len(intervals)
    best_total = 0.0
    if need <= 0:
        return best
    for on in itertools.product((True, False), repeat=len(intervals)):
        active = [i for i, flag in enumerate(on) if flag and intervals[i][1] > 0]
        if len(active) != sum(on):
            continue
        floor = sum(intervals[i][0] for i in active)
        if floor > need:
            continue
        alloc = [0.0] * len(intervals)
        remaining = need
        reserved = floor
        for i in active:
            lo, hi = intervals[i]
            reserved -= lo
            alloc[i] = max(lo, min(hi, remaining - reserved))
            remaining -= alloc[i]
        total = sum(alloc)
        if total > best_total:
            best, best_total = alloc, total
    return best


def _curtail(kinds: Sequence[LoadKind], need: np.ndarray, params: DispatchParams,
             baselines: Mapping[LoadKind, LoadProfile]) -> dict[str, np.ndarray]:
    out = {k.value: np.zeros(need.size) for k in kinds}
    for t in range(need.size):
        intervals = [feasible_envelope(k, t, params, baselines[k]) for k in kinds]
        for k, v in zip(kinds, _curtail_step(float(need[t]), intervals)):
            out[k.value][t] = v
    return out


@dataclass
class StoragePlan:
    discharge: np.ndarray  # kW, >= 0
    charge: np.ndarray  # kW, >= 0
    soc: list[float]


def plan_storage(residual: Sequence[float], charge_allowed: Sequence[bool], step_hours: float,
                 spec: StorageSpec) -> StoragePlan:
    """Cover as much of ``residual`` (kW per step) as the storage can.

    Discharging happens only where ``residual`` is positive, charging only
    where ``charge_allowed``; the level returns to the initial SOC at the
    end. Pass 1 walks forward keeping the interval of reachable energy
    levels and takes, at each step, the largest discharge that still leaves
    a way back to the initial level. Pass 2 walks backward from the terminal
    level and places the charging that pass 1 assumed.

    Arithmetic is exact (rationals) so the terminal balance holds exactly.
    """
    n = len(residual)
    frac = Fraction
    dt = frac(step_hours)
    es = frac(spec.energy_capacity)
    e_min, e_max, e0 = frac(spec.soc_min) * es, frac(spec.soc_max) * es, frac(spec.soc_initial) * es
    eta_c, eta_d = frac(spec.charge_efficiency), frac(spec.discharge_efficiency)
    p_dis = -frac(spec.discharge_power_max)
    p_ch = frac(spec.charge_power_max)

    resid = [frac(max(float(r), 0.0)) for r in residual]
    draw_cap = [min(r, p_dis) * dt / eta_d if r > 0 else frac(0) for r in resid]
    inflow_cap = [p_ch * dt * eta_c if (allowed and resid[t] == 0) else frac(0)
                  for t, allowed in enumerate(charge_allowed)]
    inflow_after = [frac(0)] * (n + 1)
    for t in range(n - 1, -1, -1):
        inflow_after[t] = inflow_after[t + 1] + inflow_cap[t]

    lo, hi = e0, e0
    before: list[tuple[Fraction, Fraction]] = []
    draw = [frac(0)] * n
    for t in range(n):
        before.append((lo, hi))
        if draw_cap[t] > 0:
            w = min(draw_cap[t], hi - e_min, hi + inflow_after[t + 1] - e0)
            w = max(w, frac(0))
            draw[t] = w
            lo, hi = max(lo - w, e_min), hi - w
        elif inflow_cap[t] > 0:
            hi = min(e_max, hi + inflow_cap[t])

    level = e0
    levels = [e0]
    inflow = [frac(0)] * n
    for t in range(n - 1, -1, -1):
        prev_lo, prev_hi = before[t]
        if draw[t] > 0:
            prev = level + draw[t]
        else:
            prev = min(level, prev_hi)
            inflow[t] = level - prev
        level = prev
        levels.append(level)
    levels.reverse()
    assert levels[0] == e0, "storage plan does not start from the initial level"

    discharge = np.array([float(w * eta_d / dt) for w in draw])
    charge = np.array([float(g / (eta_c * dt)) for g in inflow])
    return StoragePlan(discharge, charge, [float(lv / es) for lv in levels])


def _idle_soc(target: ResponseTarget, params: DispatchParams) -> list[float]:
    return [params.storage.soc_initial] * (target.horizon + 1)


def _direct(case: FlexibleCase, target: ResponseTarget, baselines: Mapping[LoadKind, LoadProfile],
            params: DispatchParams) -> DispatchResult:
    demand = target.demand_series()
    curt_kinds = [k for k in case.ordered() if k in CURTAILABLE]
    responses = _curtail(curt_kinds, demand, params, baselines)
    charge = np.zeros(target.horizon)
    soc = _idle_soc(target, params)
    if LoadKind.STORAGE in case.members:
        residual = np.maximum(demand - _delivered(responses, target.horizon), 0.0)
        plan = plan_storage(residual, demand == 0, target.step_hours, params.storage)
        responses[LoadKind.STORAGE.value] = plan.discharge
        charge, soc = plan.charge, plan.soc
    return _finish(case, target, responses, charge, soc, "greedy")


def _augment(base: DispatchResult, case: FlexibleCase, added: LoadKind, target: ResponseTarget,
             baselines: Mapping[LoadKind, LoadProfile], params: DispatchParams) -> DispatchResult:
    """Extend ``base`` with one more member, which only covers what is still missing."""
    demand = target.demand_series()
    responses = {k: np.asarray(v) for k, v in base.responses.items()}
    need = np.maximum(demand - _delivered(responses, target.horizon), 0.0)
    charge = np.asarray(base.storage_charge)
    soc = list(base.soc)
    if added is LoadKind.STORAGE:
        plan = plan_storage(need, demand == 0, target.step_hours, params.storage)
        responses[added.value] = plan.discharge
        charge, soc = plan.charge, plan.soc
    else:
        responses.update(_curtail([added], need, params, baselines))
    responses = {k.value: responses[k.value] for k in case.ordered()}
    return _finish(case, target, responses, charge, soc, "greedy", base.warnings, base.terminal_soc_gap)


def schedule_dispatch(case: FlexibleCase | str, target: ResponseTarget,
                      baselines: Mapping[LoadKind | str, LoadProfile],
                      params: DispatchParams | None = None) -> DispatchResult:
    """Greedy dispatch minimizing unresponsiveness for one (target, case) pair.

    Curtailment goes first in H, R order, then storage covers the residual.
    For multi-member cases the result is the best of the direct greedy and
    every one-member extension of a sub-case dispatch, so adding a member
    never increases F.
    """
    case = FlexibleCase.parse(case) if isinstance(case, str) else case
    params = params or DispatchParams()
    resolved = _check_grid(case, target, baselines)
    memo: dict[frozenset, DispatchResult] = {}

    def solve(c: FlexibleCase) -> DispatchResult:
        if c.members in memo:
            return memo[c.members]
        best = _direct(c, target, resolved, params)
        if len(c.members) > 1:
            for kind in c.ordered():
                sub = solve(FlexibleCase(c.members - {kind}))
                cand = _augment(sub, c, kind, target, resolved, params)
                if cand.f < best.f:
                    best = cand
        memo[c.members] = best
        return best

    result = solve(case)
    problems = check_dispatch(result, target, resolved, params)
    if problems:
        # best-effort result, never silently returned
        result = replace(result, warnings=result.warnings + tuple(problems))
    return result


def check_dispatch(result: DispatchResult, target: ResponseTarget,
                   baselines: Mapping[LoadKind | str, LoadProfile],
                   params: DispatchParams, tol: float = CHECK_TOLERANCE) -> list[str]:
    """List every constraint a result violates; empty means feasible."""
    problems: list[str] = []
    baselines = {LoadKind(k): v for k, v in baselines.items()}
    demand = target.demand_series()
    scale = max(1.0, float(np.max(demand, initial=0.0)))
    for key, series in result.responses.items():
        kind = LoadKind(key)
        for t, p in enumerate(series):
            if p == 0:
                continue
            lo, hi = feasible_envelope(kind, t, params, baselines.get(kind))
            if p < lo - tol * scale or p > hi + tol * scale:
                problems.append(f"{kind.label} response {p:.6g} kW at step {t} outside [{lo:.6g}, {hi:.6g}]")
    delivered = result.delivered()
    over = np.flatnonzero(delivered > demand + tol * scale)
    problems += [f"over-delivery at step {t}" for t in over]
    discharge = np.asarray(result.responses.get(LoadKind.STORAGE.value, np.zeros(target.horizon)))
    charge = np.asarray(result.storage_charge)
    spec = params.storage
    soc = spec.soc_initial
    for t in range(target.horizon):
        if charge[t] > 0 and demand[t] > 0:
            problems.append(f"storage charges at step {t} inside the requested reduction")
        try:
            soc = soc_step(soc, float(charge[t]), -float(discharge[t]), result.step_hours, spec)
        except (BoundViolationError, ExclusivityError) as exc:
            problems.append(f"step {t}: {exc}")
            break
        if abs(soc - result.soc[t + 1]) > tol:
            problems.append(f"SOC trajectory inconsistent at step {t + 1}")
            break
    if abs(result.soc[-1] - spec.soc_initial) > tol:
        problems.append(f"terminal SOC {result.soc[-1]:.6g} != initial {spec.soc_initial:.6g}")
    f_act = float(np.sum(delivered) * result.step_hours)
    f_pre = float(np.sum(demand) * result.step_hours)
    if abs(f_act - result.f_act) > tol * max(1.0, f_pre) or abs(f_pre - result.f_pre) > tol * max(1.0, f_pre):
        problems.append("response totals do not match the per-step series")
    return problems


# --------------------------------------------------------------------------
# Exhaustive oracle
# --------------------------------------------------------------------------

def _levels(lo: float, hi: float, q: float, semi_continuous: bool) -> list[float]:
    if hi <= 0:
        return [0.0]
    vals = [0.0] if semi_continuous and lo > 0 else []
    k = 0
    while lo + k * q < hi - 1e-12 * max(1.0, hi):
        vals.append(lo + k * q)
        k += 1
    vals.append(hi)
    if len(vals) > ORACLE_MAX_LEVELS:
        raise EnumerationSizeError(f"{len(vals)} power levels exceed the oracle limit {ORACLE_MAX_LEVELS}")
    return vals


def brute_force_dispatch(case: FlexibleCase | str, target: ResponseTarget,
                         baselines: Mapping[LoadKind | str, LoadProfile], params: DispatchParams | None,
                         power_grid_resolution: float) -> DispatchResult:
    """Exhaustive minimum-F dispatch over a power lattice of spacing ``power_grid_resolution``.

    Only for tiny instances (at most 6 steps and 8 levels per load per
    step). Lattice points are 0, then lo, lo + q, ... up to and including
    each interval's upper end.
    """
    case = FlexibleCase.parse(case) if isinstance(case, str) else case
    params = params or DispatchParams()
    q = float(power_grid_resolution)
    if q <= 0:
        raise SpecError("power_grid_resolution must be > 0")
    if target.horizon > ORACLE_MAX_STEPS:
        raise EnumerationSizeError(f"{target.horizon} steps exceed the oracle limit {ORACLE_MAX_STEPS}")
    resolved = _check_grid(case, target, baselines)
    demand = target.demand_series()
    n, dt = target.horizon, target.step_hours
    spec = params.storage
    tol = CHECK_TOLERANCE * max(1.0, float(demand.max(initial=0.0)), spec.energy_capacity)

    curt = [k for k in case.ordered() if k in CURTAILABLE]
    # achievable curtailment totals per step with the combination that reaches them
    curt_options = []
    for t in range(n):
        grids = [_levels(*feasible_envelope(k, t, params, resolved[k]), q, True) for k in curt]
        combos = list(itertools.product(*grids)) if grids else [()]
        totals = np.array([sum(c) for c in combos])
        order = np.argsort(totals, kind="stable")
        curt_options.append((totals[order], [combos[i] for i in order]))

    if LoadKind.STORAGE in case.members:
        dis_grid = _levels(0.0, -spec.discharge_power_max, q, False)
        ch_grid = _levels(0.0, spec.charge_power_max, q, False)
        per_step = [[-d for d in dis_grid] if demand[t] > 0 else ch_grid for t in range(n)]
        actions = np.array(list(itertools.product(*per_step)), dtype=float).reshape(-1, n)
    else:
        actions = np.zeros((1, n))
    # action > 0 charges, < 0 discharges
    energy = np.where(actions > 0, actions * spec.charge_efficiency, actions / spec.discharge_efficiency) * dt
    e_min, e_max = spec.soc_min * spec.energy_capacity, spec.soc_max * spec.energy_capacity
    e0 = spec.soc_initial * spec.energy_capacity
    levels = e0 + np.cumsum(energy, axis=1)
    ok = np.all((levels >= e_min - tol) & (levels <= e_max + tol), axis=1) & (np.abs(levels[:, -1] - e0) <= tol)
    discharge = np.maximum(-actions, 0.0)
    ok &= np.all(discharge <= demand + tol, axis=1)
    if not ok.any():
        raise AssertionError("idle storage schedule must always be feasible")
    actions, discharge = actions[ok], discharge[ok]

    delivered = discharge.copy()
    pick = np.zeros(discharge.shape, dtype=int)
    for t in range(n):
        totals, _ = curt_options[t]
        room = demand[t] - discharge[:, t]
        idx = np.searchsorted(totals, room + tol, side="right") - 1
        pick[:, t] = idx
        delivered[:, t] += totals[idx]
    f = np.sum(demand) * dt - delivered.sum(axis=1) * dt
    best = int(np.argmin(f))

    responses = {k.value: np.zeros(n) for k in curt}
    for t in range(n):
        combo = curt_options[t][1][pick[best, t]]
        for k, v in zip(curt, combo):
            responses[k.value][t] = v
    charge = np.maximum(actions[best], 0.0)
    soc = [spec.soc_initial]
    if LoadKind.STORAGE in case.members:
        responses[LoadKind.STORAGE.value] = discharge[best]
        soc += (levels[ok][best] / spec.energy_capacity).tolist()
    else:
        soc += [spec.soc_initial] * n
    responses = {k.value: responses[k.value] for k in case.ordered()}
    return _finish(case, target, responses, charge, soc, "oracle")


def dispatch_all_cases(target: ResponseTarget, baselines: Mapping[LoadKind | str, LoadProfile],
                       params: DispatchParams | None = None,
                       cases: Iterable[FlexibleCase] = ALL_CASES) -> dict[str, DispatchResult]:
    return {c.id: schedule_dispatch(c, target, baselines, params) for c in cases}
