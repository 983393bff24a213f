"""Uniformly sampled power series and their CSV representation.

CSV layout is ``timestamp,load_kw`` with ISO-8601 local timestamps, one row
per sample, strictly increasing.
"""
from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from typing import Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator

from ._io import atomic_write_text
from .errors import FormatError, InsufficientDataError, SpecError

CSV_HEADER = ("timestamp", "load_kw")
MAX_FILLABLE_GAP = 3


@dataclass(frozen=True)
class LoadProfile:
    start_time: datetime
    step: float  # minutes
    values: tuple[float, ...] = field(default=())

    def __post_init__(self) -> None:
        values = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "step", float(self.step))
        if not (self.step > 0 and math.isfinite(self.step)):
            raise SpecError(f"step must be a positive finite number of minutes, got {self.step}")
        if not values:
            raise SpecError("values must be non-empty")
        if not all(math.isfinite(v) for v in values):
            raise SpecError("all samples must be finite")

    @classmethod
    def from_array(cls, start_time: datetime, step: float, values: Sequence[float]) -> "LoadProfile":
        return cls(start_time, step, tuple(np.asarray(values, dtype=float).tolist()))

    def __len__(self) -> int:
        return len(self.values)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    @property
    def duration(self) -> float:
        """Covered span in minutes."""
        return self.step * len(self.values)

    @property
    def step_hours(self) -> float:
        return self.step / 60.0

    def timestamps(self) -> list[datetime]:
        return [self.start_time + timedelta(minutes=self.step * i) for i in range(len(self))]

    def energy_kwh(self) -> float:
        return float(np.sum(self.array) * self.step_hours)

    def with_values(self, values: Sequence[float]) -> "LoadProfile":
        return LoadProfile.from_array(self.start_time, self.step, values)


def format_timestamp(ts: datetime) -> str:
    return ts.isoformat(timespec="seconds")


def profile_to_csv(profile: LoadProfile) -> str:
    lines = [",".join(CSV_HEADER)]
    for ts, v in zip(profile.timestamps(), profile.values):
        lines.append(f"{format_timestamp(ts)},{v!r}")
    return "\n".join(lines) + "\n"


def write_profile_csv(profile: LoadProfile, path: str | os.PathLike) -> None:
    atomic_write_text(path, profile_to_csv(profile))


def _read_rows(path: str | os.PathLike) -> tuple[list[datetime], list[float]]:
    times: list[datetime] = []
    values: list[float] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != CSV_HEADER:
            raise FormatError(f"{path}: expected header 'timestamp,load_kw', got {header!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise FormatError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
            try:
                ts = datetime.fromisoformat(row[0].strip())
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: bad timestamp {row[0]!r}") from exc
            raw = row[1].strip()
            try:
                v = float(raw) if raw else math.nan
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: bad load_kw {raw!r}") from exc
            if times and ts <= times[-1]:
                kind = "duplicate" if ts == times[-1] else "unsorted"
                raise FormatError(f"{path}:{lineno}: {kind} timestamp {row[0].strip()}")
            times.append(ts)
            values.append(v)
    if not times:
        raise InsufficientDataError(f"{path}: no samples")
    return times, values


def _regular_grid(times: list[datetime], values: list[float], step: float | None) -> tuple[float, np.ndarray]:
    """Place samples on a uniform grid; absent timestamps become NaN."""
    offsets = np.array([(t - times[0]).total_seconds() / 60.0 for t in times])
    if step is None:
        if len(times) < 2:
            raise InsufficientDataError("cannot infer sample interval from a single row; pass step")
        step = float(np.min(np.diff(offsets)))
    idx = offsets / step
    if not np.allclose(idx, np.round(idx), atol=1e-6):
        raise FormatError(f"timestamps do not lie on a {step:g}-minute grid")
    idx = np.round(idx).astype(int)
    grid = np.full(idx[-1] + 1, np.nan)
    grid[idx] = values
    return step, grid


def fill_gaps(values: np.ndarray, max_gap: int = MAX_FILLABLE_GAP) -> np.ndarray | None:
    """Fill NaN runs of at most ``max_gap`` samples by monotone cubic interpolation.

    Returns None when a longer run exists (the series is unusable).
    """
    values = np.asarray(values, dtype=float)
    missing = ~np.isfinite(values)
    if not missing.any():
        return values.copy()
    run = 0
    for m in missing:
        run = run + 1 if m else 0
        if run > max_gap:
            return None
    known = np.flatnonzero(~missing)
    if known.size == 0:
        return None
    out = values.copy()
    if known.size == 1:
        out[missing] = values[known[0]]
        return out
    interp = PchipInterpolator(known, values[known], extrapolate=False)
    holes = np.flatnonzero(missing)
    filled = interp(holes)
    # leading/trailing holes hold the nearest known sample
    filled = np.where(holes < known[0], values[known[0]], filled)
    filled = np.where(holes > known[-1], values[known[-1]], filled)
    out[holes] = filled
    return out


def read_profile_csv(path: str | os.PathLike, step: float | None = None) -> LoadProfile:
    """Read one CSV into a single profile, filling short gaps.

    Raises InsufficientDataError if a gap is too long to fill.
    """
    times, values = _read_rows(path)
    step, grid = _regular_grid(times, values, step)
    filled = fill_gaps(grid)
    if filled is None:
        raise InsufficientDataError(f"{path}: gap longer than {MAX_FILLABLE_GAP} samples")
    return LoadProfile.from_array(times[0], step, filled)


def read_days_csv(path: str | os.PathLike, points_per_day: int = 24) -> list[LoadProfile]:
    """Split a multi-day CSV into per-day profiles, dropping days with unfillable gaps."""
    times, values = _read_rows(path)
    step = 24 * 60 / points_per_day
    day0 = times[0].replace(hour=0, minute=0, second=0, microsecond=0)
    buckets: dict[int, np.ndarray] = {}
    for t, v in zip(times, values):
        offset = (t - day0).total_seconds() / 60.0
        day, rem = divmod(offset, 24 * 60)
        slot = rem / step
        if abs(slot - round(slot)) > 1e-6:
            raise FormatError(f"{path}: timestamp {format_timestamp(t)} is off the {step:g}-minute grid")
        buckets.setdefault(int(day), np.full(points_per_day, np.nan))[int(round(slot))] = v
    days = []
    for day in sorted(buckets):
        filled = fill_gaps(buckets[day])
        if filled is not None:
            days.append(LoadProfile.from_array(day0 + timedelta(days=day), step, filled))
    return days
