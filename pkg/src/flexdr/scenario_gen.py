"""Densification, multi-day augmentation and physics/data fusion of load profiles."""
from __future__ import annotations

from dataclasses import dataclass
from datetime import timedelta
from typing import Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import InsufficientDataError, ResamplingGridError, SpecError
from .profile import LoadProfile


@dataclass(frozen=True)
class AugmentationConfig:
    target_points_per_day: int = 96
    days_to_generate: int = 0
    noise_seed: int = 0
    noise_scale: float = 0.05  # fraction of the local amplitude

    def __post_init__(self) -> None:
        if self.target_points_per_day < 1:
            raise SpecError("target_points_per_day must be positive")
        if self.days_to_generate < 0:
            raise SpecError("days_to_generate must be >= 0")
        if not self.noise_scale >= 0:
            raise SpecError("noise_scale must be >= 0")


def interpolate_profile(profile: LoadProfile, target_len: int) -> LoadProfile:
    """Resample onto a grid ``k`` times finer with a shape-preserving cubic.

    Original samples land on indices ``i * k`` unchanged. Points after the
    last original sample hold its value rather than extrapolate.
    """
    n = len(profile)
    if target_len < n or target_len % n:
        raise ResamplingGridError(f"target length {target_len} is not a positive multiple of {n}")
    k = target_len // n
    if k == 1:
        return profile
    y = profile.array
    x_new = np.arange(target_len) / k
    if n == 1:
        out = np.full(target_len, y[0])
    else:
        with np.errstate(over="ignore", divide="ignore"):
            out = PchipInterpolator(np.arange(n), y, extrapolate=False)(x_new)
        out[x_new > n - 1] = y[-1]
    out[::k] = y
    return LoadProfile.from_array(profile.start_time, profile.step / k, out)


def augment_days(base: LoadProfile, cfg: AugmentationConfig) -> list[LoadProfile]:
    """Synthesize ``cfg.days_to_generate`` distinct days around ``base``.

    Each day is the densified base plus Gaussian noise proportional to the
    local load level, floored at 0 kW. One generator seeded with
    ``cfg.noise_seed`` feeds all days, in order.
    """
    if cfg.days_to_generate == 0:
        return []
    dense = interpolate_profile(base, cfg.target_points_per_day)
    level = dense.array
    rng = np.random.default_rng(cfg.noise_seed)
    days = []
    for d in range(cfg.days_to_generate):
        noise = rng.standard_normal(level.size) * cfg.noise_scale * np.abs(level)
        days.append(LoadProfile.from_array(dense.start_time + timedelta(days=d), dense.step,
                                           np.maximum(level + noise, 0.0)))
    return days


@dataclass(frozen=True)
class ResidualCorrector:
    """Per-slot additive correction of a physics profile plus a deviation scale."""

    offsets: tuple[float, ...]
    u_scale: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "offsets", tuple(float(v) for v in self.offsets))
        if not self.offsets:
            raise SpecError("corrector needs at least one slot")
        if not self.u_scale >= 0:
            raise SpecError("u_scale must be >= 0")

    @classmethod
    def zero(cls, slots: int) -> "ResidualCorrector":
        return cls((0.0,) * slots, 0.0)


def fit_residual_corrector(physics_profiles: Sequence[LoadProfile],
                           measured_profiles: Sequence[LoadProfile]) -> ResidualCorrector:
    """Slot-wise mean residual (measured - physics) and its pooled spread."""
    if not physics_profiles or not measured_profiles:
        raise InsufficientDataError("need at least one (physics, measured) pair")
    if len(physics_profiles) != len(measured_profiles):
        raise InsufficientDataError(
            f"unpaired inputs: {len(physics_profiles)} physics vs {len(measured_profiles)} measured")
    n = len(physics_profiles[0])
    for p, m in zip(physics_profiles, measured_profiles):
        if len(p) != n or len(m) != n:
            raise InsufficientDataError("all profiles must have the same sample count")
    resid = np.array([m.array - p.array for p, m in zip(physics_profiles, measured_profiles)])
    offsets = resid.mean(axis=0)
    u_scale = float(np.sqrt(np.mean((resid - offsets) ** 2)))
    return ResidualCorrector(tuple(offsets.tolist()), u_scale)


def fuse_physics_data(x_prime: LoadProfile, corrector: ResidualCorrector, seed: int,
                      deviation: bool = True) -> LoadProfile:
    """Correct a physics-model profile with the data-driven residual term.

    Returns ``x' + offsets + u`` floored at 0 kW, where ``u`` is seeded
    zero-mean Gaussian noise of scale ``u_scale`` (omitted when
    ``deviation`` is False).
    """
    if len(corrector.offsets) != len(x_prime):
        raise SpecError(f"corrector has {len(corrector.offsets)} slots, profile has {len(x_prime)} samples")
    out = x_prime.array + np.asarray(corrector.offsets)
    if deviation and corrector.u_scale > 0:
        out = out + np.random.default_rng(seed).normal(0.0, corrector.u_scale, out.size)
    return x_prime.with_values(np.maximum(out, 0.0))
