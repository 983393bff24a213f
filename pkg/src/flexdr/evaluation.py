"""Response-contribution indices and model-quality metrics."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import FlexDRError, SpecError
from .profile import LoadProfile


def _pair(a, b, min_len: int = 1) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.size != b.size:
        raise SpecError(f"length mismatch: {a.size} vs {b.size}")
    if a.size < min_len:
        raise SpecError(f"need at least {min_len} samples, got {a.size}")
    return a, b


def delta_q(q: float, q_prime: float) -> float:
    """Contribution of one load: index before response minus index after."""
    return q - q_prime


def rmse_contribution(q: Sequence[float], q_prime: Sequence[float]) -> float:
    """Root-mean-square contribution over a day's sequence; larger is better."""
    q, q_prime = _pair(q, q_prime)
    return float(np.sqrt(np.mean((q - q_prime) ** 2)))


def rmsd(a: Sequence[float], b: Sequence[float]) -> float:
    a, b = _pair(a, b)
    return float(np.sqrt(np.mean((a - b) ** 2)))


def mad(a: Sequence[float], b: Sequence[float]) -> float:
    a, b = _pair(a, b)
    return float(np.mean(np.abs(a - b)))


def r_square(y: Sequence[float], y_hat: Sequence[float]) -> float:
    """Coefficient of determination, unclamped (negative for fits worse than the mean)."""
    y, y_hat = _pair(y, y_hat, min_len=2)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        raise FlexDRError("r_square undefined for constant observations")
    return 1.0 - float(np.sum((y - y_hat) ** 2)) / ss_tot


def pooled_rmsd(a: Sequence[LoadProfile], b: Sequence[LoadProfile]) -> float:
    """RMSD over all samples of paired profile lists."""
    if len(a) != len(b) or not a:
        raise SpecError("need equally many, and at least one, profiles on both sides")
    return rmsd(np.concatenate([p.array for p in a]), np.concatenate([p.array for p in b]))


def metric_row(reference: Sequence[float], model: Sequence[float]) -> dict[str, float]:
    """rmsd / mad / r_square of a model series against a reference series."""
    return {
        "rmsd": rmsd(reference, model),
        "mad": mad(reference, model),
        "r_square": r_square(reference, model),
    }


def peak_to_valley(profile: LoadProfile | Sequence[float]) -> float:
    values = profile.array if isinstance(profile, LoadProfile) else np.asarray(profile, dtype=float)
    return float(values.max() - values.min())


@dataclass(frozen=True)
class ContributionReport:
    per_load: dict[str, float]  # delta Q per load
    per_load_rmse: dict[str, float]
    combined_rmse: float
    n: int
    loads: tuple[str, ...] = field(default=())


def contribution_report(per_load: Mapping[str, tuple[Sequence[float], Sequence[float]]],
                        combined: tuple[Sequence[float], Sequence[float]]) -> ContributionReport:
    """Contribution of each load and of the whole set.

    ``per_load`` maps a load name to its (before, after) index sequences;
    ``combined`` is the (before, after) pair for all loads responding
    together. The scalar delta Q uses the sequence totals.
    """
    q, q_prime = _pair(*combined)
    deltas = {}
    rmses = {}
    for name, (before, after) in per_load.items():
        b, a = _pair(before, after)
        if b.size != q.size:
            raise SpecError(f"{name}: sequence length {b.size} differs from combined {q.size}")
        deltas[name] = delta_q(float(b.sum()), float(a.sum()))
        rmses[name] = rmse_contribution(b, a)
    return ContributionReport(deltas, rmses, rmse_contribution(q, q_prime), int(q.size), tuple(per_load))
