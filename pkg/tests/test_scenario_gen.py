from datetime import datetime, timedelta

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flexdr.errors import FormatError, InsufficientDataError, ResamplingGridError, SpecError
from flexdr.evaluation import pooled_rmsd
from flexdr.profile import (
    LoadProfile,
    fill_gaps,
    read_days_csv,
    read_profile_csv,
    write_profile_csv,
)
from flexdr.scenario_gen import (
    AugmentationConfig,
    ResidualCorrector,
    augment_days,
    fit_residual_corrector,
    fuse_physics_data,
    interpolate_profile,
)

DAY = datetime(2019, 3, 1)


def daily(values, step=60.0):
    return LoadProfile.from_array(DAY, step, values)


def demo_day():
    h = np.arange(24)
    return daily(3000 + 1200 * np.sin(2 * np.pi * (h - 6) / 24) + 300 * (h % 3))


def test_profile_invariants():
    with pytest.raises(SpecError):
        LoadProfile(DAY, 0, (1.0,))
    with pytest.raises(SpecError):
        LoadProfile(DAY, 60, ())
    with pytest.raises(SpecError):
        LoadProfile(DAY, 60, (1.0, float("inf")))
    p = daily([1, 2, 3], step=15)
    assert p.duration == 45


def test_interpolate_24_to_96():
    base = demo_day()
    dense = interpolate_profile(base, 96)
    assert len(dense) == 96
    assert dense.step == 15.0
    assert dense.array[::4].tolist() == list(base.values)


def test_interpolate_constant_and_identity():
    flat = daily([250.0] * 24)
    assert set(interpolate_profile(flat, 96).values) == {250.0}
    base = demo_day()
    assert interpolate_profile(base, 24) == base


@pytest.mark.parametrize("target", [25, 50, 12, 0])
def test_interpolate_rejects_off_grid(target):
    with pytest.raises(ResamplingGridError):
        interpolate_profile(demo_day(), target)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(0, 1e4), min_size=2, max_size=30), st.integers(2, 6))
def test_interpolate_no_overshoot_on_monotone(values, k):
    values = sorted(values)
    dense = interpolate_profile(daily(values), k * len(values)).array
    assert dense.min() >= values[0] - 1e-9 and dense.max() <= values[-1] + 1e-9
    assert np.all(np.diff(dense) >= -1e-9)
    assert dense[::k].tolist() == values


def test_augment_degenerate_cases():
    base = demo_day()
    assert augment_days(base, AugmentationConfig(days_to_generate=0)) == []
    days = augment_days(base, AugmentationConfig(days_to_generate=3, noise_scale=0.0))
    dense = interpolate_profile(base, 96)
    assert [d.values for d in days] == [dense.values] * 3
    assert days[2].start_time == DAY + timedelta(days=2)


def test_augment_deterministic_and_distinct():
    cfg = AugmentationConfig(days_to_generate=4, noise_seed=11, noise_scale=0.1)
    a = augment_days(demo_day(), cfg)
    b = augment_days(demo_day(), cfg)
    assert a == b
    assert a[0].values != a[1].values
    assert all(min(d.values) >= 0 for d in a)


def test_augment_shapes_for_random_configs():
    rng = np.random.default_rng(0)
    for _ in range(100):
        n = int(rng.choice([6, 12, 24]))
        k = int(rng.integers(1, 5))
        cfg = AugmentationConfig(target_points_per_day=n * k, days_to_generate=int(rng.integers(0, 5)),
                                 noise_seed=int(rng.integers(1000)), noise_scale=float(rng.uniform(0, 0.3)))
        out = augment_days(daily(rng.uniform(0, 100, n), step=1440 / n), cfg)
        assert len(out) == cfg.days_to_generate
        assert all(len(d) == n * k for d in out)


def test_corrector_fit_examples():
    phys = [demo_day(), daily(demo_day().array * 0.8)]
    zero = fit_residual_corrector(phys, phys)
    assert set(zero.offsets) == {0.0} and zero.u_scale == 0.0
    shifted = fit_residual_corrector([phys[0]], [daily(phys[0].array + 5)])
    assert shifted.offsets == pytest.approx([5.0] * 24)
    assert shifted.u_scale == pytest.approx(0.0, abs=1e-9)
    with pytest.raises(InsufficientDataError):
        fit_residual_corrector([], [])
    with pytest.raises(InsufficientDataError):
        fit_residual_corrector(phys, phys[:1])
    with pytest.raises(InsufficientDataError):
        fit_residual_corrector([daily([1.0] * 24)], [daily([1.0] * 12)])


def test_fuse_examples():
    x = daily([100.0] * 24)
    assert fuse_physics_data(x, ResidualCorrector.zero(24), seed=1) == x
    assert set(fuse_physics_data(x, ResidualCorrector((5.0,) * 24, 0.0), seed=1).values) == {105.0}
    noisy = ResidualCorrector((5.0,) * 24, 3.0)
    assert fuse_physics_data(x, noisy, seed=9) == fuse_physics_data(x, noisy, seed=9)
    with pytest.raises(SpecError):
        fuse_physics_data(x, ResidualCorrector.zero(96), seed=1)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**16))
def test_deterministic_correction_never_worse(days, seed):
    rng = np.random.default_rng(seed)
    phys = [daily(rng.uniform(0, 100, 24)) for _ in range(days)]
    meas = [daily(p.array + rng.normal(0, 20, 24) + rng.uniform(-10, 10)) for p in phys]
    corr = fit_residual_corrector(phys, meas)
    fused = [fuse_physics_data(p, corr, seed=0, deviation=False) for p in phys]
    assert pooled_rmsd(fused, meas) <= pooled_rmsd(phys, meas) + 1e-9


# -- CSV ingestion ----------------------------------------------------------

def test_csv_round_trip(tmp_path):
    p = demo_day()
    path = tmp_path / "heating.csv"
    write_profile_csv(p, path)
    assert path.read_text().splitlines()[0] == "timestamp,load_kw"
    assert read_profile_csv(path) == p


def _write(path, rows):
    path.write_text("timestamp,load_kw\n" + "".join(f"{t},{v}\n" for t, v in rows))
    return path


def test_csv_rejects_unsorted_and_duplicates(tmp_path):
    with pytest.raises(FormatError, match="duplicate"):
        read_profile_csv(_write(tmp_path / "d.csv", [("2019-01-01T00:00:00", 1), ("2019-01-01T00:00:00", 2)]))
    with pytest.raises(FormatError, match="unsorted"):
        read_profile_csv(_write(tmp_path / "u.csv", [("2019-01-01T01:00:00", 1), ("2019-01-01T00:00:00", 2)]))
    bad = tmp_path / "h.csv"
    bad.write_text("time,kw\n2019-01-01T00:00:00,1\n")
    with pytest.raises(FormatError):
        read_profile_csv(bad)


def test_csv_fills_short_gaps_only(tmp_path):
    rows = [(f"2019-01-01T{h:02d}:00:00", 10 * h) for h in range(24) if h not in (5, 6, 7)]
    p = read_profile_csv(_write(tmp_path / "g.csv", rows))
    assert len(p) == 24
    assert p.values[5:8] == pytest.approx([50, 60, 70])
    rows = [(f"2019-01-01T{h:02d}:00:00", 10 * h) for h in range(24) if h not in (5, 6, 7, 8)]
    with pytest.raises(InsufficientDataError):
        read_profile_csv(_write(tmp_path / "g4.csv", rows))


def test_read_days_drops_unusable(tmp_path):
    rows = []
    for d in range(3):
        for h in range(24):
            if d == 1 and 3 <= h < 9:
                continue
            rows.append((f"2019-01-0{d + 1}T{h:02d}:00:00", 100 + h))
    days = read_days_csv(_write(tmp_path / "m.csv", rows))
    assert [d.start_time.day for d in days] == [1, 3]


def test_fill_gaps_edges():
    out = fill_gaps(np.array([np.nan, 2.0, 3.0, np.nan]))
    assert out.tolist() == [2.0, 2.0, 3.0, 3.0]
    assert fill_gaps(np.array([np.nan] * 5)) is None
