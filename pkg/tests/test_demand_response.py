import numpy as np
import pytest

from _instances import DAY, lattice_instance, park_instance, subsets
from flexdr.demand_response import (
    ALL_CASES,
    DispatchParams,
    DrCostParams,
    FlexibleCase,
    ResponseTarget,
    brute_force_dispatch,
    check_dispatch,
    dr_cost,
    feasible_envelope,
    make_target,
    plan_storage,
    schedule_dispatch,
    unresponsiveness,
    window_for,
)
from flexdr.errors import AccountingError, CapabilityBoundError, EnumerationSizeError, SpecError
from flexdr.load_models import StorageSpec
from flexdr.profile import LoadProfile


def flat(values, step=60.0):
    return LoadProfile.from_array(DAY, step, values)


def test_dr_cost():
    params = DrCostParams(a_dr=0.01, b_dr=2.0, p_min=0.0, p_max=50.0)
    assert dr_cost(0, params) == 0
    assert dr_cost(10, params) == pytest.approx(21.0)
    with pytest.raises(CapabilityBoundError):
        dr_cost(51, params)


def test_unresponsiveness():
    assert unresponsiveness(40, 40) == 0
    assert unresponsiveness(100, 40) == 60
    assert unresponsiveness(0, 0) == 0
    with pytest.raises(AccountingError):
        unresponsiveness(10, 11)


def test_case_parsing():
    assert [c.id for c in ALL_CASES] == ["H-R-S", "H-R", "H-S", "R-S", "S", "R", "H"]
    assert FlexibleCase.parse("s-h").id == "H-S"
    for bad in ("X", "H-H", ""):
        with pytest.raises(SpecError):
            FlexibleCase.parse(bad)


def test_standard_windows():
    assert window_for("only_night", 24) == (0, 1, 2, 3, 4, 5, 22, 23)
    assert window_for("only_daytime", 24) == tuple(range(8, 18))
    assert window_for("all_day", 96, 15) == tuple(range(96))
    assert len(window_for("only_night", 96, 15)) == 32
    with pytest.raises(SpecError):
        ResponseTarget("evening", (1,), (1.0,), 24)
    with pytest.raises(SpecError):
        ResponseTarget("all_day", (), (), 24)


def test_feasible_envelope():
    params = DispatchParams()
    assert feasible_envelope("H", 0, params, flat([3000.0])) == (0.0, 3000.0)
    assert feasible_envelope("H", 0, params, flat([6000.0])) == (0.0, 4500.0)
    assert feasible_envelope("R", 0, params, flat([0.0])) == (0.0, 0.0)
    outside = DispatchParams(heat_envelope=((5000.0, 6000.0),))
    assert feasible_envelope("H", 0, outside, flat([9000.0])) == (0.0, 0.0)
    assert feasible_envelope("S", 0, params, None) == (0.0, 1000.0)


def test_zero_demand():
    target = make_target("only_night", 24, 0.0)
    base = {k: flat([2000.0] * 24) for k in "HR"}
    res = schedule_dispatch("H-R-S", target, base)
    assert res.f == 0 and res.f_pre == 0
    assert all(v == 0 for series in res.responses.values() for v in series)


def test_storage_night_window_fully_covered():
    target = ResponseTarget("only_night", (20, 21, 22, 23), (1000.0,) * 4, 24)
    res = schedule_dispatch("S", target, {})
    assert res.f_pre == 4000.0
    assert res.f_act == 4000.0
    assert res.f == 0.0
    assert res.soc[-1] == 0.4
    assert max(res.soc) <= 0.95
    assert check_dispatch(res, target, {}, DispatchParams()) == []


def test_storage_limited_by_headroom_without_charging_window():
    # all-day request: no slot to recharge, so nothing can be discharged
    target = make_target("all_day", 24, 500.0)
    res = schedule_dispatch("S", target, {})
    assert res.f == res.f_pre


def test_superset_not_worse_than_storage_alone():
    target = make_target("only_night", 24, 2500.0)
    base = {"H": flat([1800.0] * 24), "R": flat([900.0] * 24)}
    f_hrs = schedule_dispatch("H-R-S", target, base).f
    assert f_hrs <= schedule_dispatch("S", target, base).f
    assert f_hrs == 0.0


def test_baseline_grid_must_match():
    target = make_target("only_night", 24, 100.0)
    with pytest.raises(SpecError):
        schedule_dispatch("H", target, {"H": flat([1.0] * 96, step=15)})
    with pytest.raises(SpecError):
        schedule_dispatch("H", target, {})


def test_plan_storage_charges_before_window():
    spec = StorageSpec()
    plan = plan_storage([0] * 20 + [1000] * 4, [True] * 20 + [False] * 4, 1.0, spec)
    assert plan.discharge[20:].tolist() == [1000.0] * 4
    assert plan.charge.sum() == pytest.approx(4000.0)
    assert plan.soc[0] == plan.soc[-1] == 0.4


# -- oracle -------------------------------------------------------------------

def test_oracle_two_step_heating():
    target = ResponseTarget("all_day", (0, 1), (100.0, 100.0), 2)
    base = {"H": flat([80.0, 80.0])}
    res = brute_force_dispatch("H", target, base, DispatchParams(), 20.0)
    assert res.f == 40.0
    assert res.responses["H"] == (80.0, 80.0)
    assert schedule_dispatch("H", target, base).f == 40.0


def test_oracle_storage_without_charging_window():
    spec = StorageSpec(energy_capacity=400, charge_power_max=50, discharge_power_max=-50,
                       soc_min=0.25, soc_max=0.75, soc_initial=0.5)
    target = ResponseTarget("all_day", (0, 1, 2), (50.0, 50.0, 50.0), 3)
    res = brute_force_dispatch("S", target, {}, DispatchParams(storage=spec), 10.0)
    assert res.f == res.f_pre == 150.0


def test_oracle_size_limits():
    target = make_target("all_day", 7, 10.0)
    with pytest.raises(EnumerationSizeError):
        brute_force_dispatch("H", target, {"H": flat([10.0] * 7)}, DispatchParams(), 10.0)
    target = make_target("all_day", 2, 10.0)
    with pytest.raises(EnumerationSizeError):
        brute_force_dispatch("H", target, {"H": flat([100.0] * 2)}, DispatchParams(), 10.0)


def test_oracle_agrees_when_greedy_is_perfect():
    rng = np.random.default_rng(99)
    checked = 0
    for _ in range(60):
        case, target, base, params = lattice_instance(rng)
        g = schedule_dispatch(case, target, base, params)
        if g.f == 0:
            assert brute_force_dispatch(case, target, base, params, 10.0).f == 0
            checked += 1
    assert checked > 5


def test_greedy_vs_oracle_gap():
    rng = np.random.default_rng(2024)
    for _ in range(80):
        case, target, base, params = lattice_instance(rng)
        g = schedule_dispatch(case, target, base, params)
        o = brute_force_dispatch(case, target, base, params, 10.0)
        assert check_dispatch(o, target, base, params) == []
        assert g.f >= o.f - 1e-9
        assert g.f - o.f <= 0.05 * g.f_pre + 10.0


# -- properties -----------------------------------------------------------------

def test_constraints_hold_on_random_park_instances():
    rng = np.random.default_rng(5)
    for i in range(150):
        target, base, params = park_instance(rng, horizon=int(rng.choice([6, 24, 48])))
        case = ALL_CASES[i % 7]
        res = schedule_dispatch(case, target, base, params)
        assert res.warnings == ()
        assert check_dispatch(res, target, base, params) == []
        spec = params.storage
        assert all(spec.soc_min - 1e-12 <= s <= spec.soc_max + 1e-12 for s in res.soc)
        discharge = res.responses.get("S", (0.0,) * target.horizon)
        assert not any(c > 0 and d > 0 for c, d in zip(res.storage_charge, discharge))
        assert res.soc[-1] == spec.soc_initial


def test_accounting_reproducible_from_series():
    rng = np.random.default_rng(8)
    for _ in range(30):
        target, base, params = park_instance(rng)
        res = schedule_dispatch("H-R-S", target, base, params)
        dt = target.step_hours
        assert res.f_pre == pytest.approx(sum(target.demand) * dt, rel=1e-9)
        assert res.f_act == pytest.approx(float(res.delivered().sum()) * dt, rel=1e-9, abs=1e-9)
        assert res.f == pytest.approx(res.f_pre - res.f_act, rel=1e-9, abs=1e-9)


def test_monotone_in_case_membership():
    rng = np.random.default_rng(13)
    for _ in range(40):
        target, base, params = park_instance(rng)
        results = {c.id: schedule_dispatch(c, target, base, params) for c in ALL_CASES}
        for c in ALL_CASES:
            for sub in subsets(c):
                assert results[c.id].f <= results[sub.id].f
        assert results["H-R-S"].f == min(r.f for r in results.values())


def test_semi_continuous_minimum():
    params = DispatchParams(p_heat_min=60.0, p_rot_min=50.0)
    base = {"H": flat([80.0]), "R": flat([80.0])}
    target = ResponseTarget("all_day", (0,), (100.0,), 1)
    res = schedule_dispatch("H-R", target, base, params)
    assert res.f == pytest.approx(brute_force_dispatch("H-R", target, base, params, 10.0).f)
    assert res.responses["H"][0] in (0.0,) or res.responses["H"][0] >= 60.0
