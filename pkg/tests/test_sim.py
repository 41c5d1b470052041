import json

import numpy as np
import pytest

from qedkit import erlang_r as er
from qedkit import mms
from qedkit.dimensioning import OfferedLoadCurve, StaffingCurve
from qedkit.errors import DomainError, RunawayError
from qedkit.sim import (
    SimScenario,
    estimates_by_name,
    load_scenario,
    run_replications,
    scenario_from_dict,
    simulate,
    slice_estimates,
)
from qedkit.sim import _kernels as K


def run(model, params, horizon, reps=10, seed=1, **kw):
    return estimates_by_name(simulate(SimScenario(model, params, horizon, reps=reps, seed=seed, **kw)))


def covers(est, value, slack=0.0):
    return abs(est.point - value) <= est.half_width_95 + slack


def test_mm1_wait_interval_contains_exact_value():
    est = run("Mms", {"lam": 0.5, "mu": 1.0, "s": 1}, 1e5, reps=20)
    assert covers(est["expected_wait"], 1.0)
    assert covers(est["delay_prob"], 0.5, 0.005)


def test_mms_delay_and_utilisation():
    est = run("Mms", {"lam": 10.0, "mu": 1.0, "s": 12}, 2e4)
    exact = mms.mms_metrics(mms.MmsSpec(10.0, 1.0, 12))
    assert covers(est["delay_prob"], exact["delay_prob"], 0.005)
    assert covers(est["expected_wait"], exact["expected_wait"], 0.005)
    assert covers(est["server_utilization"], 10 / 12, 0.002)


def test_finite_room_against_exact():
    est = run("MmsN", {"lam": 10.0, "mu": 1.0, "s": 10, "n": 14}, 2e4)
    exact = mms.mmsn_metrics(mms.FiniteMmsSpec(mms.MmsSpec(10.0, 1.0, 10), 14))
    assert covers(est["block_prob"], exact["block_prob"], 0.003)
    assert covers(est["delay_prob"], exact["delay_prob"], 0.005)


def test_erlang_a_against_exact():
    est = run("ErlangA", {"lam": 10.0, "mu": 1.0, "s": 10, "theta": 0.5}, 2e4)
    exact = mms.erlang_a_metrics(mms.AbandonSpec(mms.MmsSpec(10.0, 1.0, 10), 0.5))
    assert covers(est["delay_prob"], exact["delay_prob"], 0.005)
    assert covers(est["abandon_prob"], exact["abandon_prob"], 0.003)


def test_slow_retrials_match_fixed_point():
    est = run("MmsNRetrial", {"lam": 100.0, "mu": 1.0, "s": 110, "n": 120, "delta_retry": 0.01}, 2e4, reps=8)
    assert abs(est["delay_prob"].point - 0.1798) <= 0.03


def test_retrial_speed_brackets_erlang_c():
    params = {"lam": 8.0, "mu": 1.0, "s": 10, "n": 12}
    erlang_c = mms.erlang_c(8.0, 10)
    fast = run("MmsNRetrial", {**params, "delta_retry": 1e3}, 3000.0)
    slow = run("MmsNRetrial", {**params, "delta_retry": 1e-3}, 3000.0)
    assert covers(fast["delay_prob"], erlang_c, 0.005)
    assert slow["delay_prob"].point + slow["delay_prob"].half_width_95 < erlang_c


def test_erlang_r_blocking_against_product_form():
    spec = er.ErlangRSpec(lam=1.0, mu=1.0, delta=0.5, p=0.5, s=2, n=5)
    params = {"lam": 1.0, "mu": 1.0, "delta": 0.5, "p": 0.5, "s": 2, "n": 5}
    est = run("ErlangRBlocking", params, 2e4)
    exact = er.blocking_measures(spec)
    assert covers(est["block_prob"], exact["p_block"], 0.003)
    assert covers(est["nurse_utilization"], exact["rho_s"], 0.003)


def test_erlang_r_holding_case1():
    params = {"lam": 5.0, "mu": 1.0, "delta": 0.1, "p": 0.9, "s": 58, "n": 522}
    est = run("ErlangRHolding", params, 5000.0, reps=6)
    assert abs(est["delay_prob"].point - 0.1817) <= 0.02


def test_cloud_runs_and_reports_utilisation():
    est = run("Cloud", {"lam": 20.0, "kappa": 0.5, "s": 24, "n": 70, "delta_retry": 0.05}, 2000.0, reps=4)
    assert 0 <= est["delay_prob"].point <= 1
    assert 0 < est["vm_utilization"].point < 1
    assert "mean_orbit" in est


def test_seed_reproducibility_and_stream_independence():
    sc = SimScenario("Mms", {"lam": 5.0, "mu": 1.0, "s": 6}, 500.0, reps=5, seed=42)
    a = run_replications(sc).counters
    b = run_replications(sc).counters
    assert np.array_equal(a, b)
    c = run_replications(sc.replace_seed(43)).counters
    assert not np.array_equal(a, c)
    short = SimScenario("Mms", {"lam": 5.0, "mu": 1.0, "s": 6}, 500.0, reps=3, seed=42)
    assert np.array_equal(run_replications(short).counters, a[:3])


def test_event_conservation():
    sc = SimScenario("MmsNRetrial", {"lam": 9.0, "mu": 1.0, "s": 9, "n": 10, "delta_retry": 0.2}, 1000.0, reps=3)
    c = run_replications(sc).counters
    assert np.all(c[:, K.TOTAL_IN] == c[:, K.TOTAL_OUT] + c[:, K.TOTAL_LOST] + c[:, K.FINAL_POP])


def test_unstable_run_is_stopped():
    sc = SimScenario("Mms", {"lam": 2.0, "mu": 1.0, "s": 1}, 1e5, reps=1, guard=1000)
    with pytest.raises(RunawayError):
        run_replications(sc)


def test_time_varying_with_constant_inputs_matches_stationary():
    curve = OfferedLoadCurve(np.array([0.0, 24.0]), np.array([10.0, 10.0]))
    staffing = StaffingCurve(np.arange(0.0, 24.0, 0.5), np.full(48, 12), review_period=0.5)
    sc = SimScenario("Mms", {"mu": 1.0}, 24.0 * 400, warmup=24.0, reps=6, seed=3,
                     staffing=staffing, lambda_curve=curve)
    est = simulate(sc)
    by = estimates_by_name(est)
    assert covers(by["delay_prob"], mms.erlang_c(10.0, 12), 0.01)
    assert len(slice_estimates(est)) == 48


def test_scenario_validation():
    with pytest.raises(DomainError):
        SimScenario("Nope", {}, 10.0)
    with pytest.raises(DomainError):
        SimScenario("Mms", {"lam": 1.0, "mu": 1.0}, 10.0)
    with pytest.raises(DomainError):
        SimScenario("Mms", {"lam": 1.0, "mu": 1.0, "s": 2}, 10.0, warmup=20.0)
    curve = OfferedLoadCurve(np.array([0.0, 1.0]), np.array([1.0, 1.0]))
    staffing = StaffingCurve(np.array([0.0, 0.5]), np.array([2, 2]), review_period=0.5)
    with pytest.raises(DomainError):
        SimScenario("MmsN", {"mu": 1.0}, 10.0, staffing=staffing, lambda_curve=curve)


def test_scenario_json_roundtrip(tmp_path):
    doc = {"model": "Mms", "params": {"lam": 3, "mu": 1, "s": 4}, "horizon": 100, "reps": 2, "seed": 9}
    path = tmp_path / "sc.json"
    path.write_text(json.dumps(doc))
    sc = load_scenario(str(path))
    assert sc == scenario_from_dict(doc)
    assert sc.params["s"] == 4.0 and sc.reps == 2 and sc.seed == 9
    with pytest.raises(DomainError):
        scenario_from_dict({"params": {}})
