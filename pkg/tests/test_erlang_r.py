import math

import numpy as np
import pytest

from qedkit import erlang_r as er
from qedkit.errors import DomainError, InstabilityError


def dense_chain(spec, held_cap):
    """Generator and state list of the (needy, content, held) chain, held <= held_cap."""
    states = [(j, k, h) for h in range(held_cap + 1) for j in range(spec.n + 1)
              for k in range(spec.n + 1 - j) if h == 0 or j + k == spec.n]
    index = {st: i for i, st in enumerate(states)}
    Q = np.zeros((len(states), len(states)))
    leave = (1 - spec.p) * spec.mu
    for (j, k, h), i in index.items():
        busy = min(j, spec.s)
        moves = []
        if j + k < spec.n:
            moves.append(((j + 1, k, h), spec.lam))
        elif h < held_cap:
            moves.append(((j, k, h + 1), spec.lam))
        if busy:
            moves.append(((j - 1, k + 1, h), spec.p * spec.mu * busy))
            moves.append(((j, k, h - 1) if h else (j - 1, k, h), leave * busy))
        if k:
            moves.append(((j + 1, k - 1, h), spec.delta * k))
        for dest, rate in moves:
            Q[i, index[dest]] += rate
    Q -= np.diag(Q.sum(axis=1))
    A = np.vstack([Q.T, np.ones(len(states))])
    rhs = np.zeros(len(states) + 1)
    rhs[-1] = 1.0
    return states, np.linalg.lstsq(A, rhs, rcond=None)[0]


def small_spec(**kw):
    base = dict(lam=0.5, mu=1.0, delta=0.5, p=0.5, s=2, n=4)
    base.update(kw)
    return er.ErlangRSpec(**base)


def test_spec_loads():
    spec = er.ErlangRSpec(lam=2.0, mu=1.0, delta=0.25, p=0.75, s=9, n=36)
    assert spec.R1 == pytest.approx(8.0)
    assert spec.R2 == pytest.approx(24.0)
    assert spec.r == pytest.approx(0.25)


def test_from_hedges_rounding():
    spec = er.ErlangRSpec.from_hedges(50, 1.0, 1.0, 1.0, 0.1, 0.9)
    assert spec.s == math.ceil(50 + math.sqrt(50))
    assert spec.n == round(500 + math.sqrt(500))
    assert spec.R1 == pytest.approx(50.0)


def test_spec_validation():
    with pytest.raises(DomainError):
        small_spec(p=1.0)
    with pytest.raises(DomainError):
        small_spec(s=5, n=4)


def test_blocking_product_form_matches_dense_chain():
    spec = small_spec(lam=1.2)
    states, pi = dense_chain(spec, 0)
    P = er.blocking_stationary(spec)
    for (j, k, _), prob in zip(states, pi):
        assert P[j, k] == pytest.approx(prob, abs=1e-12)
    m = er.blocking_measures(spec)
    block = sum(prob for (j, k, _), prob in zip(states, pi) if j + k == spec.n)
    assert m["p_block"] == pytest.approx(block, abs=1e-12)
    assert m["rho_s"] == pytest.approx(sum(prob * min(j, 2) for (j, _, _), prob in zip(states, pi)) / 2, abs=1e-12)


def test_nurse_utilisation_is_carried_load():
    spec = er.ErlangRSpec.from_hedges(10, 1.0, 1.0, 1.0, 0.1, 0.9)
    m = er.blocking_measures(spec)
    assert m["rho_s"] * spec.s == pytest.approx(spec.R1 * (1 - m["p_block"]), rel=1e-10)


def test_stability_bound_special_cases():
    one = small_spec(s=1, n=1)
    assert er.stability_rho_max(one) == pytest.approx(one.r, rel=1e-12)
    for s, n in ((2, 4), (3, 9), (5, 12)):
        spec = small_spec(s=s, n=n)
        assert er.stability_rho_max(spec) <= min(s, spec.r * n) / s + 1e-12


def test_stability_bound_grows_along_scaling():
    values = [er.stability_rho_max(er.ErlangRSpec.from_hedges(R, 1.0, 1.0, 1.0, 0.1, 0.9))
              for R in (5, 10, 50, 100, 500)]
    assert all(a < b for a, b in zip(values, values[1:]))
    assert values[-1] > 0.95


def test_qbd_blocks():
    spec = er.ErlangRSpec(lam=2.0, mu=1.0, delta=0.25, p=0.75, s=9, n=36)
    model = er.qbd_build(spec)
    assert np.allclose(model.A0, 2.0 * np.eye(37))
    assert np.abs((model.A0 + model.A1 + model.A2).sum(axis=1)).max() < 1e-12
    sol = er.qbd_solve(model)
    assert sol.residual < 1e-10
    assert sol.spectral_radius < 1


def test_qbd_solvers_agree():
    spec = small_spec(lam=0.8)
    model = er.qbd_build(spec)
    a = er.qbd_solve(model)
    b = er.qbd_solve(model, method="iteration")
    assert np.max(np.abs(a.rate_matrix - b.rate_matrix)) < 1e-9


def test_holding_matches_truncated_dense_chain():
    spec = small_spec(lam=0.6)
    states, pi = dense_chain(spec, 60)
    m = er.holding_measures(er.qbd_solve(er.qbd_build(spec)), spec)
    hold = sum(prob for (j, k, h), prob in zip(states, pi) if j + k == spec.n)
    busy = sum(prob * min(j, spec.s) for (j, _, _), prob in zip(states, pi)) / spec.s
    assert m["p_hold"] == pytest.approx(hold, abs=1e-8)
    assert m["rho_s"] == pytest.approx(busy, abs=1e-8)
    assert m["rho_s"] == pytest.approx(spec.R1 / spec.s, abs=1e-8)


def test_holding_dominates_blocking():
    rng = np.random.default_rng(3)
    checked = 0
    while checked < 10:
        s = int(rng.integers(1, 4))
        n = int(rng.integers(s, 7))
        spec = small_spec(lam=float(rng.uniform(0.1, 1.0)), s=s, n=n)
        try:
            sol = er.qbd_solve(er.qbd_build(spec))
        except InstabilityError:
            continue
        hold = er.holding_measures(sol, spec)
        blk = er.blocking_measures(spec)
        assert hold["p_hold"] >= blk["p_block"] - 1e-12
        assert hold["p_delay"] >= blk["p_delay"] - 1e-12
        checked += 1


def test_unstable_holding_refused():
    spec = small_spec(lam=5.0)
    with pytest.raises(InstabilityError):
        er.qbd_solve(er.qbd_build(spec))


def test_qed_limits_case3():
    h = er.ErlangRAsymptotics(1.0, 2.0, 0.5)
    lim = er.qed_limits_blocking(h)
    assert lim["g_b"] == pytest.approx(0.1792, abs=5e-5)
    assert lim["f_b"] == pytest.approx(0.0605, abs=5e-5)
    assert lim["h_b"] == pytest.approx(0.1199, abs=5e-5)


def test_holding_heuristic_case3():
    res = er.holding_heuristic(er.ErlangRAsymptotics(2.0, 2.0, 0.5))
    assert res["g_h"] == pytest.approx(0.0188, abs=5e-5)
    assert res["h_h"] == pytest.approx(0.0069, abs=5e-5)


def test_large_bed_hedge_removes_blocking():
    lim = er.qed_limits_blocking(er.ErlangRAsymptotics(1.0, 20.0, 0.25))
    assert lim["f_b"] < 1e-10
    assert er.holding_heuristic(er.ErlangRAsymptotics(1.0, 20.0, 0.25))["alpha"] < 1e-10


def test_qed_limits_continuous_at_zero_hedge():
    vals = [er.qed_limits_blocking(er.ErlangRAsymptotics(b, 1.0, 0.25)) for b in (-1e-4, 0.0, 1e-4)]
    for key in ("g_b", "f_b", "h_b"):
        spread = max(v[key] for v in vals) - min(v[key] for v in vals)
        assert spread < 1e-3
