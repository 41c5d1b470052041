import math

import numpy as np
import pytest

from qedkit import mms, retrial
from qedkit.dimensioning import halfin_whitt_delay
from qedkit.errors import DomainError

# Frozen oracle: the closed forms evaluated in mpmath at beta = gamma = 1.
G_11 = 0.153831599609115564916781371334
F_11 = 0.0895264077529538384892152927618


def test_finite_queue_limits_oracle():
    lim = retrial.finite_queue_limits(1.0, 1.0)
    assert lim["g"] == pytest.approx(G_11, rel=1e-13)
    assert lim["f"] == pytest.approx(F_11, rel=1e-13)


def test_finite_queue_limits_against_exact_queue():
    # sqrt(R) P(block) and P(delay) converge to f and g as R grows.
    beta, gamma, R = 1.0, 1.0, 10_000.0
    s = R + beta * math.sqrt(R)
    n = s + gamma * math.sqrt(R)
    m = mms.mmsn_metrics(mms.FiniteMmsSpec(mms.MmsSpec(R, 1.0, int(round(s))), int(round(n))))
    assert m["delay_prob"] == pytest.approx(G_11, abs=0.01)
    assert math.sqrt(R) * m["block_prob"] == pytest.approx(F_11, abs=0.01)


def test_large_room_recovers_halfin_whitt():
    for beta in (1.0, 2.0):
        lim = retrial.finite_queue_limits(beta, 50.0)
        assert lim["g"] == pytest.approx(halfin_whitt_delay(beta), abs=1e-10)
        assert lim["f"] < 1e-10


def test_erlang_a_special_values():
    assert retrial.erlang_a_limits(0.0, 1.0)["g_a"] == pytest.approx(0.5, abs=1e-14)
    # theta = 1 is an infinite-server system: f_a = E[(Z - beta)^+].
    beta = 0.7
    from scipy import stats

    tail = stats.norm.pdf(beta) - beta * stats.norm.sf(beta)
    assert retrial.erlang_a_limits(beta, 1.0)["f_a"] == pytest.approx(tail, rel=1e-12)


def test_cloud_with_fast_second_stage_is_finite_queue():
    # The spare room gamma sqrt(R / kappa) is gamma / sqrt(kappa) in sqrt(R) units.
    kappa = 1e4
    for beta, gamma in ((0.5, 1.0), (1.0, 1.0)):
        c = retrial.cloud_limits(beta, gamma, kappa)
        f = retrial.finite_queue_limits(beta, gamma / math.sqrt(kappa))
        assert c["g_c"] == pytest.approx(f["g"], abs=1e-3)
        assert c["f_c"] == pytest.approx(f["f"], abs=1e-3)


def test_cloud_limits_in_unit_interval():
    for kappa in (0.02, 0.2, 1.0):
        for beta in (0.25, 0.5, 1.0, 2.0):
            for gamma in (0.5, 1.0, 2.0):
                c = retrial.cloud_limits(beta, gamma, kappa)
                assert 0 < c["g_c"] < 1
                assert c["f_c"] > 0


def test_cloud_limits_smooth_through_zero_hedge():
    vals = [retrial.cloud_limits(b, 1.0, 0.2)["g_c"] for b in (-1e-6, 0.0, 1e-6)]
    assert max(vals) - min(vals) < 1e-5


def test_fixed_point_with_no_feedback_is_identity():
    sol = retrial.solve_retrial_fixed_point(lambda b, g: 0.0, 1.0, 1.0)
    assert sol.alpha == 0.0
    assert (sol.effective_beta, sol.effective_gamma) == (1.0, 1.0)


def test_fixed_point_solves_its_equation():
    sol = retrial.basic_fixed_point(1.0, 1.0)
    again = retrial.finite_queue_limits(sol.effective_beta, sol.effective_gamma)["f"]
    assert again == pytest.approx(sol.alpha, abs=1e-12)
    assert sol.effective_beta == pytest.approx(1.0 - sol.alpha)
    assert sol.alpha > F_11


def test_fixed_point_unique_on_random_draws():
    # The residual alpha -> f(shifted) - alpha must cross zero exactly once.
    rng = np.random.default_rng(5)
    for _ in range(200):
        beta, gamma = rng.uniform(0.1, 3.0, size=2)
        top = 2.0 * retrial.basic_fixed_point(beta, gamma).alpha + 1.0
        alphas = np.linspace(0.0, top, 400)
        resid = np.array([retrial.finite_queue_limits(beta - a, gamma)["f"] - a for a in alphas])
        assert np.sum(np.diff(np.sign(resid)) != 0) == 1


def test_cloud_and_abandon_fixed_points():
    sol = retrial.cloud_fixed_point(1.0, 1.0, 0.2)
    assert sol.effective_gamma == pytest.approx(1.0 - sol.alpha / math.sqrt(0.2))
    half = retrial.abandon_fixed_point(1.0, 1.0, return_fraction=0.5)
    full = retrial.abandon_fixed_point(1.0, 1.0)
    assert 0 < half.alpha < full.alpha


def test_approx_with_retrials_descales():
    res = retrial.approx_with_retrials("basic", 100.0, beta=1.0, gamma=1.0)
    assert res["loss_prob"] == pytest.approx(res["alpha"] / 10.0)
    assert res["delay_prob"] > G_11


def test_validation():
    with pytest.raises(DomainError):
        retrial.approx_with_retrials("nope", 10.0, beta=1.0)
    with pytest.raises(DomainError):
        retrial.basic_fixed_point(0.0, 1.0)
    with pytest.raises(DomainError):
        retrial.finite_queue_limits(1.0, 0.0)
    with pytest.raises(DomainError):
        retrial.abandon_fixed_point(1.0, 1.0, return_fraction=1.5)
