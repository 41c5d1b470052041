import numpy as np
import pytest

from qedkit import mms
from qedkit.errors import DomainError, InstabilityError

# Frozen oracle values: exact Erlang recursions in mpmath (30 digits).
ERLANG_C_100_111 = 0.199787279888061734810593225281
ERLANG_B_100_110 = 0.0274634484498229171532956570398


def dense_stationary(birth, death):
    """Stationary vector of a finite birth-death chain by a dense linear solve."""
    size = len(birth) + 1
    Q = np.zeros((size, size))
    for k in range(size - 1):
        Q[k, k + 1] = birth[k]
        Q[k + 1, k] = death[k]
    Q -= np.diag(Q.sum(axis=1))
    A = np.vstack([Q.T, np.ones(size)])
    rhs = np.zeros(size + 1)
    rhs[-1] = 1.0
    return np.linalg.lstsq(A, rhs, rcond=None)[0]


def test_mm1_geometric():
    dist = mms.mms_stationary(mms.MmsSpec(0.5, 1.0, 1))
    for k in range(10):
        assert dist.pmf(k) == pytest.approx(0.5 * 0.5**k, rel=1e-12)


def test_stationary_matches_truncated_solve():
    spec = mms.MmsSpec(3.0, 1.0, 4)
    K = 200
    pi = dense_stationary([3.0] * K, [min(k, 4) * 1.0 for k in range(1, K + 1)])
    dist = mms.mms_stationary(spec)
    got = np.array([dist.pmf(k) for k in range(40)])
    assert np.max(np.abs(got - pi[:40])) < 1e-10


def test_delay_probability_examples():
    assert mms.mms_metrics(mms.MmsSpec(10.0, 1.0, 12))["delay_prob"] == pytest.approx(0.449, abs=5e-4)
    assert mms.mms_metrics(mms.MmsSpec(0.7, 1.0, 1))["delay_prob"] == pytest.approx(0.7, rel=1e-12)
    assert mms.erlang_c(100.0, 111) == pytest.approx(ERLANG_C_100_111, rel=1e-12)


def test_erlang_b():
    assert mms.erlang_b(3.0, 0) == 1.0
    assert mms.erlang_b(1.0, 1) == pytest.approx(0.5)
    assert mms.erlang_b(100.0, 110) == pytest.approx(ERLANG_B_100_110, rel=1e-12)


def test_erlang_c_decreasing_in_servers():
    values = [mms.erlang_c(50.0, s) for s in range(51, 80)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_unstable_queue_rejected():
    with pytest.raises(InstabilityError):
        mms.mms_metrics(mms.MmsSpec(10.0, 1.0, 10))
    with pytest.raises(DomainError):
        mms.MmsSpec(-1.0, 1.0, 3)


def test_finite_room():
    base = mms.MmsSpec(10.0, 1.0, 12)
    m = mms.mmsn_metrics(mms.FiniteMmsSpec(base, 12))
    assert m["delay_prob"] == pytest.approx(m["block_prob"], rel=1e-12)
    assert mms.mmsn_metrics(mms.FiniteMmsSpec(base, 20))["delay_prob"] < 0.449


def test_finite_room_matches_dense_chain():
    spec = mms.FiniteMmsSpec(mms.MmsSpec(5.0, 1.0, 6), 8)
    pi = dense_stationary([5.0] * 8, [min(k, 6) for k in range(1, 9)])
    assert np.max(np.abs(mms.mmsn_distribution(spec) - pi)) < 1e-12
    m = mms.mmsn_metrics(spec)
    assert m["block_prob"] == pytest.approx(pi[8], abs=1e-12)
    assert m["delay_prob"] == pytest.approx(pi[6:].sum(), abs=1e-12)


def test_finite_room_monotone_in_capacity():
    base = mms.MmsSpec(10.0, 1.0, 12)
    rows = [mms.mmsn_metrics(mms.FiniteMmsSpec(base, n)) for n in range(12, 40)]
    assert all(a["block_prob"] >= b["block_prob"] for a, b in zip(rows, rows[1:]))
    assert all(a["delay_prob"] <= b["delay_prob"] for a, b in zip(rows, rows[1:]))


def test_erlang_a_examples():
    from scipy import stats

    # With patience rate equal to service rate the population is Poisson(R),
    # so lambda * P(abandon) = theta * E[(X - s)^+].
    m = mms.erlang_a_metrics(mms.AbandonSpec(mms.MmsSpec(100.0, 1.0, 105), 1.0))
    k = np.arange(106, 400)
    excess = float(np.sum((k - 105) * stats.poisson.pmf(k, 100.0)))
    assert 100.0 * m["abandon_prob"] == pytest.approx(excess, rel=1e-9)
    spec = mms.AbandonSpec(mms.MmsSpec(5.0, 1.0, 7), 0.2)
    K = 400
    pi = dense_stationary([5.0] * K, [min(k, 7) + 0.2 * max(k - 7, 0) for k in range(1, K + 1)])
    got = mms.erlang_a_metrics(spec)
    assert got["delay_prob"] == pytest.approx(pi[7:].sum(), abs=1e-10)


def test_erlang_a_with_theta_equal_mu_is_infinite_server():
    from scipy import stats

    m = mms.erlang_a_metrics(mms.AbandonSpec(mms.MmsSpec(8.0, 1.0, 10), 1.0))
    assert m["delay_prob"] == pytest.approx(stats.poisson.sf(9, 8.0), abs=1e-12)


def test_probabilities_in_range():
    for lam, s in ((0.5, 1), (20.0, 25), (900.0, 950)):
        m = mms.mms_metrics(mms.MmsSpec(lam, 1.0, s))
        assert 0.0 <= m["delay_prob"] <= 1.0
        assert m["expected_wait"] >= 0.0
