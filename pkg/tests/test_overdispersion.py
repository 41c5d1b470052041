import math

import numpy as np
import pytest

from qedkit import bulk, overdispersion as od
from qedkit.errors import DomainError, MethodInapplicableError


def test_spec_capacity_and_load():
    spec = od.OverdispersedSpec(a=4.0, b=1.0, beta=1.0)
    assert spec.mu == 4.0
    assert spec.sigma2 == 8.0
    assert spec.s == pytest.approx(4.0 + math.sqrt(8.0))
    back = od.OverdispersedSpec.from_capacity(4.0, 1.0, spec.s)
    assert back.beta == pytest.approx(1.0, rel=1e-14)


def test_power_scaling_recovers_capacity():
    spec = od.power_scaling(100, 1.0, 0.8)
    n = spec.mu
    assert spec.sigma2 == pytest.approx(n**1.6, rel=1e-10)
    assert n + n**0.8 == pytest.approx(100.0, rel=1e-12)
    with pytest.raises(DomainError):
        od.power_scaling(100, 1.0, 0.5)


def test_robust_hedge_is_smaller():
    spec = od.power_scaling(50, 1.0, 0.8)
    h = od.robust_hedge(spec)
    assert 0 < h.beta_n < spec.beta
    assert od.saddle_point(spec) > 1


def test_robust_mean_closer_to_exact_than_classic():
    for s in (10, 50):
        spec = od.power_scaling(s, 1.0, 0.8)
        exact = bulk.pollaczek_measures(bulk.BulkSpec(bulk.GammaPoisson(spec.a, spec.b), s))
        err_c = abs(od.classic_measures(spec)["mean_queue"] - exact["mean_queue"])
        err_r = abs(od.robust_measures(spec)["mean_queue"] - exact["mean_queue"])
        assert err_r < err_c


def _nb_sample(rng, a, b, n):
    return rng.poisson(rng.gamma(a, b, size=n))


def test_dispersion_test_calibration():
    rng = np.random.default_rng(11)
    rate = np.mean([od.dispersion_test(od.CountSample(rng.poisson(20, 500)))["reject"] for _ in range(200)])
    assert 0.02 <= rate <= 0.09


def test_dispersion_test_power():
    rng = np.random.default_rng(12)
    hits = [od.dispersion_test(od.CountSample(_nb_sample(rng, 5.0, 2.0, 1000)))["reject"] for _ in range(100)]
    assert np.mean(hits) > 0.95


def test_two_tests_mostly_agree():
    rng = np.random.default_rng(13)
    agree = []
    for k in range(200):
        counts = _nb_sample(rng, 200.0, 0.1, 300) if k % 2 else rng.poisson(20, 300)
        sample = od.CountSample(counts)
        agree.append(od.dispersion_test(sample)["reject"] == od.neyman_scott_test(sample)["reject"])
    assert np.mean(agree) >= 0.9


def test_fit_recovers_parameters():
    rng = np.random.default_rng(14)
    sample = od.CountSample(_nb_sample(rng, 95.68, 0.7297, 10_000))
    fit = od.fit_gamma_poisson(sample)
    assert fit["a_hat"] == pytest.approx(95.68, rel=0.15)
    assert fit["a_hat"] * fit["b_hat"] == pytest.approx(sample.sample_mean, rel=1e-10)


def test_fit_matches_scipy_likelihood():
    from scipy import stats

    rng = np.random.default_rng(15)
    sample = od.CountSample(_nb_sample(rng, 3.0, 2.0, 2000))
    fit = od.fit_gamma_poisson(sample)
    r, b = fit["a_hat"], fit["b_hat"]
    from scipy.special import gammaln

    def full(size):
        return float(np.mean(stats.nbinom.logpmf(sample.counts, size, size / (size + r * b))))

    # The profile drops the data-only terms -ln x! and x ln(mean).
    m = sample.sample_mean
    shift = float(np.mean(gammaln(sample.counts + 1))) - m * math.log(m)
    assert fit["loglik"] == pytest.approx(full(r) + shift, rel=1e-10)
    assert full(r) > full(0.95 * r) and full(r) > full(1.05 * r)


def test_fit_refuses_underdispersed_sample():
    with pytest.raises(MethodInapplicableError):
        od.fit_gamma_poisson(od.CountSample(np.array([5, 5, 6, 5, 4, 5])))


def test_constant_sample():
    res = od.dispersion_test(od.CountSample(np.full(50, 7)))
    assert res["statistic"] == 0.0
    assert res["p_value"] == pytest.approx(1.0)
    assert not res["reject"]


def test_sample_validation():
    with pytest.raises(DomainError):
        od.CountSample(np.array([1]))
    with pytest.raises(DomainError):
        od.CountSample(np.array([1, -2, 3]))
    with pytest.raises(DomainError):
        od.dispersion_test(od.CountSample(np.zeros(10)))
