import warnings

import pytest

from qedkit import bulk, regimes
from qedkit.errors import MethodInapplicableError


def exact_mean(s, gamma, eta):
    spec = regimes.poisson_spec(s, gamma, eta)
    return bulk.exact_measures_roots(bulk.BulkSpec(bulk.Poisson(s * spec.rho), s))["mean_queue"]


def test_classification():
    assert regimes.classify_regime(regimes.poisson_spec(10, 1.0, 0.3)) is regimes.Regime.MODERATE
    assert regimes.classify_regime(regimes.poisson_spec(10, 1.0, 0.5)) is regimes.Regime.CLASSICAL
    assert regimes.classify_regime(regimes.poisson_spec(10, 1.0, 0.8)) is regimes.Regime.EXTREME


def test_load_scaling():
    spec = regimes.poisson_spec(100, 2.0, 0.5)
    assert spec.rho == pytest.approx(0.8)


def test_corrected_mean_beats_leading_order():
    for s in (10, 50, 200):
        exact = exact_mean(s, 1.0, 0.5)
        spec = regimes.poisson_spec(s, 1.0, 0.5)
        lead = abs(regimes.mean_leading(spec) - exact)
        corr = abs(regimes.mean_corrected_half(spec) - exact)
        assert corr < lead
        assert corr < 0.01


def test_leading_mean_error_is_bounded_at_fixed_load():
    # At eta = 1/2 the leading-order error is O(1): it stays near a constant as s grows.
    errs = []
    for s in (100, 1000):
        spec = regimes.poisson_spec(s, 1.0, 0.5)
        errs.append(regimes.mean_leading(spec) - exact_mean(s, 1.0, 0.5))
    assert errs[0] == pytest.approx(errs[1], abs=0.01)


def test_extreme_regime_relative_error_shrinks():
    rel = []
    for s in (10, 1000):
        exact = exact_mean(s, 0.1, 0.75)
        rel.append(abs(regimes.mean_leading(regimes.poisson_spec(s, 0.1, 0.75)) - exact) / exact)
    assert rel[1] < rel[0]


def test_corrected_mean_only_for_poisson_half():
    with pytest.raises(MethodInapplicableError):
        regimes.mean_corrected_half(regimes.poisson_spec(10, 1.0, 0.6))
    with pytest.raises(MethodInapplicableError):
        regimes.mean_corrected_half(regimes.RegimeSpec(eta=0.5, gamma=1.0, s=10, mu=1.0, sigma2=2.0))


def test_moderate_regime_warns_and_returns_limits():
    spec = regimes.poisson_spec(50, 1.0, 0.3)
    with pytest.warns(regimes.RegimeWarning):
        assert regimes.mean_leading(spec) == 0.0
    with pytest.warns(regimes.RegimeWarning):
        assert regimes.variance_leading(spec) == 0.0
    with pytest.warns(regimes.RegimeWarning):
        assert regimes.empty_prob_leading(spec) == 1.0


def test_no_warning_in_classical_regime():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        regimes.mean_leading(regimes.poisson_spec(50, 1.0, 0.5))


def test_variance_series_matches_integral_form():
    for gamma in (0.5, 1.0, 2.0):
        spec = regimes.poisson_spec(100, gamma, 0.5)
        assert regimes.variance_half_series(spec) == pytest.approx(regimes.variance_leading(spec), rel=1e-8)


def test_variance_and_empty_probability_against_exact():
    rel, gap = [], []
    for s in (50, 500):
        spec = regimes.poisson_spec(s, 1.0, 0.5)
        exact = bulk.pollaczek_measures(bulk.BulkSpec(bulk.Poisson(s * spec.rho), s))
        rel.append(abs(regimes.variance_leading(spec) / exact["variance_queue"] - 1))
        gap.append(abs(regimes.empty_prob_leading(spec) - exact["p_empty"]))
    # The first correction is O(sqrt s) against an O(s) leading term.
    assert rel[1] < rel[0] < 0.3
    assert gap[1] < gap[0] < 0.05


def test_eta_one_refused():
    with pytest.raises(MethodInapplicableError):
        regimes.variance_leading(regimes.poisson_spec(10, 0.1, 1.0))
