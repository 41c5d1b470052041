import math

import numpy as np
import pytest

from qedkit import specfun
from qedkit.errors import DomainError

# Frozen oracle values: mpmath at 30 significant digits.
PHI_1 = 0.241970724519143349797830192936
CDF_1 = 0.841344746068542948585232545632
ERFC_1 = 0.157299207050285130658779364917
ZETA = {
    0.5: -1.46035450880958681288949915252,
    -0.5: -0.207886224977354566017306725397,
    -1.5: -0.0254852018898330359495429869107,
    -2.5: 0.00851692877785033054235856702834,
    -0.25: -0.320451264228577282790444493055,
}
LOG_GAMMA_10_5 = 13.940625219403763633161237888


def test_pdf_values():
    assert specfun.std_normal_pdf(0.0) == pytest.approx(1 / math.sqrt(2 * math.pi), abs=1e-15)
    assert specfun.std_normal_pdf(1.0) == pytest.approx(PHI_1, rel=1e-14)
    for x in (0.3, 1.7, 4.0):
        assert specfun.std_normal_pdf(-x) == specfun.std_normal_pdf(x)


def test_cdf_values_and_reflection():
    assert specfun.std_normal_cdf(0.0) == 0.5
    assert specfun.std_normal_cdf(1.0) == pytest.approx(CDF_1, rel=1e-14)
    for x in (0.5, 2.0, 6.0):
        assert specfun.std_normal_cdf(x) + specfun.std_normal_cdf(-x) == pytest.approx(1.0, abs=1e-14)


def test_cdf_monotone_and_derivative_is_pdf():
    grid = np.linspace(-5, 5, 101)
    cdf = np.array([specfun.std_normal_cdf(x) for x in grid])
    assert np.all(np.diff(cdf) >= 0)
    h = 1e-5
    for x in grid:
        fd = (specfun.std_normal_cdf(x + h) - specfun.std_normal_cdf(x - h)) / (2 * h)
        assert fd == pytest.approx(specfun.std_normal_pdf(x), abs=1e-8)


def test_erfc():
    assert specfun.erfc(0.0) == 1.0
    assert specfun.erfc(1.0) == pytest.approx(ERFC_1, rel=1e-14)
    for x in (0.7, 3.0):
        assert specfun.erfc(x) + specfun.erfc(-x) == pytest.approx(2.0, abs=1e-15)


def test_zeta_lattice():
    assert specfun.zeta(0.0) == -0.5
    for s, expected in ZETA.items():
        assert specfun.zeta(s) == pytest.approx(expected, rel=1e-12)


def test_zeta_rejects_pole_and_right_half():
    with pytest.raises(DomainError):
        specfun.zeta(1.0)
    with pytest.raises(DomainError):
        specfun.zeta(2.0)


def test_log_gamma():
    assert specfun.log_gamma(1.0) == 0.0
    assert specfun.log_gamma(2.0) == pytest.approx(0.0, abs=1e-15)
    assert specfun.log_gamma(10.5) == pytest.approx(LOG_GAMMA_10_5, rel=1e-14)
    for n in range(16):
        assert round(math.exp(specfun.log_gamma(n + 1.0))) == math.factorial(n)


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_non_finite_inputs_rejected(bad):
    with pytest.raises(DomainError):
        specfun.std_normal_pdf(bad)
    with pytest.raises(DomainError):
        specfun.std_normal_cdf(bad)


def test_normal_hazard_large_argument():
    # phi(x)/Phi(-x) ~ x + 1/x for large x; the naive ratio is 0/0 at x = 40.
    x = 40.0
    assert specfun.normal_hazard(x) == pytest.approx(x + 1 / x - 2 / x**3, rel=1e-6)
    assert specfun.normal_hazard(0.0) == pytest.approx(2 * specfun.std_normal_pdf(0.0))


def test_gauss_exp_cdf_matches_naive_product_where_safe():
    for a, w in ((0.5, 1.0), (1.0, -2.0), (0.0, 3.0)):
        naive = specfun.std_normal_pdf(a) * math.exp(0.5 * w * w) * specfun.std_normal_cdf(w)
        assert specfun.gauss_exp_cdf(a, w) == pytest.approx(naive, rel=1e-12)
    assert math.isfinite(specfun.gauss_exp_cdf(40.0, 39.0))
