import numpy as np
import pytest

from qedkit import bulk
from qedkit.errors import DomainError, InstabilityError

# Frozen oracle: mpmath findroot on z^2 = exp(1.366 (z - 1)).
POISSON_ROOT = -0.38761550722828818947543380367


def test_single_interior_root():
    spec = bulk.BulkSpec(bulk.Poisson(1.366), 2)
    roots = bulk.find_roots_iter(spec)
    assert roots.roots.size == 1
    assert roots.roots[0].real == pytest.approx(POISSON_ROOT, abs=1e-13)
    assert abs(roots.roots[0].imag) < 1e-14


@pytest.mark.parametrize("law,s", [
    (bulk.Poisson(8.0), 10),
    (bulk.Poisson(90.0), 100),
    (bulk.GammaPoisson(5.0, 1.2), 8),
    (bulk.GammaPoisson(50.0, 0.5), 30),
])
def test_roots_are_interior_and_solve_the_equation(law, s):
    spec = bulk.BulkSpec(law, s)
    roots = bulk.find_roots_iter(spec)
    z = roots.roots
    assert z.size == s - 1
    assert np.all(np.abs(z) < 1)
    assert np.max(np.abs(z**s - law.pgf(z))) < 1e-10
    # Conjugate-closed set.
    gaps = np.abs(np.conj(z)[:, None] - z[None, :]).min(axis=1)
    assert np.max(gaps) < 1e-10


def test_bl_roots_agree_with_iteration():
    spec = bulk.BulkSpec(bulk.GammaPoisson(10.0, 0.8), 20)
    a = bulk.find_roots_iter(spec).roots
    b = bulk.find_roots_bl(spec).roots
    assert a.size == b.size
    assert np.abs(a[:, None] - b[None, :]).min(axis=1).max() < 1e-9


def test_bl_refuses_heavy_load():
    from qedkit.errors import MethodInapplicableError

    with pytest.raises(MethodInapplicableError):
        bulk.find_roots_bl(bulk.BulkSpec(bulk.GammaPoisson(20.0, 0.8), 20))


def test_single_server_closed_form():
    # With s = 1 there are no interior roots, and E Q = lam^2 / (2 (1 - lam)).
    lam = 0.6
    spec = bulk.BulkSpec(bulk.Poisson(lam), 1)
    m = bulk.exact_measures_roots(spec)
    assert m["mean_queue"] == pytest.approx(lam**2 / (2 * (1 - lam)), rel=1e-12)
    assert m["p_empty"] == pytest.approx((1 - lam) / np.exp(-lam), rel=1e-12)


@pytest.mark.parametrize("law,s", [(bulk.Poisson(8.5), 10), (bulk.GammaPoisson(4.0, 1.5), 9)])
def test_root_and_contour_routes_agree(law, s):
    spec = bulk.BulkSpec(law, s)
    a = bulk.exact_measures_roots(spec)
    b = bulk.pollaczek_measures(spec)
    assert a["mean_queue"] == pytest.approx(b["mean_queue"], rel=1e-9)
    assert a["p_empty"] == pytest.approx(b["p_empty"], rel=1e-9)


def test_spitzer_partial_sums_bracket_the_limit():
    spec = bulk.BulkSpec(bulk.Poisson(7.0), 10)
    exact = bulk.pollaczek_measures(spec)
    prev = None
    for terms in (5, 20, 80):
        cur = bulk.spitzer_truncated(spec, terms)
        assert cur["mean_queue_lower"] <= exact["mean_queue"] + 1e-12
        assert cur["p_empty_upper"] >= exact["p_empty"] - 1e-12
        if prev is not None:
            assert cur["mean_queue_lower"] >= prev["mean_queue_lower"]
        prev = cur
    assert prev["mean_queue_lower"] == pytest.approx(exact["mean_queue"], rel=1e-8)
    assert prev["variance_queue_lower"] == pytest.approx(exact["variance_queue"], rel=1e-7)


def test_super_unit_root():
    spec = bulk.BulkSpec(bulk.Poisson(5.0), 6)
    r0 = bulk.super_unit_root(spec)
    assert r0 > 1
    assert r0**6 == pytest.approx(np.exp(5.0 * (r0 - 1)), rel=1e-10)


def test_spec_validation():
    with pytest.raises(InstabilityError):
        bulk.BulkSpec(bulk.Poisson(10.0), 10)
    with pytest.raises(DomainError):
        bulk.BulkSpec(bulk.Poisson(1.0), 0)
    with pytest.raises(DomainError):
        bulk.GammaPoisson(-1.0, 1.0)


def test_gamma_poisson_moments():
    law = bulk.GammaPoisson(3.0, 2.0)
    assert law.mean() == 6.0
    assert law.variance() == 18.0
    dist = law.sum_of(2)
    assert dist.mean() == pytest.approx(12.0)
    assert dist.var() == pytest.approx(36.0)
