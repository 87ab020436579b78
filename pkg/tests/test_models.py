import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, stats

from condproc.errors import DomainError
from condproc.models import (BmWithDrift, LogisticSde, OuProcess, bm_entrance_laplace, bm_infinite_excursion_rate,
                             erfc, excursion_rate_integral, logistic_conditioned_drift, logistic_h, ou_h)

mu_s = st.floats(0.2, 3.0)
lam_s = st.floats(0.05, 5.0)
coord = st.floats(-3.0, 3.0)


@given(st.floats(-6.0, 6.0))
def test_erfc_reflection(x):
    assert erfc(x) + erfc(-x) == pytest.approx(2.0, abs=1e-15)


@pytest.mark.parametrize("x", [-3.0, -0.5, 0.0, 0.3, 1.0, 2.5, 5.0, 10.0])
def test_erfc_against_mpmath(x):
    mpmath.mp.dps = 30
    exact = float(mpmath.erfc(x))
    assert erfc(x) == pytest.approx(exact, rel=1e-14)


def test_erfc_monotone_and_limits():
    xs = np.linspace(-5, 5, 401)
    assert np.all(np.diff(erfc(xs)) < 0)
    assert erfc(0.0) == 1.0


@given(mu_s, lam_s, coord, coord)
def test_resolvent_symmetric_in_m(mu, lam, x, y):
    m = BmWithDrift(mu)
    assert m.resolvent_m(lam, x, y) == pytest.approx(m.resolvent_m(lam, y, x), rel=1e-12)


@given(mu_s, coord)
def test_r0_closed_form(mu, x):
    m = BmWithDrift(mu)
    assert m.resolvent_m(0.0, 0.0, 0.0) == pytest.approx(1 / (2 * mu))
    assert m.resolvent_m(0.0, x, 0.0) == pytest.approx(math.exp(2 * mu * min(x, 0.0)) / (2 * mu), rel=1e-12)


def test_resolvent_is_laplace_transform_of_density():
    m = BmWithDrift(0.7)
    lam, x, y = 0.8, 0.2, -0.5
    lt, _ = integrate.quad(lambda t: math.exp(-lam * t) * m.transition_density(t, x, y), 0, np.inf, limit=200)
    # density w.r.t. Lebesgue = r_m * m'(y)
    assert lt == pytest.approx(m.resolvent_m(lam, x, y) * 2 * math.exp(-2 * 0.7 * y), rel=1e-7)


def test_entrance_laplace_transform():
    m = BmWithDrift(1.0)
    lam = 0.6
    # above a every excursion returns; below a only a fraction e^{2 mu x} does
    assert bm_entrance_laplace(m, lam, 0.8, finite=True) == pytest.approx(bm_entrance_laplace(m, lam, 0.8))
    x = -0.8
    ratio = bm_entrance_laplace(m, lam, x, finite=True) / bm_entrance_laplace(m, lam, x)
    assert ratio == pytest.approx(math.exp(2 * x), rel=1e-12)


def test_excursion_integral_equals_mu_over_lambda():
    for mu in (0.5, 1.0, 2.0):
        for lam in (0.5, 1.0, 2.0):
            assert excursion_rate_integral(BmWithDrift(mu), lam) == pytest.approx(mu / lam, abs=1e-8)
    assert bm_infinite_excursion_rate(BmWithDrift(1.5)) == pytest.approx(1.5)


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_survivor_cdf_total_mass(t):
    m = BmWithDrift(1.0)
    # P(K > t) = 2 Phi(-mu sqrt t); the survivor cdf is normalized to it
    assert m.survivor_cdf(t, 50.0) == pytest.approx(1.0, abs=1e-10)
    assert m.survivor_cdf(t, -50.0) == pytest.approx(0.0, abs=1e-10)


@given(st.floats(-4.0, 4.0), st.floats(0.2, 2.0))
def test_ou_h_even_and_bounded(x, g):
    ou = OuProcess(-g)
    assert ou_h(ou, x) == pytest.approx(ou_h(ou, -x), abs=0)
    assert 0 < ou_h(ou, x) <= 1


def test_ou_rejects_recurrent_parameter():
    with pytest.raises(DomainError):
        OuProcess(0.5)


def test_logistic_h_limits():
    lg = LogisticSde(0.3, 0.1, 1.0)
    assert logistic_h(lg, 1.0, 1.0) == pytest.approx(1.0)
    assert logistic_h(lg, 1.0, 2.0) == 1.0
    assert logistic_h(lg, 1.0, 1e-8) < 1e-2
    xs = [0.01, 0.1, 0.5, 0.9]
    assert all(a < b for a, b in zip([logistic_h(lg, 1.0, x) for x in xs], [logistic_h(lg, 1.0, x) for x in xs[1:]]))


def test_logistic_scale_from_zero_matches_quadrature():
    lg = LogisticSde(0.3, 0.1, 1.0)
    direct, _ = integrate.quad(lambda z: float(lg.scale_density(z)), 0, 0.7, limit=200)
    assert lg.scale_from_zero(0.7) == pytest.approx(direct, rel=1e-7)


def test_logistic_drift_conventions_differ_by_sigma_squared():
    lg = LogisticSde(0.3, 0.1, 1.4)
    x, a = 0.4, 1.0
    base = x * (0.3 - 0.1 * x)
    s2 = logistic_conditioned_drift(lg, a, x, "sigma2") - base
    bare = logistic_conditioned_drift(lg, a, x, "bare") - base
    assert s2 == pytest.approx((1.4 * x) ** 2 * bare, rel=1e-12)
    assert logistic_conditioned_drift(lg, a, 1.5) == pytest.approx(1.5 * (0.3 - 0.15))
    with pytest.raises(DomainError):
        logistic_conditioned_drift(lg, a, x, "other")


def test_conditioned_log_spec_matches_closed_form():
    lg = LogisticSde(0.3, 0.1, 1.0)
    spec = lg.conditioned_log_spec(1.0)
    for x in (0.02, 0.3, 0.95):
        expected = logistic_conditioned_drift(lg, 1.0, x) / x - 0.5
        assert float(spec.drift(math.log(x))) == pytest.approx(expected, rel=1e-4)  # linear interpolation of the table


def test_logistic_parameter_validation():
    with pytest.raises(DomainError):
        LogisticSde(0.8, 0.1, 1.0)
