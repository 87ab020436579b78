import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from condproc.bangbang import (BangBangResolvent, bb_kill_rate, bb_oracle, bb_resolvent_density, bb_symmetric_density,
                               bm_oracle, check_resolvent_equation, killed_bb_resolvent_density, not_ou,
                               ou_bb_speed_density, ou_quadratic_residual)
from condproc.errors import DegenerateDenominator, DomainError
from condproc.htransform import h_hit, transformed_resolvent_density
from condproc.models import BmWithDrift

BM = BmWithDrift(1.0)
BB = BangBangResolvent(bm_oracle(BM), 0.0)
coord = st.floats(-3.0, 3.0)
lam_s = st.floats(0.1, 5.0)


@given(lam_s, coord, coord)
def test_symmetric_density_is_symmetric(lam, x, y):
    a, b = bb_symmetric_density(BB, lam, x, y), bb_symmetric_density(BB, lam, y, x)
    assert abs(a - b) <= 1e-10 * abs(a)


@given(lam_s, coord, coord)
def test_reference_change_between_forms(lam, x, y):
    h = BB.h
    assert float(bb_resolvent_density(BB, lam, x, y)) == pytest.approx(
        float(bb_symmetric_density(BB, lam, x, y)) * float(h(y)) ** 2, rel=1e-12)


@given(lam_s, coord, coord)
def test_killed_bangbang_is_h_transform(lam, x, y):
    h = h_hit(BM.characteristics(), 0.0)
    assert float(killed_bb_resolvent_density(BB, lam, x, y)) == pytest.approx(
        float(transformed_resolvent_density(BM.resolvent_m, h, x, y, lam)), rel=1e-9)


def test_resolvent_equation_small_residual():
    oracle = bb_oracle(BB)
    for lam, chi, x, y in [(0.5, 2.0, 0.3, -0.4), (1.0, 0.3, -1.0, 1.5), (2.0, 1.0, 0.0, 0.0)]:
        assert abs(check_resolvent_equation(oracle, lam, chi, x, y)) < 1e-5


def test_resolvent_equation_base_process():
    assert abs(check_resolvent_equation(bm_oracle(BM), 2.0, 1.0, 0.3, -0.5)) < 1e-8


def test_total_mass_is_one_over_lambda():
    # the resurrected process is conservative: lam * int r^b(x, y) m(dy) = 1
    from condproc.diffusion import quad
    lam, x = 0.7, 0.4
    mass = sum(quad(lambda y: float(bb_resolvent_density(BB, lam, x, y)) * 2 * math.exp(-2 * y), lo, hi)
               for lo, hi in [(-40, 0), (0, x), (x, 40)])
    assert lam * mass == pytest.approx(1.0, rel=1e-7)


def test_divergence_as_lambda_vanishes():
    vals = [float(bb_resolvent_density(BB, l, 0.2, -0.1)) for l in (1.0, 0.1, 0.01, 0.001)]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert vals[-1] * 0.001 == pytest.approx(vals[-2] * 0.01, rel=0.05)


def test_kill_rate_is_inverse_r0():
    assert bb_kill_rate(bm_oracle(BM), 0.0) == pytest.approx(2.0)
    with pytest.raises(DomainError):
        bb_resolvent_density(BB, 0.0, 0.0, 0.0)


def test_degenerate_denominator():
    with pytest.raises(DegenerateDenominator):
        BB.denominator(1e-20)


def test_ou_bangbang_speed_is_not_gaussian():
    assert ou_quadratic_residual(-1.0) > 0.1
    assert not_ou(-1.0)
    # even in x and finite for large arguments
    assert ou_bb_speed_density(-1.0, 3.0) == pytest.approx(ou_bb_speed_density(-1.0, -3.0))
    assert np.isfinite(ou_bb_speed_density(-1.0, 30.0))
