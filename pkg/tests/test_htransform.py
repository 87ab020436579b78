import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from condproc.diffusion import KillingMeasure
from condproc.errors import InconsistentRepresentation
from condproc.htransform import (ExcessiveFn, RepresentingMeasure, constant_h, h_hit, hit_representation,
                                 reconstruct_h, transform_characteristics, transformed_drift,
                                 transformed_resolvent_density)
from condproc.models import BmWithDrift, OuProcess, ou_h

BM = BmWithDrift(1.0)
CHARS = BM.characteristics()
H = h_hit(CHARS, 0.0)
coord = st.floats(-3.0, 3.0)


@given(coord)
def test_h_hit_closed_form(x):
    assert float(H(x)) == pytest.approx(math.exp(2 * min(x, 0.0)), rel=1e-12)


def test_h_hit_one_sided_derivatives_at_a():
    assert float(H.deriv(0.0, -1)) == pytest.approx(2.0)
    assert float(H.deriv(0.0, 1)) == 0.0


@given(st.floats(-2.0, 2.0))
def test_h_hit_general_matches_ou(x):
    ou = OuProcess(-1.0)
    h = h_hit(ou.characteristics(), 0.0)
    assert float(h(x)) == pytest.approx(float(ou_h(ou, x)), rel=1e-9, abs=1e-14)


def test_representation_rebuilds_h():
    xs = np.linspace(-2, 2, 21)
    assert np.allclose(reconstruct_h(CHARS, hit_representation(0.0), 0.0, xs), H(xs), rtol=1e-12)


def test_constant_h_is_atom_at_lower_end():
    one = constant_h(0.0)
    nu = RepresentingMeasure(atom_lower=1.0)
    xs = np.linspace(-2, 2, 11)
    assert np.allclose(reconstruct_h(CHARS, nu, 0.0, xs), one(xs))
    tc = transform_characteristics(CHARS, one, nu)
    assert tc.killing.is_null


def test_transform_killing_atom_is_inverse_scale():
    tc = transform_characteristics(CHARS, H, hit_representation(0.0))
    assert tc.killing.atom_mass(0.0) == pytest.approx(1.0 / float(CHARS.scale(0.0)))
    # rescaling h by s(a) moves the atom to s(a)
    s_a = float(CHARS.scale(0.0))
    assert tc.rescaled(s_a).killing.atom_mass(0.0) == pytest.approx(s_a)


@given(coord, st.floats(0.2, 5.0))
def test_rescaling_leaves_speed_times_scale_invariant(x, c):
    tc = transform_characteristics(CHARS, H, hit_representation(0.0))
    r = tc.rescaled(c)
    assert float(r.scale_density(x) * r.speed_density(x)) == pytest.approx(
        float(tc.scale_density(x) * tc.speed_density(x)), rel=1e-12)


def test_inconsistent_representation_raises():
    with pytest.raises(InconsistentRepresentation):
        transform_characteristics(CHARS, H, RepresentingMeasure(KillingMeasure(None, ((1.0, 1.0),))))


def test_transformed_drift_flips_sign_below_a():
    assert float(transformed_drift(BM.spec(), H, -0.5)) == pytest.approx(1.0)
    assert float(transformed_drift(BM.spec(), H, 0.5)) == pytest.approx(-1.0)
    assert float(transformed_drift(BM.spec(), H, 0.0, -1)) == pytest.approx(1.0)
    assert float(transformed_drift(BM.spec(), H, 0.0, 1)) == pytest.approx(-1.0)


@given(st.floats(0.1, 3.0), coord, coord)
def test_transformed_resolvent_reference_change(lam, x, y):
    r_m = transformed_resolvent_density(BM.resolvent_m, H, x, y, lam, "m")
    r_mh = transformed_resolvent_density(BM.resolvent_m, H, x, y, lam, "mh")
    assert float(r_m) == pytest.approx(float(r_mh) * float(H(y)) ** 2, rel=1e-12)
    # the m^h form is symmetric
    assert float(r_mh) == pytest.approx(float(transformed_resolvent_density(BM.resolvent_m, H, y, x, lam, "mh")),
                                        rel=1e-12)


def test_excessive_fn_normalization():
    f = ExcessiveFn.normalized(lambda x: 3 * np.exp(np.asarray(x)), lambda x: 3 * np.exp(np.asarray(x)),
                               lambda x: 3 * np.exp(np.asarray(x)), 0.0)
    assert float(f(0.0)) == pytest.approx(1.0)
