import math

import mpmath as mp
import pytest
from hypothesis import given, strategies as st

from neutron_bouncer.units import (
    DEFAULT_CONSTANTS, HBAR, NEUTRON_MASS, PEV, derive_scales, from_peV, make_constants, to_peV,
)

positive = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False, allow_infinity=False)


def test_default_mass_is_codata():
    assert make_constants().m == 1.67492749804e-27


def test_override_changes_only_that_field():
    c = make_constants(g=9.80665)
    assert c.g == 9.80665
    assert (c.m, c.hbar, c.c, c.mu_n) == (DEFAULT_CONSTANTS.m, DEFAULT_CONSTANTS.hbar,
                                          DEFAULT_CONSTANTS.c, DEFAULT_CONSTANTS.mu_n)


@pytest.mark.parametrize("value", [-1, 0, float("nan"), float("inf"), "heavy"])
def test_invalid_override_names_the_field(value):
    with pytest.raises(ValueError, match="^m must be"):
        make_constants(m=value)


def test_negative_mass_message():
    with pytest.raises(ValueError, match="m must be positive"):
        make_constants({"m": -1})


def test_unknown_constant_rejected():
    with pytest.raises(ValueError, match="unknown"):
        make_constants(G=6.7e-11)


def test_scales_against_arbitrary_precision_oracle():
    mp.mp.dps = 40
    m, g, hbar = mp.mpf(NEUTRON_MASS), mp.mpf("9.81"), mp.mpf(HBAR)
    lam = mp.cbrt(hbar**2 / (2 * m**2 * g))
    eps0 = mp.cbrt(m * g**2 * hbar**2 / 2)
    s = derive_scales()
    assert s.lambda_ == pytest.approx(float(lam), rel=1e-14)
    assert s.eps0 == pytest.approx(float(eps0), rel=1e-14)
    assert s.t0 == pytest.approx(float(hbar / eps0), rel=1e-14)
    assert s.p0 == pytest.approx(float(hbar / lam), rel=1e-14)
    assert s.lambda_ == pytest.approx(5.87e-6, rel=1e-3)
    assert to_peV(s.eps0) == pytest.approx(0.602, rel=1e-3)


def test_eightfold_gravity_halves_length_scale():
    assert derive_scales(make_constants(g=8 * 9.81)).lambda_ == pytest.approx(derive_scales().lambda_ / 2,
                                                                              rel=1e-15)


@given(positive, positive, positive)
def test_scale_identities(m, g, hbar):
    c = make_constants(m=m, g=g, hbar=hbar)
    s = derive_scales(c)
    assert m * g * s.lambda_ == pytest.approx(s.eps0, rel=1e-13)
    assert s.t0 * s.eps0 == pytest.approx(hbar, rel=1e-14)
    # lambda ~ g^(-1/3)
    assert derive_scales(make_constants(m=m, g=8 * g, hbar=hbar)).lambda_ == pytest.approx(s.lambda_ / 2,
                                                                                          rel=1e-13)


def test_pev_round_trip():
    assert to_peV(from_peV(1.41)) == pytest.approx(1.41, rel=1e-15)
    assert PEV == pytest.approx(1.602176634e-31, rel=1e-15)
    assert math.isclose(to_peV(PEV), 1.0)
