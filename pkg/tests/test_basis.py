import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from neutron_bouncer.airy import airy_zero
from neutron_bouncer.basis import (
    ObservableSpec, eigenstate, evaluate_state, expectation, integrate, matrix_element_p,
    matrix_element_z, overlap,
)
from neutron_bouncer.spectrum import unperturbed_energy
from neutron_bouncer.units import DEFAULT_CONSTANTS as C, derive_scales, make_constants

S = derive_scales()


def _mp_element(m, n, power):
    """<m| u^power |n> in units of lambda, by mpmath quadrature with mpmath's own zeros."""
    mp.mp.dps = 25
    gm, gn = mp.airyaizero(m), mp.airyaizero(n)
    am = 1 / abs(mp.airyai(gm, derivative=1))
    an = 1 / abs(mp.airyai(gn, derivative=1))
    f = lambda u: am * an * mp.airyai(u + gm) * u**power * mp.airyai(u + gn)
    return float(mp.quad(f, [0, 5, 10, 20, 40]))


@pytest.mark.parametrize("n", [1, 2, 5])
def test_state_vanishes_at_mirror_and_below(n):
    st_ = eigenstate(n)
    assert abs(evaluate_state(st_, 0.0)) < 1e-10 * st_.norm
    assert np.all(evaluate_state(st_, np.array([-1e-6, -1e-5])) == 0)


def test_orthonormality_first_eight():
    states = [eigenstate(n) for n in range(1, 9)]
    gram = np.array([[overlap(a, b) for b in states] for a in states])
    assert np.max(np.abs(gram - np.eye(8))) < 1e-8


@pytest.mark.parametrize("n", [1, 2, 3])
def test_position_moments_against_mpmath(n):
    st_ = eigenstate(n)
    assert expectation(st_, ObservableSpec.position()) == pytest.approx(_mp_element(n, n, 1) * S.lambda_,
                                                                         rel=1e-12)
    assert expectation(st_, ObservableSpec.position(2)) == pytest.approx(_mp_element(n, n, 2) * S.lambda_**2,
                                                                          rel=1e-12)


@pytest.mark.parametrize("n", [1, 4, 7])
def test_position_moments_closed_form(n):
    # hypervirial results for Airy states: <u> = 2|g|/3, <u^2> = 8 g^2 / 15
    g = airy_zero(n)
    st_ = eigenstate(n)
    assert expectation(st_, ObservableSpec.position()) == pytest.approx(-2 * g / 3 * S.lambda_, rel=1e-12)
    assert expectation(st_, ObservableSpec.position(2)) == pytest.approx(8 * g**2 / 15 * S.lambda_**2,
                                                                          rel=1e-12)


def test_ground_state_mean_height():
    assert expectation(eigenstate(1), ObservableSpec.position()) == pytest.approx(9.15e-6, rel=1e-3)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_virial_theorem(n):
    st_ = eigenstate(n)
    kinetic = expectation(st_, ObservableSpec.energy(C, 1.0, 0.0))
    potential = expectation(st_, ObservableSpec.energy(C, 0.0, 1.0))
    assert kinetic == pytest.approx(st_.energy / 3, rel=1e-8)
    assert 2 * kinetic == pytest.approx(potential, rel=1e-8)
    assert expectation(st_, ObservableSpec.energy(C)) == pytest.approx(unperturbed_energy(n), rel=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 6])
def test_odd_momentum_moments_vanish(n):
    st_ = eigenstate(n)
    for k in (1, 3, 5):
        assert abs(expectation(st_, ObservableSpec.momentum(k))) <= 1e-12 * S.p0**k
    assert abs(expectation(st_, ObservableSpec.mixed(1, 1))) <= 1e-12 * C.hbar


def test_momentum_square_from_virial():
    st_ = eigenstate(2)
    assert expectation(st_, ObservableSpec.momentum(2)) == pytest.approx(2 * C.m * st_.energy / 3, rel=1e-10)


@pytest.mark.parametrize("m,n", [(1, 2), (1, 5), (2, 7), (3, 4)])
def test_position_matrix_element(m, n):
    gm, gn = airy_zero(m), airy_zero(n)
    closed = (-1) ** (m - n + 1) * 2 * S.lambda_ / (gm - gn) ** 2
    assert matrix_element_z(m, n) == pytest.approx(closed, rel=1e-10)
    assert abs(matrix_element_z(m, n)) == pytest.approx(abs(_mp_element(m, n, 1)) * S.lambda_, rel=1e-10)
    assert matrix_element_z(m, n) == pytest.approx(matrix_element_z(n, m), rel=1e-12)


@pytest.mark.parametrize("m,n", [(1, 2), (1, 5), (4, 2)])
def test_momentum_element_from_commutator(m, n):
    # [H, z] = -i hbar p / m  =>  p_mn = i m (E_m - E_n) z_mn / hbar
    expected = 1j * C.m * (unperturbed_energy(m) - unperturbed_energy(n)) * matrix_element_z(m, n) / C.hbar
    got = matrix_element_p(m, n)
    assert abs(got - expected) <= 1e-10 * abs(expected)


def test_non_hermitian_observable_rejected():
    zp = ObservableSpec("mixed", (("zp", 1.0 + 0j),))
    assert not zp.is_hermitian()
    with pytest.raises(ValueError, match="Hermitian"):
        expectation(eigenstate(1), zp)


def test_mismatched_scales_rejected():
    other = eigenstate(1, derive_scales(make_constants(g=9.7)))
    with pytest.raises(ValueError, match="scales"):
        expectation(eigenstate(1), ObservableSpec.identity(), other)


def test_unknown_kind_and_letters_rejected():
    with pytest.raises(ValueError):
        ObservableSpec("tensor", ())
    with pytest.raises(ValueError):
        ObservableSpec("z^k", (("zx", 1.0),))


def test_operator_algebra():
    z, p = ObservableSpec.position(), ObservableSpec.momentum()
    comm = z @ p - p @ z
    assert comm.as_dict() == {"zp": 1, "pz": -1}
    assert (2 * z + 1).as_dict() == {"z": 2, "": 1}
    assert ObservableSpec.energy(C, power=2).is_hermitian()


@settings(max_examples=25, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.integers(1, 4))
def test_square_of_hermitian_is_non_negative(a, b, n):
    # in bouncer units so both terms are O(1)
    obs = a / S.lambda_ * ObservableSpec.position() + b / S.p0**2 * ObservableSpec.momentum(2)
    val = expectation(eigenstate(n), obs @ obs)
    assert val >= -1e-12


def test_integrate_is_exact_for_polynomials():
    assert integrate(lambda u: u**3, 10.0) == pytest.approx(2500.0, rel=1e-14)
