"""Invariant suite run by ``neutron-bouncer check``.

Each check reports a measured error against a tolerance. ``margin`` is
``tolerance - value``; a negative margin is a failure.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import interferometry, propagator, qfi
from .airy import airy_ai, airy_ai_prime, airy_zero
from .basis import ObservableSpec, eigenstate, expectation, overlap
from .spectrum import Spin, field_from_delta, corrected_energy_binomial, corrected_energy_exact, unperturbed_energy
from .units import DEFAULT_CONSTANTS, PEV, PhysicalConstants, derive_scales

# Ai(0) and Ai'(0) from their Maclaurin constants
AI0 = 1.0 / (3 ** (2 / 3) * math.gamma(2 / 3))
AIP0 = -1.0 / (3 ** (1 / 3) * math.gamma(1 / 3))
PAPER_LEVELS_PEV = (1.41, 2.46, 3.32, 4.08)


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    tolerance: float
    passed: bool
    margin: float

    def as_dict(self):
        return asdict(self)


def _result(name, value, tolerance):
    value = float(value)
    return CheckResult(name, value, tolerance, bool(value <= tolerance), tolerance - value)


def _units(c):
    s = derive_scales(c)
    return max(abs(c.m * c.g * s.lambda_ / s.eps0 - 1), abs(s.t0 * s.eps0 / c.hbar - 1))


def _airy_origin():
    return max(abs(airy_ai(0.0) - AI0), abs(airy_ai_prime(0.0) - AIP0))


def _airy_zeros():
    return max(abs(airy_ai(airy_zero(n))) for n in range(1, 11))


def _orthonormality(c, nmax=8):
    scales = derive_scales(c)
    states = [eigenstate(n, scales) for n in range(1, nmax + 1)]
    return max(abs(overlap(a, b) - (a.n == b.n)) for a in states for b in states)


def _virial(c, nmax=4):
    scales = derive_scales(c)
    out = 0.0
    for n in range(1, nmax + 1):
        st = eigenstate(n, scales)
        kinetic = expectation(st, ObservableSpec.energy(c, 1.0, 0.0, 1))
        out = max(out, abs(3 * kinetic / st.energy - 1))
    return out


def _odd_moments(c, nmax=4):
    scales = derive_scales(c)
    out = 0.0
    for n in range(1, nmax + 1):
        st = eigenstate(n, scales)
        p_scale = scales.p0
        for k in (1, 3):
            out = max(out, abs(expectation(st, ObservableSpec.momentum(k))) / p_scale**k)
        out = max(out, abs(expectation(st, ObservableSpec.mixed(1, 1))) / c.hbar)
    return out


def _levels(c):
    return max(abs(unperturbed_energy(n, c) / PEV - ref) for n, ref in enumerate(PAPER_LEVELS_PEV, 1))


def _binomial_bound(c):
    worst = 0.0
    for delta in (1e-6, 1e-4, 1e-2):
        for n in (1, 2, 3, 4):
            E = unperturbed_energy(n, c)
            err = abs(corrected_energy_binomial(n, Spin.UP, delta, c, allow_large=True)
                      - corrected_energy_exact(n, Spin.UP, delta, c))
            worst = max(worst, err / (delta**2 * E / 8))
    return worst  # must stay at or below 1


def _visibility_scaling(c):
    t = 5e-3
    a = 1 - interferometry.visibility(t, field_from_delta(2e-3, c, allow_large=True), 1)
    b = 1 - interferometry.visibility(t, field_from_delta(4e-3, c, allow_large=True), 1)
    return abs(b / a - 4)


def _qfi_short_limit(c):
    t = 1e-5
    with np.errstate(all="ignore"):
        return abs(qfi.qfi_bound_full(1, t, c) / qfi.qfi_bound_short(1, t, c) - 1)


def _k_closed_form(c):
    return abs(qfi.short_time_coefficient(1, c) / (28 / 15) - 1)


def _freefall_limit(c):
    packet = qfi.GaussianPacket(sigma=2 * derive_scales(c).lambda_)
    t = 0.2
    return abs(qfi.qfi_freefall_gaussian(packet, t, c) / qfi.qfi_freefall_limit(t, c) - 1)


def _grid_unitarity(c):
    spec = propagator.GridSpec()
    psi = propagator.discretize(eigenstate(1, derive_scales(c)), spec, constants=c)
    out = propagator.evolve(psi, 1e4 * spec.dt, 1e-3)
    return abs(out.norm() - 1)


def _grid_stationary(c):
    spec = propagator.GridSpec()
    psi = propagator.discretize(eigenstate(1, derive_scales(c)), spec, constants=c)
    return 1 - abs(propagator.overlap(psi, propagator.evolve(psi, 1e-3)))


def _grid_energy(c):
    psi = propagator.discretize(eigenstate(1, derive_scales(c)), propagator.GridSpec(), constants=c)
    return abs(propagator.grid_energy(psi) / unperturbed_energy(1, c) - 1)


CHECKS = (
    ("units.identities", _units, 1e-14),
    ("airy.origin_values", lambda c: _airy_origin(), 1e-14),
    ("airy.zero_residuals", lambda c: _airy_zeros(), 1e-13),
    ("basis.orthonormality", _orthonormality, 1e-8),
    ("basis.virial", _virial, 1e-8),
    ("basis.odd_momentum_moments", _odd_moments, 1e-10),
    ("spectrum.paper_levels_peV", _levels, 0.01),
    ("spectrum.binomial_error_over_bound", _binomial_bound, 1.0),
    ("interferometry.visibility_delta_squared", _visibility_scaling, 1e-9),
    ("qfi.short_time_limit", _qfi_short_limit, 1e-4),
    ("qfi.K_equals_28_15", _k_closed_form, 1e-10),
    ("qfi.freefall_t6_limit", _freefall_limit, 1e-2),
    ("propagator.norm_drift_1e4_steps", _grid_unitarity, 1e-8),
    ("propagator.stationary_1ms", _grid_stationary, 1e-6),
    ("propagator.grid_energy", _grid_energy, 1e-6),
)


def run_checks(constants: PhysicalConstants = DEFAULT_CONSTANTS, tolerance_scale: float = 1.0):
    """Run every invariant; ``tolerance_scale`` < 1 tightens all tolerances."""
    if not tolerance_scale > 0:
        raise ValueError("tolerance_scale must be positive")
    return [_result(name, fn(constants), tol * tolerance_scale) for name, fn, tol in CHECKS]
