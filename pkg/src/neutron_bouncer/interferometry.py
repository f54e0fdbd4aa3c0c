"""Spin-interferometry protocol for a neutron prepared in level ``n``.

Stages modelled here: the resonant mechanical drive that moves the neutron
from the ground state to level ``n`` (resonance and Rabi frequencies, pi-pulse
time), precession in a homogeneous field, and readout of the spin along x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import ObservableSpec, eigenstate, expectation, matrix_element_p, matrix_element_z
from .spectrum import FieldConfig, splitting, unperturbed_energy
from .units import DEFAULT_CONSTANTS, PhysicalConstants, derive_scales


@dataclass(frozen=True)
class ProtocolParams:
    n: int
    a: float  # m/s^2
    field: FieldConfig
    t: float  # s

    def __post_init__(self):
        if self.a < 0:
            raise ValueError("vibration strength a must be non-negative")
        if self.t < 0:
            raise ValueError("interrogation time t must be non-negative")
        if self.n < 2:
            raise ValueError("the excitation stage needs a target level n >= 2")


@dataclass(frozen=True)
class InterferenceTrace:
    times: np.ndarray
    probability: np.ndarray
    visibility: np.ndarray
    phase: np.ndarray

    def __post_init__(self):
        lengths = {len(self.times), len(self.probability), len(self.visibility), len(self.phase)}
        if len(lengths) != 1:
            raise ValueError("trace columns must have equal length")


def resonance_frequency(n_from: int, n_to: int,
                        constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """(E_to - E_from) / hbar in rad/s."""
    if n_from == n_to:
        return 0.0
    dE = unperturbed_energy(n_to, constants) - unperturbed_energy(n_from, constants)
    return dE / constants.hbar


def rabi_frequency(n: int, a: float, constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Omega_R = m a |<psi_1|z|psi_n>| / hbar for mirror vibration strength ``a``."""
    if n < 2:
        raise ValueError("Rabi drive needs a target level n >= 2")
    if a < 0:
        raise ValueError("vibration strength a must be non-negative")
    z1n = matrix_element_z(1, n, derive_scales(constants))
    return constants.m * a * abs(z1n) / constants.hbar


def rabi_frequency_momentum_form(n: int, a: float,
                                 constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Same quantity via a |<psi_1|p|psi_n>| / (hbar w_1n)."""
    p1n = matrix_element_p(1, n, derive_scales(constants))
    return a * abs(p1n) / (constants.hbar * resonance_frequency(1, n, constants))


def pi_pulse_time(n: int, a: float, constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    omega = rabi_frequency(n, a, constants)
    if omega <= 0:
        raise ValueError("zero Rabi frequency: no pi pulse possible (is a = 0?)")
    return math.pi / omega


def phase(t, field: FieldConfig, n: int):
    """theta = (t/hbar)(hbar w0 + (2/3) delta E_n)."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("time must be non-negative")
    hbar = field.constants.hbar
    out = t * (field.omega0 + splitting(n, field) / hbar)
    return float(out) if out.ndim == 0 else out


def visibility_argument(t, field: FieldConfig, n: int):
    """w0 t E_n / (2 m c^2), the expansion parameter of the visibility loss."""
    c = field.constants
    return field.omega0 * np.asarray(t, dtype=float) * unperturbed_energy(n, c) / (2 * c.m * c.c**2)


def visibility(t, field: FieldConfig, n: int, max_argument: float = 0.1):
    """Second-order fringe contrast A(t) = 1 - (w0 t)^2 (E_n / 2 m c^2)^2."""
    x = visibility_argument(t, field, n)
    if np.any(np.abs(x) > max_argument):
        raise ValueError(
            f"w0 t E_n/(2mc^2) = {np.max(np.abs(x)):.3g} exceeds {max_argument}; the second-order "
            "visibility is not valid here, use numeric propagation instead")
    out = 1.0 - x**2
    return float(out) if np.ndim(out) == 0 else out


def perturbation_variance(n: int, constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Var(-p^2/2m + m g z) in |psi_n>, J^2."""
    state = eigenstate(n, derive_scales(constants))
    a1 = expectation(state, ObservableSpec.energy(constants, -1.0, 1.0, 1))
    a2 = expectation(state, ObservableSpec.energy(constants, -1.0, 1.0, 2))
    return a2 - a1**2


def visibility_from_variance(t, field: FieldConfig, n: int):
    """Contrast from the short-time expansion 1 - Delta_n^2 t^2 / (2 hbar^2).

    ``Delta_n^2 = 4 delta^2 Var(H')`` is evaluated by quadrature. For the
    bouncer ``Var(H') = (16/45) E_n^2``, so this deficit is 32/45 of the one
    returned by :func:`visibility`.
    """
    t = np.asarray(t, dtype=float)
    hbar = field.constants.hbar
    var = perturbation_variance(n, field.constants)
    out = 1.0 - 2.0 * field.delta**2 * var * t**2 / hbar**2
    return float(out) if out.ndim == 0 else out


def interference_probability(t, field: FieldConfig, n: int, include_visibility: bool = False):
    """p = (1 + A(t) cos theta) / 2 for the spin projection on +x."""
    theta = phase(t, field, n)
    contrast = visibility(t, field, n) if include_visibility else 1.0
    p = 0.5 * (1.0 + contrast * np.cos(theta))
    p = np.clip(p, 0.0, 1.0)
    return float(p) if np.ndim(p) == 0 else p


def interference_trace(times, field: FieldConfig, n: int,
                       include_visibility: bool = True) -> InterferenceTrace:
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) < 0):
        raise ValueError("times must be ordered")
    vis = visibility(times, field, n) if include_visibility else np.ones_like(times)
    return InterferenceTrace(
        times=times,
        probability=np.atleast_1d(interference_probability(times, field, n, include_visibility)),
        visibility=np.atleast_1d(vis),
        phase=np.atleast_1d(phase(times, field, n)),
    )
