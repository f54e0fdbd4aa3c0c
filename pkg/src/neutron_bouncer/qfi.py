"""Quantum Fisher information for estimating the mass-energy correction delta.

All QFI values are for the dimensionless parameter ``delta`` and are taken at
``delta = 0``; ``delta`` enters only through the parameterisation
``H = H0 + delta * sigma_z * (-p^2/2m + m g z)``. The term
``[delta H', [H0, delta H']]`` of the BCH expansion is proportional to the
identity and is dropped by construction.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .basis import ObservableSpec, eigenstate, expectation, matrix_element_z
from .spectrum import unperturbed_energy
from .units import DEFAULT_CONSTANTS, PhysicalConstants, derive_scales

MODELS = ("full-analytic", "short-time", "semiclassical", "free-fall", "numeric", "bound-spectral")
SHORT_TIME_LIMIT = 1e-3  # s


class ShortTimeWarning(UserWarning):
    pass


@dataclass(frozen=True)
class CoefficientSet:
    n: int
    alpha_n: float  # 1/s^2
    beta_n: float  # 1/s^2
    gamma_n: float  # 1/s^4


@dataclass(frozen=True)
class QfiCurve:
    times: np.ndarray
    values: np.ndarray
    model: str
    flagged: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown QFI model {self.model!r}")
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.shape != values.shape:
            raise ValueError("times and values must have the same shape")
        if np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly increasing")
        if np.any(values < 0):
            raise ValueError("QFI values must be non-negative")
        flagged = np.zeros(times.shape, bool) if self.flagged is None else np.asarray(self.flagged, bool)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "flagged", flagged)


@dataclass(frozen=True)
class GaussianPacket:
    sigma: float  # m
    z0: float = 0.0  # m
    p_mean: float = 0.0  # kg m/s

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("Gaussian width sigma must be positive")


def _state(n, constants):
    return eigenstate(n, derive_scales(constants))


def _perturbation(constants, power=1):
    return ObservableSpec.energy(constants, kinetic=-1.0, potential=1.0, power=power)


def short_time_coefficient(n: int, constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """K = 4 <(-p^2/2m + m g z)^2> / E_n^2, the coefficient written as 1.9."""
    E = unperturbed_energy(n, constants)
    return 4.0 * expectation(_state(n, constants), _perturbation(constants, 2)) / E**2


def coefficients(n: int, constants: PhysicalConstants = DEFAULT_CONSTANTS) -> CoefficientSet:
    m, g = constants.m, constants.g
    E = unperturbed_energy(n, constants)
    st = _state(n, constants)
    p2 = expectation(st, ObservableSpec.momentum(2))
    a1 = expectation(st, _perturbation(constants))
    return CoefficientSet(
        n=n,
        alpha_n=g**2 * p2 / E**2,
        beta_n=2 * m * g**2 / (3 * E**2) * a1,
        gamma_n=m**2 * g**4 / (9 * E**2),
    )


def _as_array(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("time must be non-negative")
    return t


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def qfi_bound_full(n, t, constants: PhysicalConstants = DEFAULT_CONSTANTS):
    """(t/hbar)^2 [K E^2 + 4 t^2 E^2 (alpha - beta + t^2 gamma)] under free-fall dynamics."""
    t = _as_array(t)
    E = unperturbed_energy(n, constants)
    K = short_time_coefficient(n, constants)
    c = coefficients(n, constants)
    val = (t / constants.hbar) ** 2 * (K * E**2 + 4 * t**2 * E**2 * (c.alpha_n - c.beta_n + t**2 * c.gamma_n))
    return _out(val)


def qfi_bound_short(n, t, constants: PhysicalConstants = DEFAULT_CONSTANTS,
                    t_valid: float = SHORT_TIME_LIMIT):
    """Short-time law K t^2 E_n^2 / hbar^2; warns past ``t_valid``."""
    t = _as_array(t)
    if np.any(t > t_valid):
        warnings.warn(f"short-time QFI evaluated beyond t = {t_valid:g} s", ShortTimeWarning, stacklevel=2)
    E = unperturbed_energy(n, constants)
    K = short_time_coefficient(n, constants)
    return _out(K * (t * E / constants.hbar) ** 2)


def qfi_semiclassical(n, t, constants: PhysicalConstants = DEFAULT_CONSTANTS):
    """Phase-only QFI 4 t^2 E_n^2 / (9 hbar^2)."""
    t = _as_array(t)
    E = unperturbed_energy(n, constants)
    return _out(4.0 * (t * E) ** 2 / (9.0 * constants.hbar**2))


def qfi_bound_spectral(n, t, constants: PhysicalConstants = DEFAULT_CONSTANTS, levels: int = 40):
    """QFI under the full bouncer dynamics (mirror included), first order in delta.

    ``F = (4 t^2/hbar^2) [<H'>^2 + sum_k |H'_kn|^2 sinc^2(w_kn t / 2)]`` with
    ``H'_kn = 2 m g <k|z|n>`` for ``k != n``. The tail beyond ``levels`` is
    closed with the sum rule ``sum_k |H'_kn|^2 = Var(H')``.
    """
    t = _as_array(t)
    hbar = constants.hbar
    scales = derive_scales(constants)
    st = _state(n, constants)
    a1 = expectation(st, _perturbation(constants))
    var = expectation(st, _perturbation(constants, 2)) - a1**2
    E_n = unperturbed_energy(n, constants)
    acc = np.zeros_like(t)
    captured = 0.0
    last = None
    for k in range(1, levels + 1):
        if k == n:
            continue
        hk = 2.0 * constants.m * constants.g * matrix_element_z(k, n, scales)
        w = (unperturbed_energy(k, constants) - E_n) / hbar
        acc = acc + hk**2 * np.sinc(w * t / (2 * np.pi)) ** 2
        captured += hk**2
        last = w
    tail = max(var - captured, 0.0)
    acc = acc + tail * np.sinc(last * t / (2 * np.pi)) ** 2
    return _out(4.0 * t**2 / hbar**2 * (a1**2 + acc))


def qfi_curve(n: int, times, model: str, constants: PhysicalConstants = DEFAULT_CONSTANTS) -> QfiCurve:
    times = _as_array(times)
    flagged = np.zeros(times.shape, bool)
    if model == "full-analytic":
        values = qfi_bound_full(n, times, constants)
    elif model == "short-time":
        flagged = times > SHORT_TIME_LIMIT
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ShortTimeWarning)
            values = qfi_bound_short(n, times, constants)
    elif model == "semiclassical":
        values = qfi_semiclassical(n, times, constants)
    elif model == "bound-spectral":
        values = qfi_bound_spectral(n, times, constants)
    else:
        raise ValueError(f"model {model!r} has no closed form here; use propagator.qfi_numeric")
    return QfiCurve(times=times, values=np.atleast_1d(values), model=model, flagged=flagged)


def improvement_ratio(n, t, model: str = "short-time", constants: PhysicalConstants = DEFAULT_CONSTANTS,
                      F=None):
    """(Delta delta' / Delta delta)_n = (3/2) sqrt(F hbar^2 / (t^2 E_n^2)).

    ``F`` may be supplied directly (e.g. a numeric curve); otherwise it is
    computed from ``model``.
    """
    t = _as_array(t)
    if F is None:
        if model not in MODELS or model in ("numeric", "free-fall"):
            raise ValueError(f"model {model!r} needs F supplied explicitly")
        F = qfi_curve(n, np.atleast_1d(t), model, constants).values.reshape(t.shape)
    E = unperturbed_energy(n, constants)
    return _out(1.5 * np.sqrt(np.asarray(F) * constants.hbar**2 / (t**2 * E**2)))


def cramer_rao(F, N=1):
    """Delta delta = 1 / sqrt(N F)."""
    F = np.asarray(F, dtype=float)
    if np.any(F <= 0):
        raise ValueError("Fisher information must be positive")
    if np.any(np.asarray(N) < 1):
        raise ValueError("need at least one particle")
    return _out(1.0 / np.sqrt(N * F))


def sensitivity_spin(n, t, N=1, constants: PhysicalConstants = DEFAULT_CONSTANTS):
    """Spin-only sensitivity (1/sqrt N) (2 t E_n / 3 hbar)^-1."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ValueError("interrogation time must be positive")
    if N < 1:
        raise ValueError("need at least one particle")
    E = unperturbed_energy(n, constants)
    return _out(1.0 / (math.sqrt(N) * 2 * t * E / (3 * constants.hbar)))


def freefall_validity_time(n: int, constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """sqrt(2 <z>_n / g): the free-fall description needs t well below this."""
    z = expectation(_state(n, constants), ObservableSpec.position())
    return math.sqrt(2 * z / constants.g)


# --- free fall ---------------------------------------------------------------

def freefall_phase(t, delta, constants: PhysicalConstants = DEFAULT_CONSTANTS):
    """phi_g = (2 delta / 3) m g^2 t^3 / hbar."""
    t = _as_array(t)
    return _out(2.0 * delta / 3.0 * constants.m * constants.g**2 * t**3 / constants.hbar)


def classical_action(t, mass, constants: PhysicalConstants = DEFAULT_CONSTANTS):
    """Action m g^2 t^3 / 3 of a particle falling from rest."""
    return mass * constants.g**2 * np.asarray(t, dtype=float) ** 3 / 3.0


def freefall_sensitivity(t, N=1, repeats=1, constants: PhysicalConstants = DEFAULT_CONSTANTS):
    """(1/sqrt(a N)) (3 hbar) / (2 m g^2 t^3) for ``a`` repeats of ``N`` neutrons."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0) or N <= 0 or repeats <= 0:
        raise ValueError("t, N and repeats must be positive")
    return _out(3 * constants.hbar / (2 * constants.m * constants.g**2 * t**3) / math.sqrt(repeats * N))


def qfi_freefall_limit(t, constants: PhysicalConstants = DEFAULT_CONSTANTS):
    """Long-time law (4/9) m^2 g^4 t^6 / hbar^2."""
    t = _as_array(t)
    return _out(4.0 / 9.0 * constants.m**2 * constants.g**4 * t**6 / constants.hbar**2)


def qfi_freefall_gaussian(packet: GaussianPacket, t, constants: PhysicalConstants = DEFAULT_CONSTANTS):
    """QFI (4 t^2/hbar^2) <X^2> with X = -p^2/2m + m g z + t g p - m g^2 t^2 / 3.

    For a packet at rest at the origin this is
    ``(2 m g t/hbar)^2 (sigma^2/2 + (2/3)(hbar t/sigma m)^2 + (3/16) hbar^4/(sigma^4 g^2 m^4) + g^2 t^4/9)``.
    """
    t = _as_array(t)
    m, g, hbar = constants.m, constants.g, constants.hbar
    s, z0, p0 = packet.sigma, packet.z0, packet.p_mean
    y2 = s**2 / 2  # <(z - z0)^2>
    q2 = hbar**2 / (2 * s**2)  # <(p - p0)^2>
    q4 = 3 * hbar**4 / (4 * s**4)
    x0 = -p0**2 / (2 * m) + m * g * z0 + t * g * p0 - m * g**2 * t**2 / 3
    lin = t * g - p0 / m
    x_sq = x0**2 + lin**2 * q2 + (m * g) ** 2 * y2 + q4 / (4 * m**2) - x0 * q2 / m
    return _out(4 * t**2 / hbar**2 * x_sq)


def _momentum_gaussian_terms(packet, t, mass, constants):
    """Exponent ``-a p^2 + b p + c`` of the momentum-space packet after time t.

    Free fall maps phi(p, 0) to
    ``phi(p + M g t, 0) exp(-i[p^2 t/2M + p g t^2/2 + M g^2 t^3/6]/hbar)``.
    """
    hbar, g = constants.hbar, constants.g
    s = packet.sigma
    shift = mass * g * t - packet.p_mean
    a = s**2 / (2 * hbar**2) + 1j * t / (2 * mass * hbar)
    b = -(s**2) * shift / hbar**2 - 1j * packet.z0 / hbar - 1j * g * t**2 / (2 * hbar)
    c = -(s**2) * shift**2 / (2 * hbar**2) - 1j * shift * packet.z0 / hbar - 1j * mass * g**2 * t**3 / (6 * hbar)
    return a, b, c


def freefall_wavefunction(packet: GaussianPacket, z, t, mass=None,
                          constants: PhysicalConstants = DEFAULT_CONSTANTS):
    """Closed-form free-fall evolution of the Gaussian packet, SI amplitude."""
    mass = constants.m if mass is None else mass
    hbar = constants.hbar
    z = np.asarray(z, dtype=float)
    a, b, c = _momentum_gaussian_terms(packet, t, mass, constants)
    b = b + 1j * z / hbar
    pref = (packet.sigma**2 / (math.pi * hbar**2)) ** 0.25 / np.sqrt(2 * math.pi * hbar)
    return pref * np.sqrt(math.pi / a) * np.exp(b**2 / (4 * a) + c)


def gaussian_wavefunction(packet: GaussianPacket, z, hbar: float = DEFAULT_CONSTANTS.hbar):
    """Initial packet ``exp(-(z - z0)^2 / 2 sigma^2 + i p z / hbar)``, unit norm."""
    z = np.asarray(z, dtype=float)
    s = packet.sigma
    return (s * math.sqrt(math.pi)) ** -0.5 * np.exp(-((z - packet.z0) ** 2) / (2 * s**2)
                                                    + 1j * packet.p_mean * z / hbar)


def freefall_propagator(z, z_prime, t, mass=None, constants: PhysicalConstants = DEFAULT_CONSTANTS):
    """Position-space kernel K(z, t; z', 0) for a particle of mass ``mass`` in free fall."""
    mass = constants.m if mass is None else mass
    hbar, g = constants.hbar, constants.g
    z = np.asarray(z, dtype=float)
    z_prime = np.asarray(z_prime, dtype=float)
    pref = np.sqrt(mass / (2j * math.pi * hbar * t))
    return pref * np.exp(1j * mass * t / (2 * hbar) * (((z - z_prime) / t) ** 2 - g * (z + z_prime)
                                                        - (g * t) ** 2 / 12.0))


def freefall_overlap(packet: GaussianPacket, t, delta, constants: PhysicalConstants = DEFAULT_CONSTANTS):
    """<psi_up(t)|psi_down(t)> for masses m(1+delta) and m(1-delta), in closed form.

    To first order the phase is ``-phi_g`` minus the dispersion term
    ``delta hbar t / (2 m sigma^2)`` (bra = spin up, which falls with the heavier mass).
    """
    if t < 0:
        raise ValueError("time must be non-negative")
    if t == 0 or delta == 0:
        return 1.0 + 0.0j
    m, hbar = constants.m, constants.hbar
    au, bu, cu = _momentum_gaussian_terms(packet, t, m * (1 + delta), constants)
    ad, bd, cd = _momentum_gaussian_terms(packet, t, m * (1 - delta), constants)
    A = np.conj(au) + ad
    B = np.conj(bu) + bd
    C = np.conj(cu) + cd
    pref = packet.sigma / (math.sqrt(math.pi) * hbar)
    return complex(pref * np.sqrt(math.pi / A) * np.exp(B**2 / (4 * A) + C))


def pure_state_qfi(psi, dpsi, weights=None) -> float:
    """4 (<dpsi|dpsi> - |<dpsi|psi>|^2) for sampled states (any trailing shape)."""
    w = 1.0 if weights is None else weights
    dd = np.sum(w * np.abs(dpsi) ** 2)
    dp = np.sum(w * np.conj(dpsi) * psi)
    return float(4.0 * (dd - abs(dp) ** 2))
