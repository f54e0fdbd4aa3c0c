"""Bouncer spectrum with the spin-dependent mass-energy correction.

A spin in a homogeneous field ``B`` carries internal energy ``+-hbar w0/2``,
which adds ``+-hbar w0 / 2c^2`` to the inertial and gravitational mass. The
fractional mass change is ``delta = hbar w0 / (2 m c^2) = mu_n B / (m c^2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .airy import airy_zero
from .basis import ObservableSpec, eigenstate, expectation
from .units import DEFAULT_CONSTANTS, PEV, PhysicalConstants, derive_scales

# Above this the binomial (first-order) description is no longer what the
# caller is modelling; numerical studies pass allow_large=True.
DELTA_LIMIT = 1e-3


class Spin(Enum):
    UP = "up"
    DOWN = "down"

    @property
    def sign(self) -> int:
        return 1 if self is Spin.UP else -1

    @classmethod
    def parse(cls, value) -> "Spin":
        if isinstance(value, Spin):
            return value
        if value in (1, "+", "up", "UP"):
            return cls.UP
        if value in (-1, "-", "down", "DOWN"):
            return cls.DOWN
        raise ValueError(f"spin must be 'up' or 'down', got {value!r}")


# kept under the name used throughout the docs
SpinLabel = Spin


@dataclass(frozen=True)
class FieldConfig:
    B: float  # T
    omega0: float  # rad/s
    delta: float
    constants: PhysicalConstants = DEFAULT_CONSTANTS

    def __post_init__(self):
        if not math.isfinite(self.delta) or self.delta < 0:
            raise ValueError(f"delta must be finite and non-negative, got {self.delta!r}")


@dataclass(frozen=True)
class EnergyRecord:
    n: int
    E_n: float  # J
    E_ns: float  # J
    E_total: float  # J
    method: str
    spin: Spin = Spin.UP
    shift: float = 0.0  # E_ns - E_n, J, computed without cancellation


def _check_level(n):
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValueError(f"level must be a positive integer, got {n!r}")
    return int(n)


def _check_delta(delta, allow_large):
    if not math.isfinite(delta) or delta < 0:
        raise ValueError(f"delta must be finite and non-negative, got {delta!r}")
    if delta >= DELTA_LIMIT and not allow_large:
        raise ValueError(f"delta={delta:g} is not << 1; pass allow_large=True for inflated-delta studies")


def delta_from_field(B: float, constants: PhysicalConstants = DEFAULT_CONSTANTS,
                     allow_large: bool = False) -> FieldConfig:
    if not math.isfinite(B) or B < 0:
        raise ValueError(f"B must be a non-negative field in tesla, got {B!r}")
    omega0 = 2.0 * constants.mu_n * B / constants.hbar
    delta = constants.mu_n * B / (constants.m * constants.c**2)
    _check_delta(delta, allow_large)
    return FieldConfig(B=float(B), omega0=omega0, delta=delta, constants=constants)


def field_from_delta(delta: float, constants: PhysicalConstants = DEFAULT_CONSTANTS,
                     allow_large: bool = False) -> FieldConfig:
    """Inverse of :func:`delta_from_field`, used for inflated-delta test runs."""
    _check_delta(delta, allow_large)
    B = delta * constants.m * constants.c**2 / constants.mu_n
    omega0 = 2.0 * delta * constants.m * constants.c**2 / constants.hbar
    return FieldConfig(B=B, omega0=omega0, delta=float(delta), constants=constants)


def unperturbed_energy(n: int, constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """E_n = -gamma_n * eps0, in J."""
    n = _check_level(n)
    return -airy_zero(n) * derive_scales(constants).eps0


def energy_shift_binomial(n, spin, delta, constants=DEFAULT_CONSTANTS) -> float:
    return Spin.parse(spin).sign * delta / 3.0 * unperturbed_energy(n, constants)


def corrected_energy_binomial(n, spin, delta, constants=DEFAULT_CONSTANTS,
                              allow_large=False) -> float:
    """E_n (1 +- delta/3)."""
    _check_delta(delta, allow_large)
    return unperturbed_energy(n, constants) + energy_shift_binomial(n, spin, delta, constants)


def energy_shift_exact(n, spin, delta, constants=DEFAULT_CONSTANTS) -> float:
    """E_{n,s} - E_n from the exact root with mass m(1 +- delta)."""
    s = Spin.parse(spin).sign * delta
    if s <= -1:
        raise ValueError("delta <= -1 would make the spin-down mass non-positive")
    # (1+s)^(1/3) - 1 without cancellation
    return unperturbed_energy(n, constants) * math.expm1(math.log1p(s) / 3.0)


def corrected_energy_exact(n, spin, delta, constants=DEFAULT_CONSTANTS) -> float:
    """Root of Ai(-(2/(m(1+-delta) g^2 hbar^2))^(1/3) E) = 0; valid for inflated delta."""
    return unperturbed_energy(n, constants) + energy_shift_exact(n, spin, delta, constants)


def perturbation_first_order(n, spin=Spin.UP, constants=DEFAULT_CONSTANTS) -> float:
    """First-order coefficient <psi_n| sigma_z (-p^2/2m + m g z) |psi_n>, in J.

    Evaluated by quadrature; the virial theorem predicts +-E_n/3.
    """
    state = eigenstate(_check_level(n), derive_scales(constants))
    value = expectation(state, ObservableSpec.energy(constants, kinetic=-1.0, potential=1.0))
    return Spin.parse(spin).sign * value


def total_energy(n, spin, field: FieldConfig, method: str = "binomial") -> EnergyRecord:
    """Gravitational plus spin energy, E_n(1 +- delta/3) +- hbar w0 / 2."""
    constants = field.constants
    spin = Spin.parse(spin)
    E_n = unperturbed_energy(n, constants)
    if method == "binomial":
        shift = energy_shift_binomial(n, spin, field.delta, constants)
    elif method == "exact-root":
        shift = energy_shift_exact(n, spin, field.delta, constants)
    elif method == "perturbation":
        shift = field.delta * perturbation_first_order(n, spin, constants)
    else:
        raise ValueError(f"unknown method {method!r}")
    E_ns = E_n + shift
    E_total = E_ns + spin.sign * constants.hbar * field.omega0 / 2.0
    return EnergyRecord(n=int(n), E_n=E_n, E_ns=E_ns, E_total=E_total,
                        method=method, spin=spin, shift=shift)


def splitting(n, field: FieldConfig) -> float:
    """Relativistic part of the up/down energy difference, (2/3) delta E_n, in J."""
    return 2.0 / 3.0 * field.delta * unperturbed_energy(n, field.constants)


def table1(fields_tesla=(45.0, 1200.0, 1e7), levels=(1, 2, 3, 4),
           constants: PhysicalConstants = DEFAULT_CONSTANTS):
    """``E_{n,up} - E_n`` in peV for every field and level.

    Returns a list of dicts with keys ``B_tesla``, ``n``, ``delta``,
    ``shift_peV``.
    """
    rows = []
    for B in fields_tesla:
        # neutron-star fields give delta ~ 6e-10, still far below the limit
        field = delta_from_field(B, constants)
        for n in levels:
            rows.append({
                "B_tesla": float(B),
                "n": int(n),
                "delta": field.delta,
                "shift_peV": energy_shift_binomial(n, Spin.UP, field.delta, constants) / PEV,
            })
    return rows
