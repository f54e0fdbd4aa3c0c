"""Physical constants and the characteristic scales of the quantum bouncer.

Every physics module works in dimensionless bouncer units internally:
lengths in ``lambda``, energies in ``eps0``, times in ``t0`` and momenta in
``p0``. Conversion to SI happens at the public API boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

# CODATA 2018
NEUTRON_MASS = 1.67492749804e-27  # kg
HBAR = 1.054571817e-34  # J s
SPEED_OF_LIGHT = 299792458.0  # m / s
NEUTRON_MAGNETIC_MOMENT = 9.6623651e-27  # J / T, magnitude
STANDARD_G = 9.81  # m / s^2
ELECTRON_VOLT = 1.602176634e-19  # J
PEV = 1e-12 * ELECTRON_VOLT  # J


@dataclass(frozen=True)
class PhysicalConstants:
    m: float = NEUTRON_MASS
    g: float = STANDARD_G
    hbar: float = HBAR
    c: float = SPEED_OF_LIGHT
    mu_n: float = NEUTRON_MAGNETIC_MOMENT

    def __post_init__(self):
        for f in fields(self):
            _check_positive(f.name, getattr(self, f.name))


@dataclass(frozen=True)
class UnitScales:
    lambda_: float  # m
    eps0: float  # J
    t0: float  # s
    p0: float  # kg m / s

    @property
    def length(self) -> float:
        return self.lambda_


def _check_positive(name: str, value) -> None:
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise ValueError(f"{name} must be a positive number, got {value!r}") from None
    if not math.isfinite(v):
        raise ValueError(f"{name} must be finite, got {value!r}")
    if v <= 0:
        raise ValueError(f"{name} must be positive, got {value!r}")


def make_constants(overrides: dict | None = None, **kwargs) -> PhysicalConstants:
    """Default constants with optional per-field overrides.

    >>> make_constants(g=9.80665).g
    9.80665
    """
    merged = dict(overrides or {})
    merged.update(kwargs)
    known = {f.name for f in fields(PhysicalConstants)}
    unknown = set(merged) - known
    if unknown:
        raise ValueError(f"unknown constant(s): {', '.join(sorted(unknown))}")
    for name, value in merged.items():
        _check_positive(name, value)
    return replace(PhysicalConstants(), **{k: float(v) for k, v in merged.items()})


DEFAULT_CONSTANTS = PhysicalConstants()


def derive_scales(constants: PhysicalConstants = DEFAULT_CONSTANTS) -> UnitScales:
    m, g, hbar = constants.m, constants.g, constants.hbar
    lam = (hbar**2 / (2.0 * m**2 * g)) ** (1.0 / 3.0)
    eps0 = (m * g**2 * hbar**2 / 2.0) ** (1.0 / 3.0)
    return UnitScales(lambda_=lam, eps0=eps0, t0=hbar / eps0, p0=hbar / lam)


def to_peV(energy_joule):
    return energy_joule / PEV


def from_peV(energy_pev):
    return energy_pev * PEV
