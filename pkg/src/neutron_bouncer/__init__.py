"""Gravitationally bound neutrons with a spin-dependent mass-energy correction.

Airy-function eigenstates above a mirror, the energy shifts caused by the
spin's contribution to the neutron mass, the spin-interferometry signal,
quantum Fisher information in the bound and free-fall settings, and a
Crank-Nicolson propagator to check the analytics.
"""

__version__ = "0.1.0"

from .units import DEFAULT_CONSTANTS, PhysicalConstants, UnitScales, derive_scales, make_constants
from .airy import airy_ai, airy_ai_prime, airy_zero
from .basis import BoundState, ObservableSpec, eigenstate, expectation, matrix_element_z
from .spectrum import FieldConfig, Spin, delta_from_field, splitting, table1, total_energy, unperturbed_energy
from .qfi import GaussianPacket, QfiCurve, qfi_bound_full, qfi_bound_short, qfi_semiclassical
from .propagator import GridSpec, GridState, discretize, evolve, qfi_numeric

__all__ = [
    "DEFAULT_CONSTANTS", "PhysicalConstants", "UnitScales", "derive_scales", "make_constants",
    "airy_ai", "airy_ai_prime", "airy_zero",
    "BoundState", "ObservableSpec", "eigenstate", "expectation", "matrix_element_z",
    "FieldConfig", "Spin", "delta_from_field", "splitting", "table1", "total_energy", "unperturbed_energy",
    "GaussianPacket", "QfiCurve", "qfi_bound_full", "qfi_bound_short", "qfi_semiclassical",
    "GridSpec", "GridState", "discretize", "evolve", "qfi_numeric",
]
