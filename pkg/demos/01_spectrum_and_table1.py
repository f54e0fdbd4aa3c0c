"""
Energy levels of a neutron above a mirror
=========================================

A neutron resting on a horizontal mirror sees a linear potential ``m g z``
above a hard wall. Its stationary states are shifted Airy functions, and the
energies are set by the zeros of ``Ai``. Adding a magnetic field makes the
spin energy contribute to the mass, so the two spin states fall slightly
differently.
"""

from neutron_bouncer import derive_scales, eigenstate, expectation, ObservableSpec
from neutron_bouncer.spectrum import Spin, delta_from_field, table1, total_energy, unperturbed_energy
from neutron_bouncer.units import to_peV

scales = derive_scales()
print(f"length scale  lambda = {scales.lambda_ * 1e6:.3f} um")
print(f"energy scale  eps0   = {to_peV(scales.eps0):.4f} peV")
print(f"time scale    t0     = {scales.t0 * 1e3:.4f} ms\n")

# The four lowest levels and the mean height of each state
print(" n   E_n [peV]   <z> [um]")
for n in range(1, 5):
    z_mean = expectation(eigenstate(n), ObservableSpec.position())
    print(f"{n:2d}   {to_peV(unperturbed_energy(n)):8.4f}   {z_mean * 1e6:8.3f}")

# %%
# A 45 T field gives delta ~ 3e-15: the spin-up level moves up by delta E_n / 3.
field = delta_from_field(45.0)
print(f"\ndelta(45 T) = {field.delta:.4e}")
for method in ("binomial", "exact-root", "perturbation"):
    rec = total_energy(1, Spin.UP, field, method)
    print(f"  n=1 shift via {method:12s}: {to_peV(rec.shift):.6e} peV")

# %%
# The shift table for laboratory and neutron-star fields
print("\n   B [T]      n=1          n=2          n=3          n=4   [peV]")
rows = table1()
for B in (45.0, 1200.0, 1e7):
    cells = [r["shift_peV"] for r in rows if r["B_tesla"] == B]
    print(f"{B:8.3g}  " + "  ".join(f"{c:.3e}" for c in cells))
