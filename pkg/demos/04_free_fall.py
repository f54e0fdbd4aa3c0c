"""
Dropping the mirror: free fall and the t^6 law
==============================================

Once the mirror is removed, the two spin components fall with masses
``m (1 +- delta)``. They pick up the phase
``phi_g = (2 delta / 3) m g^2 t^3 / hbar``, and the Fisher information
grows like ``t^6``. For a Gaussian packet everything is available in closed
form. A Crank-Nicolson run on a fine grid reproduces the overlap.
"""

import time

import numpy as np

from neutron_bouncer import qfi
from neutron_bouncer.propagator import freefall_grid, freefall_overlap_numeric
from neutron_bouncer.units import derive_scales

lam = derive_scales().lambda_
packet = qfi.GaussianPacket(sigma=2 * lam)

print(" t [ms]   F_Q / (4/9 m^2 g^4 t^6 / hbar^2)")
for t in (1e-3, 3e-3, 1e-2, 3e-2, 1e-1):
    ratio = qfi.qfi_freefall_gaussian(packet, t) / qfi.qfi_freefall_limit(t)
    print(f"{t * 1e3:7.1f}   {ratio:.5f}")

# %%
# Overlap of the two spin branches at an inflated delta. Its phase is
# -phi_g plus a small dispersion term -delta hbar t / (2 m sigma^2).
t, delta = 10e-3, 1e-3
closed = qfi.freefall_overlap(packet, t, delta)
print(f"\nphi_g                 = {qfi.freefall_phase(t, delta):.6f} rad")
print(f"arg overlap (closed)  = {np.angle(closed):+.6f} rad, |overlap| = {abs(closed):.6f}")

start = time.perf_counter()
spec, z0 = freefall_grid(packet.sigma, t)
grid = freefall_overlap_numeric(packet.sigma, t, delta, spec, z0)
print(f"arg overlap (grid)    = {np.angle(grid):+.6f} rad on {spec.points} points "
      f"({time.perf_counter() - start:.1f} s)")
print(f"difference            = {abs(np.angle(grid / closed)):.2e} rad")
