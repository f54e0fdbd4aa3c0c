"""Airy function Ai, its derivative and its zeros, with no special-function
library underneath.

Evaluation strategy
-------------------
* ``x > 10``: exponentially small asymptotic expansion (optimally truncated,
  relative error below 1e-18 there).
* ``x < -12``: oscillatory asymptotic expansion (error ~exp(-2 zeta) < 1e-20).
* ``-12 <= x <= 10``: local Taylor series about the nearest anchor of a
  table spaced 0.25 apart. The Taylor coefficients follow from the Airy
  equation ``y'' = x y``. Anchor values are generated once at import by
  stepping the same Taylor series inward from the two asymptotic end points:
  downward from ``x = 10`` (Ai grows in that direction, so errors are damped)
  and upward from ``x = -12`` (oscillatory, neutrally stable).

The two anchor sweeps meet at ``x = 0``, where the result can be compared
against ``Ai(0) = 3**(-2/3) / Gamma(2/3)``.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

_X_HI = 10.0
_X_LO = -12.0
_STEP = 0.25
_SQRT_PI = math.sqrt(math.pi)


def _asymptotic_coefficients(kmax: int = 80):
    u = np.empty(kmax + 1)
    v = np.empty(kmax + 1)
    u[0] = v[0] = 1.0
    for k in range(1, kmax + 1):
        u[k] = u[k - 1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k)
        v[k] = -(6 * k + 1) / (6 * k - 1) * u[k]
    return u, v


_U, _V = _asymptotic_coefficients()


def _truncated_sum(coeffs, zeta_inv, alternate=True):
    """Sum ``sum_k (-1)^k c_k zeta^-k`` stopping where the terms stop shrinking."""
    total = np.zeros_like(zeta_inv)
    prev = np.full_like(zeta_inv, np.inf)
    active = np.ones(zeta_inv.shape, dtype=bool)
    power = np.ones_like(zeta_inv)
    for k, c in enumerate(coeffs):
        term = c * power * ((-1.0) ** k if alternate else 1.0)
        mag = np.abs(term)
        active &= mag < prev
        total += np.where(active, term, 0.0)
        prev = mag
        power = power * zeta_inv
        if not active.any():
            break
    return total


def _asymptotic_positive(x):
    zeta = (2.0 / 3.0) * x**1.5
    zi = 1.0 / zeta
    s_u = _truncated_sum(_U, zi)
    s_v = _truncated_sum(_V, zi)
    pre = np.exp(-zeta) / (2.0 * _SQRT_PI)
    q = x**0.25
    return pre / q * s_u, -pre * q * s_v


def _asymptotic_negative(x):
    y = -x
    zeta = (2.0 / 3.0) * y**1.5
    zi = 1.0 / zeta
    zi2 = zi * zi
    # even / odd index splits of the series, each alternating in the pair index
    u_even = _truncated_sum(_U[0::2], zi2)
    u_odd = zi * _truncated_sum(_U[1::2], zi2)
    v_even = _truncated_sum(_V[0::2], zi2)
    v_odd = zi * _truncated_sum(_V[1::2], zi2)
    arg = zeta - math.pi / 4.0
    c, s = np.cos(arg), np.sin(arg)
    q = y**0.25
    ai = (c * u_even + s * u_odd) / (_SQRT_PI * q)
    aip = q * (s * v_even - c * v_odd) / _SQRT_PI
    return ai, aip


def _taylor(x0, a0, a1, h, nterms):
    """Taylor-expand the Airy solution with ``y(x0)=a0, y'(x0)=a1`` to ``x0+h``."""
    c_km3 = np.zeros_like(a0)
    c_km2, c_km1 = a0, a1
    val = a0 + a1 * h
    der = a1.copy()
    h_km1 = h.copy()  # h**(k-1)
    for k in range(2, nterms):
        ck = (x0 * c_km2 + c_km3) / (k * (k - 1))
        der = der + k * ck * h_km1
        h_km1 = h_km1 * h
        val = val + ck * h_km1
        c_km3, c_km2, c_km1 = c_km2, c_km1, ck
    return val, der


def _build_anchors():
    grid = np.arange(_X_LO, _X_HI + 0.5 * _STEP, _STEP)
    ai = np.empty_like(grid)
    aip = np.empty_like(grid)
    i0 = int(round(-_X_LO / _STEP))  # index of x = 0

    top = len(grid) - 1
    a, b = _asymptotic_positive(np.array([_X_HI]))
    ai[top], aip[top] = a[0], b[0]
    for i in range(top, i0, -1):
        a, b = _taylor(grid[i], np.array([ai[i]]), np.array([aip[i]]), np.array([-_STEP]), 45)
        ai[i - 1], aip[i - 1] = a[0], b[0]
    pos_zero = (ai[i0], aip[i0])

    a, b = _asymptotic_negative(np.array([_X_LO]))
    ai[0], aip[0] = a[0], b[0]
    for i in range(0, i0 - 1):
        a, b = _taylor(grid[i], np.array([ai[i]]), np.array([aip[i]]), np.array([_STEP]), 45)
        ai[i + 1], aip[i + 1] = a[0], b[0]
    # one more step to reach x = 0 from below, kept only for the seam check
    a, b = _taylor(grid[i0 - 1], np.array([ai[i0 - 1]]), np.array([aip[i0 - 1]]),
                   np.array([_STEP]), 45)
    neg_zero = (a[0], b[0])
    return grid, ai, aip, pos_zero, neg_zero


_GRID, _ANCHOR_AI, _ANCHOR_AIP, SEAM_FROM_ABOVE, SEAM_FROM_BELOW = _build_anchors()


def airy_ai_and_prime(x):
    """Return ``(Ai(x), Ai'(x))`` for scalar or array ``x``."""
    xa = np.asarray(x, dtype=float)
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa)
    ai = np.empty_like(xa)
    aip = np.empty_like(xa)

    hi = xa > _X_HI
    lo = xa < _X_LO
    mid = ~(hi | lo)
    if hi.any():
        ai[hi], aip[hi] = _asymptotic_positive(xa[hi])
    if lo.any():
        ai[lo], aip[lo] = _asymptotic_negative(xa[lo])
    if mid.any():
        xm = xa[mid]
        idx = np.rint((xm - _X_LO) / _STEP).astype(int)
        x0 = _GRID[idx]
        ai[mid], aip[mid] = _taylor(x0, _ANCHOR_AI[idx], _ANCHOR_AIP[idx], xm - x0, 32)
    if scalar:
        return float(ai[0]), float(aip[0])
    return ai, aip


def airy_ai(x):
    return airy_ai_and_prime(x)[0]


def airy_ai_prime(x):
    return airy_ai_and_prime(x)[1]


def airy_zero_seed(n: int) -> float:
    """Asymptotic estimate of the n-th zero of Ai."""
    t = 3.0 * math.pi * (4 * n - 1) / 8.0
    return -(t ** (2.0 / 3.0)) * (1.0 + 5.0 / 48.0 * t**-2 - 5.0 / 36.0 * t**-4)


@lru_cache(maxsize=None)
def airy_zero(n: int) -> float:
    """n-th (negative) zero of Ai, ``n >= 1``.

    Newton iteration from the asymptotic seed; if an iterate leaves the
    bracket around the seed the search falls back to bisection.
    """
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValueError(f"Airy zero index must be a positive integer, got {n!r}")
    n = int(n)
    seed = airy_zero_seed(n)
    # zeros are at least ~1.7 apart at n=1 and spacing shrinks like n**(-1/3)
    half_gap = 0.4 * (math.pi / math.sqrt(-seed))
    lo, hi = seed - half_gap, seed + half_gap
    f_lo = airy_ai(lo)
    f_hi = airy_ai(hi)
    if f_lo * f_hi > 0:
        raise RuntimeError(f"failed to bracket Airy zero {n}")

    x = seed
    for _ in range(50):
        f, fp = airy_ai_and_prime(x)
        step = f / fp
        x_new = x - step
        if not (lo < x_new < hi):
            break
        x = x_new
        if abs(step) < 1e-15 * max(1.0, abs(x)):
            return x
    else:
        return x

    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = airy_ai(mid)
        if f_mid == 0 or hi - lo < 1e-15:
            return mid
        if f_lo * f_mid < 0:
            hi, f_hi = mid, f_mid
        else:
            lo, f_lo = mid, f_mid
    return 0.5 * (lo + hi)
