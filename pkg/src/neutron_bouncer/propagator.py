"""Crank-Nicolson propagation on a uniform grid above a hard-wall mirror.

Internally everything runs in bouncer units (``u = z / lambda``,
``tau = t / t0``), where a particle of mass ``mu * m`` has
``H = -(1/mu) d^2/du^2 + mu (u - u_ref)``. ``z_ref`` sets the zero of the
gravitational potential energy; it is a physical choice (it shifts the two
spin branches by different constant energies), so states evolved with
different ``z_ref`` cannot be compared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
from scipy.linalg import lapack, solve_banded
from scipy.special import erfc

from .basis import BoundState, eigenstate, evaluate_state, integrate
from .qfi import GaussianPacket, QfiCurve, gaussian_wavefunction, pure_state_qfi
from .spectrum import Spin
from .units import DEFAULT_CONSTANTS, PhysicalConstants, derive_scales

TAIL_TOLERANCE = 1e-12
PHASE_STEP_LIMIT = 0.1  # max of dt * |V| / hbar
QFI_TIME_LIMIT = 3e-3  # s
CONVERGENCE_TOLERANCE = 0.05
STENCILS = ("second", "fourth")


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class GridSpec:
    z_max: float = 120e-6  # m
    points: int = 4096
    dt: float = 1e-7  # s
    stencil: str = "second"  # or "fourth": compact Numerov Laplacian, still tridiagonal

    def __post_init__(self):
        if self.stencil not in STENCILS:
            raise ValueError(f"stencil must be one of {STENCILS}")
        if not (self.z_max > 0 and math.isfinite(self.z_max)):
            raise ValueError("z_max must be positive")
        if int(self.points) != self.points or self.points < 512:
            raise ValueError("points must be an integer >= 512")
        if not self.dt > 0:
            raise ValueError("dt must be positive")

    @property
    def dz(self) -> float:
        return self.z_max / (self.points - 1)

    @property
    def z(self) -> np.ndarray:
        return np.linspace(0.0, self.z_max, self.points)


@dataclass(frozen=True)
class GridState:
    psi: np.ndarray  # complex samples including the two Dirichlet end points
    spec: GridSpec
    t: float = 0.0
    mass_factor: float = 1.0
    z_ref: float = 0.0
    constants: PhysicalConstants = field(default=DEFAULT_CONSTANTS)

    def norm(self) -> float:
        return math.sqrt(overlap(self, self).real)


def _tail_mass(state, z_max, constants):
    if isinstance(state, BoundState):
        u_max = z_max / state.scales.lambda_
        if u_max >= state.support:
            return 0.0, state.support * state.scales.lambda_
        # mass above z_max, integrated over [u_max, support]
        a = state.norm_dimless
        from .airy import airy_ai

        mass = integrate(lambda u: (a * airy_ai(u + u_max + state.gamma_n)) ** 2, state.support - u_max)
        return mass, state.support * state.scales.lambda_
    s = state.sigma
    above = 0.5 * erfc((z_max - state.z0) / s)
    below = 0.5 * erfc(state.z0 / s)
    return max(above, below), max(state.z0 + 6 * s, 2 * state.z0)


def discretize(state, spec: GridSpec = GridSpec(), z_ref: float = 0.0,
               constants: PhysicalConstants = DEFAULT_CONSTANTS) -> GridState:
    """Sample a bound state or Gaussian packet on the grid and normalise it."""
    tail, suggestion = _tail_mass(state, spec.z_max, constants)
    if tail > TAIL_TOLERANCE:
        raise ValueError(f"domain too small: {tail:.2e} of the probability lies outside [0, z_max]; "
                         f"try z_max >= {suggestion:.3e} m")
    z = spec.z
    if isinstance(state, BoundState):
        if abs(state.scales.lambda_ - derive_scales(constants).lambda_) > 1e-12 * state.scales.lambda_:
            raise ValueError("bound state was built with different constants")
        psi = evaluate_state(state, z).astype(complex)
    else:
        psi = gaussian_wavefunction(state, z, constants.hbar)
    psi[0] = psi[-1] = 0.0
    psi /= math.sqrt(np.sum(np.abs(psi) ** 2) * spec.dz)
    return GridState(psi=psi, spec=spec, z_ref=z_ref, constants=constants)


def _dimensionless_grid(spec, z_ref, constants):
    scales = derive_scales(constants)
    du = spec.dz / scales.lambda_
    u = spec.z[1:-1] / scales.lambda_ - z_ref / scales.lambda_
    return scales, du, u


def check_step(spec: GridSpec, z_ref: float, mass_factor: float,
               constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Largest potential phase per step; raise if above the accuracy guard."""
    v_max = mass_factor * constants.m * constants.g * max(abs(z_ref), abs(spec.z_max - z_ref))
    ratio = spec.dt * v_max / constants.hbar
    if ratio > PHASE_STEP_LIMIT:
        dt_ok = PHASE_STEP_LIMIT * constants.hbar / v_max
        raise ValueError(f"time step too coarse: dt*max|V|/hbar = {ratio:.3g} > {PHASE_STEP_LIMIT}; "
                         f"use dt <= {dt_ok:.3e} s or move z_ref closer to the packet")
    return ratio


def _operators(spec, mass_factor, z_ref, constants):
    """Tridiagonal (lower, diag, upper) of the mass matrix B and of K = B H.

    The second-order stencil has B = 1. The fourth-order stencil uses
    ``d^2/du^2 ~ B^-1 L`` with ``B = tridiag(1, 10, 1) / 12``; B and L commute,
    so H stays Hermitian and Crank-Nicolson stays exactly unitary.
    """
    scales, du, u = _dimensionless_grid(spec, z_ref, constants)
    v = mass_factor * u
    n = u.size
    kin = 1.0 / (mass_factor * du**2)
    if spec.stencil == "second":
        b = (np.zeros(n - 1), np.ones(n), np.zeros(n - 1))
        k = (np.full(n - 1, -kin), 2 * kin + v, np.full(n - 1, -kin))
    else:
        b = (np.full(n - 1, 1 / 12), np.full(n, 10 / 12), np.full(n - 1, 1 / 12))
        k = (-kin + v[:-1] / 12, 2 * kin + 10 * v / 12, -kin + v[1:] / 12)
    return scales, b, k


def _tridiag_apply(band, x):
    lo, di, up = band
    y = di * x
    y[1:] += lo * x[:-1]
    y[:-1] += up * x[1:]
    return y


@lru_cache(maxsize=32)
def _stepper(spec: GridSpec, mass_factor: float, z_ref: float, dt: float, constants: PhysicalConstants):
    scales, b, k = _operators(spec, mass_factor, z_ref, constants)
    h = 0.5j * dt / scales.t0
    # (B + i h K) psi_new = (B - i h K) psi_old
    lhs = [bb + h * kk for bb, kk in zip(b, k)]
    rhs = tuple(bb - h * kk for bb, kk in zip(b, k))
    dl, d, du_, du2, ipiv, info = lapack.zgttrf(lhs[0], lhs[1], lhs[2])
    if info != 0:
        raise np.linalg.LinAlgError("Crank-Nicolson matrix is singular")

    def step(psi):
        return lapack.zgttrs(dl, d, du_, du2, ipiv, _tridiag_apply(rhs, psi), overwrite_b=1)[0]

    return step


def evolve(state: GridState, duration: float, delta: float = 0.0, spin=Spin.UP) -> GridState:
    """Propagate for ``duration`` seconds with mass factor ``1 + sign(spin) * delta``.

    The step is shrunk so an integer number of steps covers ``duration``.
    """
    if not duration > 0:
        raise ValueError("duration must be positive")
    mu = 1.0 + Spin.parse(spin).sign * delta
    if not mu > 0:
        raise ValueError("mass factor must stay positive")
    spec = state.spec
    steps = max(1, math.ceil(duration / spec.dt - 1e-9))
    dt = duration / steps
    check_step(spec, state.z_ref, mu, state.constants)
    step = _stepper(spec, mu, state.z_ref, dt, state.constants)
    psi = state.psi[1:-1].copy()
    for _ in range(steps):
        psi = step(psi)
    full = np.zeros_like(state.psi)
    full[1:-1] = psi
    return replace(state, psi=full, t=state.t + duration, mass_factor=mu)


def _same_grid(a: GridState, b: GridState):
    if a.spec != b.spec or a.z_ref != b.z_ref or a.constants != b.constants:
        raise ValueError("states live on different grids")


def overlap(a: GridState, b: GridState) -> complex:
    """Trapezoidal <a|b>; the Dirichlet end points make it a plain sum."""
    _same_grid(a, b)
    return complex(np.vdot(a.psi, b.psi) * a.spec.dz)


def grid_energy(state: GridState) -> float:
    """<H> in J using the same discrete Hamiltonian as the solver."""
    scales, b, k = _operators(state.spec, state.mass_factor, state.z_ref, state.constants)
    inner = state.psi[1:-1]
    k_psi = _tridiag_apply(k, inner.astype(complex))
    if state.spec.stencil == "fourth":
        k_psi = solve_banded((1, 1), np.array([np.r_[0, b[2]], b[1], np.r_[b[0], 0]]), k_psi)
    norm = np.vdot(inner, inner).real
    return float(np.vdot(inner, k_psi).real / norm * scales.eps0)


def _branch_states(psi0: GridState, times, deltas):
    """Evolve psi0 with each mass factor 1+d, returning {d: [state at each t]}."""
    out = {}
    for d in deltas:
        cur, last, seq = psi0, 0.0, []
        for t in times:
            if t > last:
                cur = evolve(cur, t - last, d)
            seq.append(cur)
            last = t
        out[d] = seq
    return out


def _spin_state(up: GridState, down: GridState):
    return np.stack([up.psi, down.psi]) / math.sqrt(2.0)


def qfi_numeric(n: int, times, epsilon: float = 1e-6, spec: GridSpec = GridSpec(),
                constants: PhysicalConstants = DEFAULT_CONSTANTS, check_convergence: bool = True,
                tolerance: float = CONVERGENCE_TOLERANCE) -> QfiCurve:
    """QFI of (|up> phi_{+d} + |down> phi_{-d}) / sqrt 2 at d = 0 by central differences.

    Each motional branch is evolved under ``m (1 +/- d)``. The ``epsilon / 2``
    rerun flags points whose value moves by more than ``tolerance``.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("times must be a non-empty 1-d array")
    if np.any(times < 0) or np.any(np.diff(times) <= 0):
        raise ValueError("times must be non-negative and increasing")
    if times[-1] > QFI_TIME_LIMIT:
        raise ValueError(f"numeric QFI is limited to t <= {QFI_TIME_LIMIT} s")
    if not 0 < epsilon < 1e-2:
        raise ValueError("epsilon must lie in (0, 1e-2)")
    psi0 = discretize(eigenstate(n, derive_scales(constants)), spec, constants=constants)

    def curve(eps):
        br = _branch_states(psi0, times, (eps, 0.0, -eps))
        w = spec.dz
        vals = []
        for i in range(times.size):
            plus = _spin_state(br[eps][i], br[-eps][i])
            minus = _spin_state(br[-eps][i], br[eps][i])
            mid = _spin_state(br[0.0][i], br[0.0][i])
            vals.append(max(pure_state_qfi(mid, (plus - minus) / (2 * eps), w), 0.0))
        return np.array(vals)

    values = curve(epsilon)
    flagged = np.zeros(times.size, bool)
    if check_convergence:
        half = curve(epsilon / 2)
        scale = np.maximum(np.abs(values), 1e-300)
        flagged = (np.abs(half - values) / scale > tolerance) & (values > 0)
    return QfiCurve(times=times, values=values, model="numeric", flagged=flagged)


def qfi_fidelity(n: int, t: float, epsilon: float = 1e-4, spec: GridSpec = GridSpec(),
                 constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Fidelity-susceptibility estimate 8 (1 - |<psi_0|psi_eps>|) / eps^2."""
    if not t > 0:
        raise ValueError("t must be positive")
    psi0 = discretize(eigenstate(n, derive_scales(constants)), spec, constants=constants)
    br = {d: evolve(psi0, t, d) for d in (epsilon, 0.0, -epsilon)}
    ov = 0.5 * (overlap(br[0.0], br[epsilon]) + overlap(br[0.0], br[-epsilon]))
    return 8.0 * (1.0 - abs(ov)) / epsilon**2


def spin_branch_overlap(n: int, t: float, delta: float, spec: GridSpec = GridSpec(),
                        constants: PhysicalConstants = DEFAULT_CONSTANTS) -> complex:
    """<phi_up(t)|phi_down(t)> for a bound eigenstate evolved with masses m(1 +/- delta)."""
    psi0 = discretize(eigenstate(n, derive_scales(constants)), spec, constants=constants)
    return overlap(evolve(psi0, t, delta, Spin.UP), evolve(psi0, t, delta, Spin.DOWN))


def freefall_grid(sigma: float, t: float, constants: PhysicalConstants = DEFAULT_CONSTANTS,
                  k_dz: float = 0.15, margin: float = 6.0, dt: float | None = None,
                  stencil: str = "fourth"):
    """Grid and start height for a packet falling freely for ``t`` far above the mirror."""
    hbar, m, g = constants.hbar, constants.m, constants.g
    width = sigma * math.sqrt(1 + (hbar * t / (m * sigma**2)) ** 2)
    drop = 0.5 * g * t**2
    z0 = drop + margin * width
    z_max = z0 + margin * sigma
    k_max = m * g * t / hbar + 6 / sigma
    points = int(math.ceil(z_max * k_max / k_dz)) + 1
    if dt is None:
        # headroom for the heavier spin branch, whose potential is (1 + delta) larger
        v_max = m * g * max(z0, z_max - z0)
        dt = min(0.9 * PHASE_STEP_LIMIT * hbar / v_max, 1e-6)
    return GridSpec(z_max=z_max, points=max(points, 512), dt=dt, stencil=stencil), z0


def freefall_overlap_numeric(sigma: float, t: float, delta: float, spec: GridSpec | None = None,
                             z0: float | None = None,
                             constants: PhysicalConstants = DEFAULT_CONSTANTS) -> complex:
    """Grid estimate of <psi_up(t)|psi_down(t)> for a Gaussian released at rest.

    The potential zero sits at the release height, so the result is directly
    comparable with ``qfi.freefall_overlap`` for a packet at the origin.
    """
    if spec is None:
        spec, z0 = freefall_grid(sigma, t, constants)
    elif z0 is None:
        raise ValueError("z0 is required with an explicit grid")
    psi0 = discretize(GaussianPacket(sigma=sigma, z0=z0), spec, z_ref=z0, constants=constants)
    return overlap(evolve(psi0, t, delta, Spin.UP), evolve(psi0, t, delta, Spin.DOWN))
