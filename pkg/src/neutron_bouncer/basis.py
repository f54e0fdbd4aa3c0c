"""Gravitational eigenbasis of the quantum bouncer.

Eigenstates are ``psi_n(z) = A_n Ai(z/lambda + gamma_n)`` above the mirror
and zero below it. Operators built from ``z`` and ``p`` act on these states
exactly: any word in ``z`` and ``p`` applied to ``Ai(x)`` gives
``P(x) Ai(x) + Q(x) Ai'(x)`` with polynomial ``P`` and ``Q``, because
``Ai'' = x Ai``. Matrix elements are then one-dimensional integrals of
smooth functions evaluated by composite Gauss-Legendre quadrature.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as npoly

from .airy import airy_ai_and_prime, airy_zero
from .units import DEFAULT_CONSTANTS, PhysicalConstants, UnitScales, derive_scales

# Ai(x) ~ exp(-2/3 x^1.5) is below 1e-16 once x > 15 past the turning point.
TAIL_MARGIN = 15.0
_PANEL_WIDTH = 0.5
_GL_ORDER = 24


@dataclass(frozen=True)
class BoundState:
    n: int
    gamma_n: float
    norm: float  # A_n in m**-0.5
    scales: UnitScales

    @property
    def energy(self) -> float:
        """Unperturbed eigenenergy in J."""
        return -self.gamma_n * self.scales.eps0

    @property
    def norm_dimless(self) -> float:
        return self.norm * np.sqrt(self.scales.lambda_)

    @property
    def support(self) -> float:
        """Height (in units of lambda) beyond which the state is negligible."""
        return -self.gamma_n + TAIL_MARGIN

    def __call__(self, z):
        return evaluate_state(self, z)


def eigenstate(n: int, scales: UnitScales | None = None) -> BoundState:
    scales = scales or derive_scales()
    gamma = airy_zero(n)
    _, aip = airy_ai_and_prime(gamma)
    norm = 1.0 / (np.sqrt(scales.lambda_) * abs(aip))
    return BoundState(n=int(n), gamma_n=gamma, norm=norm, scales=scales)


def evaluate_dimless(state: BoundState, u):
    """Wavefunction in bouncer units (normalised over ``u = z / lambda``)."""
    u = np.asarray(u, dtype=float)
    ai, _ = airy_ai_and_prime(np.where(u >= 0, u, 0.0) + state.gamma_n)
    out = np.where(u >= 0, state.norm_dimless * ai, 0.0)
    return float(out) if out.ndim == 0 else out


def evaluate_state(state: BoundState, z):
    """Wavefunction in SI units, ``m**-0.5``."""
    u = np.asarray(z, dtype=float) / state.scales.lambda_
    return evaluate_dimless(state, u) / np.sqrt(state.scales.lambda_)


@lru_cache(maxsize=64)
def quadrature_rule(upper: float, order: int = _GL_ORDER, panel: float = _PANEL_WIDTH):
    """Composite Gauss-Legendre nodes and weights on ``[0, upper]``."""
    npanel = max(1, int(np.ceil(upper / panel)))
    edges = np.linspace(0.0, upper, npanel + 1)
    x, w = np.polynomial.legendre.leggauss(order)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def integrate(f, upper: float, order: int = _GL_ORDER) -> float:
    """Integrate a vectorised ``f`` over ``[0, upper]``."""
    u, w = quadrature_rule(float(upper), order)
    return np.sum(w * f(u))


# --- operator algebra -------------------------------------------------------

_KINDS = {"z^k", "p^k", "mixed", "hamiltonian-polynomial", "composite"}


@dataclass(frozen=True)
class ObservableSpec:
    """A polynomial in ``z`` and ``p`` with SI coefficients.

    ``terms`` maps words (strings over ``"z"`` and ``"p"``, read as operator
    products left to right) to coefficients. The empty word is the identity.
    """

    kind: str
    terms: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unsupported observable kind {self.kind!r}; expected one of {sorted(_KINDS)}")
        for word, _ in self.terms:
            if set(word) - {"z", "p"}:
                raise ValueError(f"observable words may contain only 'z' and 'p', got {word!r}")

    @classmethod
    def _from_dict(cls, kind, d):
        return cls(kind, tuple(sorted((w, complex(c)) for w, c in d.items() if c != 0)))

    def as_dict(self):
        return dict(self.terms)

    @classmethod
    def identity(cls, value=1.0):
        return cls._from_dict("composite", {"": value})

    @classmethod
    def position(cls, k: int = 1):
        return cls._from_dict("z^k", {"z" * k: 1.0})

    @classmethod
    def momentum(cls, k: int = 1):
        return cls._from_dict("p^k", {"p" * k: 1.0})

    @classmethod
    def mixed(cls, a: int, b: int):
        """Symmetrised ``(z^a p^b + p^b z^a) / 2``."""
        d = defaultdict(complex)
        d["z" * a + "p" * b] += 0.5
        d["p" * b + "z" * a] += 0.5
        return cls._from_dict("mixed", d)

    @classmethod
    def energy(cls, constants: PhysicalConstants = DEFAULT_CONSTANTS,
               kinetic: float = 1.0, potential: float = 1.0, power: int = 1):
        """``(kinetic * p^2/2m + potential * m g z) ** power``."""
        m, g = constants.m, constants.g
        base = cls._from_dict("composite", {"pp": kinetic / (2 * m), "z": potential * m * g})
        out = cls.identity()
        for _ in range(power):
            out = out @ base
        return cls("hamiltonian-polynomial", out.terms)

    def __add__(self, other):
        if not isinstance(other, ObservableSpec):
            other = ObservableSpec.identity(other)
        d = defaultdict(complex, self.as_dict())
        for w, c in other.terms:
            d[w] += c
        return ObservableSpec._from_dict("composite", d)

    __radd__ = __add__

    def __neg__(self):
        return -1.0 * self

    def __sub__(self, other):
        return self + (-1.0) * other

    def __mul__(self, scalar):
        if isinstance(scalar, ObservableSpec):
            return self @ scalar
        return ObservableSpec._from_dict(self.kind, {w: c * scalar for w, c in self.terms})

    __rmul__ = __mul__

    def __matmul__(self, other):
        d = defaultdict(complex)
        for w1, c1 in self.terms:
            for w2, c2 in other.terms:
                d[w1 + w2] += c1 * c2
        return ObservableSpec._from_dict("composite", d)

    def is_hermitian(self, rtol: float = 1e-12) -> bool:
        d = self.as_dict()
        scale = max((abs(c) for c in d.values()), default=0.0)
        for w, c in d.items():
            partner = d.get(w[::-1], 0.0)
            if abs(partner - np.conj(c)) > rtol * max(scale, 1e-300):
                return False
        return True


def _apply_word(word: str, gamma: float):
    """Coefficients ``(P, Q)`` in ``x = u + gamma`` of ``word`` acting on Ai(x)."""
    P = np.array([1.0 + 0j])
    Q = np.array([0.0 + 0j])
    shift = np.array([-gamma, 1.0])  # u = x - gamma
    for letter in reversed(word):
        if letter == "z":
            P = npoly.polymul(P, shift)
            Q = npoly.polymul(Q, shift)
        else:
            # p = -i d/du ; d/dx (P Ai + Q Ai') = (P' + x Q) Ai + (P + Q') Ai'
            newP = npoly.polyadd(npoly.polyder(P), npoly.polymulx(Q))
            newQ = npoly.polyadd(P, npoly.polyder(Q))
            P, Q = -1j * newP, -1j * newQ
    return P, Q


def _form_values(state: BoundState, word: str, u):
    P, Q = _apply_word(word, state.gamma_n)
    x = u + state.gamma_n
    ai, aip = airy_ai_and_prime(x)
    return state.norm_dimless * (npoly.polyval(x, P) * ai + npoly.polyval(x, Q) * aip)


def _raw_matrix_element(bra: BoundState, obs: ObservableSpec, ket: BoundState) -> complex:
    upper = max(bra.support, ket.support)
    u, w = quadrature_rule(upper)
    lam, p0 = bra.scales.lambda_, bra.scales.p0
    total = 0j
    for word, coef in obs.terms:
        half = len(word) // 2
        left, right = word[:half], word[half:]
        # <bra| L R |ket> = <L^dagger bra | R ket>, with z and p self-adjoint
        fa = _form_values(bra, left[::-1], u)
        fb = _form_values(ket, right, u)
        unit = lam ** word.count("z") * p0 ** word.count("p")
        total += coef * unit * np.sum(w * np.conj(fa) * fb)
    return total


def expectation(bra: BoundState, obs: ObservableSpec, ket: BoundState | None = None):
    """Matrix element ``<bra|obs|ket>`` in SI units.

    Returns a float for diagonal elements and a complex number otherwise.
    The result is explicitly Hermitian-symmetrised, so the non-self-adjoint
    surface terms that odd momentum powers pick up at the mirror drop out.
    """
    ket = bra if ket is None else ket
    if bra.scales != ket.scales:
        raise ValueError("bra and ket were built with different unit scales")
    if not isinstance(obs, ObservableSpec):
        raise TypeError(f"expected an ObservableSpec, got {type(obs).__name__}")
    if not obs.is_hermitian():
        raise ValueError(f"observable of kind {obs.kind!r} is not Hermitian; "
                         "only symmetrised combinations are supported")
    x_ab = _raw_matrix_element(bra, obs, ket)
    if bra.n == ket.n:
        return float(x_ab.real)
    x_ba = _raw_matrix_element(ket, obs, bra)
    return 0.5 * (x_ab + np.conj(x_ba))


def overlap(bra: BoundState, ket: BoundState) -> float:
    val = expectation(bra, ObservableSpec.identity(), ket)
    return float(np.real(val))


def matrix_element_z(m: int, n: int, scales: UnitScales | None = None) -> float:
    """``<psi_m| z |psi_n>`` in metres."""
    scales = scales or derive_scales()
    bra, ket = eigenstate(m, scales), eigenstate(n, scales)
    val = expectation(bra, ObservableSpec.position(), ket)
    return float(np.real(val))


def matrix_element_p(m: int, n: int, scales: UnitScales | None = None) -> complex:
    """``<psi_m| p |psi_n>`` in kg m/s (purely imaginary for m != n)."""
    scales = scales or derive_scales()
    bra, ket = eigenstate(m, scales), eigenstate(n, scales)
    return complex(expectation(bra, ObservableSpec.momentum(), ket))
