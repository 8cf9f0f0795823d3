"""Units, grid, Lorentz scalar potential, and state representations.

Conventions used throughout the package:

- the energy operator is E = i*hbar*d/dt and the momentum operator is
  p = -i*hbar*d/dx;
- an operator written as acting on a conjugated field means
  apply-to-the-conjugate, i.e.  E psi* = i*hbar*d(psi*)/dt = -(E psi)*
  and likewise p psi* = -(p psi)*;
- natural units hbar = c = m = 1 are the default, but every formula keeps
  the symbolic constants so dimensional runs work;
- the second time derivative is never stored: E^2 psi is always evaluated
  on shell through the wave equation as c^2 p^2 psi + (mc^2)^2 psi
  + 2 mc^2 S psi.

Two equivalent state representations are provided: the one-component
(psi, d psi/dt) pair and the two-component first-order-in-time form
Psi = (psi1, psi2) with psi1 + psi2 = psi and psi1 - psi2 = E psi / mc^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class KfgLabError(Exception):
    """Base class for all errors raised by this package."""


class InvalidState(KfgLabError):
    """A state contains non-finite entries or has the wrong shape."""


class InvalidPotential(KfgLabError):
    """Scalar potential violates a declared constraint (e.g. nonnegativity)."""


@dataclass(frozen=True)
class PhysicalUnits:
    """Dimensional constants: hbar, c, particle mass, boundary length scale."""

    hbar: float = 1.0
    c: float = 1.0
    mass: float = 1.0
    bc_length: float = 1.0

    def __post_init__(self):
        for name in ("hbar", "c", "mass", "bc_length"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be strictly positive")

    @property
    def mc2(self) -> float:
        return self.mass * self.c**2


NATURAL_UNITS = PhysicalUnits()


@dataclass(frozen=True)
class Grid:
    """Uniform grid on [a, b] including both endpoints."""

    a: float
    b: float
    n: int

    def __post_init__(self):
        if not self.b > self.a:
            raise ValueError("grid requires b > a")
        if self.n < 8:
            raise ValueError("grid requires at least 8 points")

    @property
    def dx(self) -> float:
        return (self.b - self.a) / (self.n - 1)

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.a, self.b, self.n)

    @property
    def trapezoid_weights(self) -> np.ndarray:
        """Quadrature weights under which the discrete operators are self-adjoint."""
        w = np.full(self.n, self.dx)
        w[0] *= 0.5
        w[-1] *= 0.5
        return w

    def integrate(self, f: np.ndarray) -> complex:
        """Trapezoid-rule integral of a grid field."""
        return complex(np.sum(self.trapezoid_weights * np.asarray(f)))

    def integrate_staggered(self, f_mid: np.ndarray) -> complex:
        """Midpoint-rule integral of a field sampled on the n-1 cell midpoints."""
        if len(f_mid) != self.n - 1:
            raise ValueError("staggered field must have n-1 entries")
        return complex(self.dx * np.sum(np.asarray(f_mid)))


@dataclass(frozen=True)
class SpatialProfile:
    """Closed-form spatial part of the scalar potential.

    kinds: "constant" (value), "step" (x0, left, right),
    "quadratic" (x0, coefficient, offset), "tabulated" (values on the grid).
    """

    kind: str = "constant"
    value: float = 0.0
    x0: float = 0.0
    left: float = 0.0
    right: float = 0.0
    coefficient: float = 0.0
    offset: float = 0.0
    values: tuple[float, ...] = ()

    def sample(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == "constant":
            return np.full_like(x, self.value)
        if self.kind == "step":
            return np.where(x < self.x0, self.left, self.right)
        if self.kind == "quadratic":
            return self.coefficient * (x - self.x0) ** 2 + self.offset
        if self.kind == "tabulated":
            vals = np.asarray(self.values, dtype=float)
            if len(vals) != len(x):
                raise InvalidPotential("tabulated profile length must match the grid")
            return vals
        raise InvalidPotential(f"unknown spatial profile kind {self.kind!r}")

    def gradient(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == "constant":
            return np.zeros_like(x)
        if self.kind == "step":
            # discontinuous; the a.e. derivative vanishes
            return np.zeros_like(x)
        if self.kind == "quadratic":
            return 2.0 * self.coefficient * (x - self.x0)
        if self.kind == "tabulated":
            return np.gradient(self.sample(x), x)
        raise InvalidPotential(f"unknown spatial profile kind {self.kind!r}")


@dataclass(frozen=True)
class TimeFactor:
    """Closed-form time dependence multiplying the spatial profile.

    kinds: "constant" (scale), "sinusoidal" (amplitude*sin(omega*t + phase) + offset),
    "linear" (offset + rate*t).
    """

    kind: str = "constant"
    scale: float = 1.0
    amplitude: float = 1.0
    omega: float = 1.0
    phase: float = 0.0
    offset: float = 0.0
    rate: float = 0.0

    @property
    def is_constant(self) -> bool:
        return self.kind == "constant"

    def value(self, t: float) -> float:
        if self.kind == "constant":
            return self.scale
        if self.kind == "sinusoidal":
            return self.amplitude * math.sin(self.omega * t + self.phase) + self.offset
        if self.kind == "linear":
            return self.offset + self.rate * t
        raise InvalidPotential(f"unknown time factor kind {self.kind!r}")

    def derivative(self, t: float) -> float:
        if self.kind == "constant":
            return 0.0
        if self.kind == "sinusoidal":
            return self.amplitude * self.omega * math.cos(self.omega * t + self.phase)
        if self.kind == "linear":
            return self.rate
        raise InvalidPotential(f"unknown time factor kind {self.kind!r}")


@dataclass(frozen=True)
class ScalarPotential:
    """Real Lorentz scalar interaction S(x, t) = profile(x) * factor(t)."""

    profile: SpatialProfile = field(default_factory=SpatialProfile)
    time_factor: TimeFactor = field(default_factory=TimeFactor)
    nonneg: bool = False

    @property
    def is_static(self) -> bool:
        return self.time_factor.is_constant

    def sample(self, x: np.ndarray, t: float) -> np.ndarray:
        s = self.profile.sample(x) * self.time_factor.value(t)
        if self.nonneg and np.any(s < -1e-14):
            raise InvalidPotential(
                f"potential flagged nonnegative but min S = {s.min():.3e} at t = {t}"
            )
        return s

    def time_derivative(self, x: np.ndarray, t: float) -> np.ndarray:
        return self.profile.sample(x) * self.time_factor.derivative(t)

    def space_derivative(self, x: np.ndarray, t: float) -> np.ndarray:
        return self.profile.gradient(x) * self.time_factor.value(t)


FREE_POTENTIAL = ScalarPotential()


def _as_field(arr, n_expect: int | None = None) -> np.ndarray:
    out = np.asarray(arr, dtype=np.complex128)
    if out.ndim != 1:
        raise InvalidState("state fields must be one-dimensional")
    if n_expect is not None and len(out) != n_expect:
        raise InvalidState(f"state field has {len(out)} entries, expected {n_expect}")
    if not np.all(np.isfinite(out)):
        raise InvalidState("state field contains non-finite entries")
    return out


@dataclass(frozen=True)
class KfgState:
    """One-component state: wavefunction and its time derivative on the grid."""

    psi: np.ndarray
    psi_t: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        psi = _as_field(self.psi)
        psi_t = _as_field(self.psi_t, len(psi))
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "psi_t", psi_t)

    @property
    def n(self) -> int:
        return len(self.psi)

    def e_psi(self, units: PhysicalUnits = NATURAL_UNITS) -> np.ndarray:
        """E psi = i*hbar*psi_t."""
        return 1j * units.hbar * self.psi_t

    def scale(self) -> float:
        """Characteristic field magnitude (for relative tolerances)."""
        return float(max(np.max(np.abs(self.psi)), np.max(np.abs(self.psi_t)), 1e-300))

    def majorana_deviation(self, kind: str) -> float:
        """Distance from the reality (plus) / pure-imaginarity (minus) condition."""
        if kind == "plus":
            dev = max(np.max(np.abs(self.psi.imag)), np.max(np.abs(self.psi_t.imag)))
        elif kind == "minus":
            dev = max(np.max(np.abs(self.psi.real)), np.max(np.abs(self.psi_t.real)))
        else:
            raise ValueError("kind must be 'plus' or 'minus'")
        return float(dev)


@dataclass(frozen=True)
class FvState:
    """Two-component first-order-in-time state on the grid."""

    psi1: np.ndarray
    psi2: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        psi1 = _as_field(self.psi1)
        psi2 = _as_field(self.psi2, len(psi1))
        object.__setattr__(self, "psi1", psi1)
        object.__setattr__(self, "psi2", psi2)

    @property
    def n(self) -> int:
        return len(self.psi1)

    def majorana_deviation(self, kind: str = "plus") -> float:
        """Max-norm violation of Psi = +/- tau_1 Psi* (component swap + conjugation)."""
        sign = {"plus": 1.0, "minus": -1.0}[kind]
        return float(np.max(np.abs(self.psi2 - sign * np.conj(self.psi1))))


def kfg_to_fv(state: KfgState, units: PhysicalUnits = NATURAL_UNITS) -> FvState:
    """Map (psi, psi_t) to the two-component form.

    psi1 = (psi + E psi / mc^2)/2 and psi2 = (psi - E psi / mc^2)/2.
    """
    e_over_mc2 = state.e_psi(units) / units.mc2
    return FvState(
        psi1=0.5 * (state.psi + e_over_mc2),
        psi2=0.5 * (state.psi - e_over_mc2),
        t=state.t,
    )


def fv_to_kfg(state: FvState, units: PhysicalUnits = NATURAL_UNITS) -> KfgState:
    """Inverse map: psi = psi1 + psi2, psi_t = mc^2 (psi1 - psi2)/(i hbar)."""
    psi = state.psi1 + state.psi2
    psi_t = units.mc2 * (state.psi1 - state.psi2) / (1j * units.hbar)
    return KfgState(psi=psi, psi_t=psi_t, t=state.t)


def majorana_project(state: KfgState, kind: str) -> KfgState:
    """Project onto the strictly neutral sector.

    "plus" keeps the real parts (psi = psi*), "minus" keeps i times the
    imaginary parts (psi = -psi*). Idempotent for both kinds.
    """
    if kind == "plus":
        return KfgState(
            psi=state.psi.real.astype(np.complex128),
            psi_t=state.psi_t.real.astype(np.complex128),
            t=state.t,
        )
    if kind == "minus":
        return KfgState(
            psi=1j * state.psi.imag,
            psi_t=1j * state.psi_t.imag,
            t=state.t,
        )
    raise ValueError("kind must be 'plus' or 'minus'")
