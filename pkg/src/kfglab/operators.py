"""Discrete spatial operator with boundary closure, the two-component
Hamiltonian, and the stationary eigenproblem.

Discretization scheme
---------------------
Vertex-centered grid with the standard three-point stencil for the second
derivative.  The boundary closure eliminates the two ghost points using the
boundary relations themselves:

- a Robin pair alpha*psi + beta*lam*psi_x = 0 with beta != 0 solves the
  centered endpoint derivative for the ghost;
- a degenerate pair (beta = 0) pins the endpoint value to zero, which
  removes that point from the unknowns;
- an endpoint-coupling matrix M with M[0,1] != 0 determines both ghosts
  from the two coupling relations (unit determinant makes the resulting
  corner couplings self-adjoint);
- M[0,1] = 0 identifies the endpoint values (psi(b) = M[0,0] psi(a));
  the last grid point is then slaved to the first and the ghosts follow
  from the derivative relation plus consistency of the slaved row.

The eliminated operator L acts on the remaining unknowns and is self-adjoint
with respect to the trapezoid quadrature weights (with the slaved point's
weight folded into its master).  The stored KineticMatrix is the
similarity-transformed representation K = W^(1/2) L W^(-1/2), which is
plainly Hermitian and shares L's spectrum exactly; physical mode fields u
satisfy L u = E^2 u and their weighted counterparts v = W^(1/2) u satisfy
K v = E^2 v.

Boundary derivatives evaluated anywhere in this package use the same ghost
values the operator uses, so discrete boundary data satisfies the coupling
relations identically and endpoint-balance statements hold to round-off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .core import (
    Grid,
    KfgLabError,
    KfgState,
    NATURAL_UNITS,
    PhysicalUnits,
    ScalarPotential,
)
from .bc import (
    BcParams,
    BcRealization,
    CoupledBc,
    NotMajoranaCompatible,
    SeparatedBc,
    bc_realization,
)

SLAVED_CUTOFF = 1e-10
PIN_CUTOFF = 1e-10


class SingularClosure(KfgLabError):
    """The boundary closure cannot be eliminated on this grid/potential."""


class ClosureNotSelfAdjoint(KfgLabError):
    """Assembled Hamiltonian failed the pseudo-Hermiticity check."""


class NumericalFailure(KfgLabError):
    """Eigensolver or linear solver did not converge."""


class InvalidMode(KfgLabError):
    """Mode synthesis referenced a nonexistent or quarantined mode."""


@dataclass(frozen=True)
class GhostMap:
    """Ghost value as a sparse linear combination of grid values."""

    indices: tuple[int, ...]
    coefs: np.ndarray

    def __call__(self, field: np.ndarray) -> complex:
        return complex(np.dot(self.coefs, field[list(self.indices)]))


@dataclass(frozen=True)
class DiscreteClosure:
    """Ghost-elimination data for one boundary realization on one grid."""

    grid: Grid
    lam: float
    dof: np.ndarray                      # indices of the unknowns
    pinned: tuple[int, ...]              # grid points held at zero
    slaved: tuple[int, complex] | None   # (grid point, factor): f[pt] = factor * f[0]
    ghost_a: GhostMap
    ghost_b: GhostMap
    dof_weights: np.ndarray              # metric weights of the unknowns
    is_complex: bool

    @property
    def n_dof(self) -> int:
        return len(self.dof)

    def restrict(self, full: np.ndarray) -> np.ndarray:
        return np.asarray(full)[self.dof]

    def extend(self, values: np.ndarray) -> np.ndarray:
        dtype = np.complex128 if (self.is_complex or np.iscomplexobj(values)) else np.float64
        full = np.zeros(self.grid.n, dtype=dtype)
        full[self.dof] = values
        if self.slaved is not None:
            pt, factor = self.slaved
            full[pt] = (factor.real if not np.iscomplexobj(full) else factor) * full[0]
        return full

    def ghosts(self, full: np.ndarray) -> tuple[complex, complex]:
        return self.ghost_a(full), self.ghost_b(full)

    def dx1(self, full: np.ndarray) -> np.ndarray:
        """First derivative: centered everywhere, ghost values at the ends."""
        full = np.asarray(full, dtype=np.complex128)
        g_a, g_b = self.ghosts(full)
        out = np.empty_like(full)
        h2 = 2.0 * self.grid.dx
        out[1:-1] = (full[2:] - full[:-2]) / h2
        out[0] = (full[1] - g_a) / h2
        out[-1] = (g_b - full[-2]) / h2
        return out

    def second_difference(self, full: np.ndarray) -> np.ndarray:
        """(-f[i-1] + 2 f[i] - f[i+1]) / dx^2 at every grid point, with ghosts."""
        full = np.asarray(full, dtype=np.complex128)
        g_a, g_b = self.ghosts(full)
        dx2 = self.grid.dx**2
        out = np.empty_like(full)
        out[1:-1] = (-full[:-2] + 2.0 * full[1:-1] - full[2:]) / dx2
        out[0] = (-g_a + 2.0 * full[0] - full[1]) / dx2
        out[-1] = (-full[-2] + 2.0 * full[-1] - g_b) / dx2
        return out


def _end_ghost_separated(alpha, beta, dx, lam, at_a: bool):
    """Ghost map for one separated end; None signals a pinned endpoint."""
    if abs(beta) <= PIN_CUTOFF:
        return None
    r = 2.0 * dx * alpha / (lam * beta)
    if at_a:
        return GhostMap(indices=(0, 1), coefs=np.array([r, 1.0]))
    return GhostMap(indices=(-2, -1), coefs=np.array([1.0, -r]))


def build_closure(grid: Grid, realization: BcRealization) -> DiscreteClosure:
    """Eliminate the ghost points of a boundary realization on a grid."""
    n, dx = grid.n, grid.dx
    lam = realization.lam
    w = grid.trapezoid_weights

    if isinstance(realization, SeparatedBc):
        ga = _end_ghost_separated(realization.alpha_a, realization.beta_a, dx, lam, True)
        gb = _end_ghost_separated(realization.alpha_b, realization.beta_b, dx, lam, False)
        pinned = []
        if ga is None:
            pinned.append(0)
            ga = GhostMap(indices=(0, 1), coefs=np.array([2.0, -1.0]))  # odd reflection
        if gb is None:
            pinned.append(n - 1)
            gb = GhostMap(indices=(-2, -1), coefs=np.array([-1.0, 2.0]))
        dof = np.array([i for i in range(n) if i not in pinned])
        return DiscreteClosure(
            grid=grid, lam=lam, dof=dof, pinned=tuple(pinned), slaved=None,
            ghost_a=ga, ghost_b=gb, dof_weights=w[dof], is_complex=False,
        )

    m = realization.matrix
    m11, m12, m21, m22 = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    det = m11 * m22 - m12 * m21
    is_complex = not realization.is_real
    scale = 2.0 * dx / lam
    if abs(m12) > SLAVED_CUTOFF * (1.0 + np.max(np.abs(m))):
        # both endpoints remain unknowns; ghosts carry the corner coupling
        ga = GhostMap(
            indices=(0, 1, n - 1),
            coefs=np.array([scale * m11 / m12, 1.0, -scale / m12]),
        )
        gb = GhostMap(
            indices=(0, n - 2, n - 1),
            coefs=np.array([-scale * det / m12, 1.0, scale * m22 / m12]),
        )
        dof = np.arange(n)
        return DiscreteClosure(
            grid=grid, lam=lam, dof=dof, pinned=(), slaved=None,
            ghost_a=ga, ghost_b=gb, dof_weights=w.copy(), is_complex=is_complex,
        )

    # value-identifying closure: psi(b) = m11 psi(a)
    if abs(m11) <= SLAVED_CUTOFF:
        raise SingularClosure("coupling matrix has a vanishing first column")
    tr = m11 + m22
    if abs(tr) <= SLAVED_CUTOFF:
        raise SingularClosure("coupling matrix trace vanishes; ghosts undetermined")
    ga_coef = np.array([scale * m21 / tr, (m22 - m11) / tr, 2.0 / tr])
    ga = GhostMap(indices=(0, 1, n - 2), coefs=ga_coef)
    # g_b = m11 g_a + m11 psi[1] - psi[n-2]
    gb_coef = m11 * ga_coef + np.array([0.0, m11, -1.0])
    gb = GhostMap(indices=(0, 1, n - 2), coefs=gb_coef)
    dof = np.arange(n - 1)
    weights = w[:-1].copy()
    weights[0] = w[0] + abs(m11) ** 2 * w[-1]
    return DiscreteClosure(
        grid=grid, lam=lam, dof=dof, pinned=(), slaved=(n - 1, complex(m11)),
        ghost_a=ga, ghost_b=gb, dof_weights=weights, is_complex=is_complex,
    )


def e2_field(
    closure: DiscreteClosure,
    units: PhysicalUnits,
    diag: np.ndarray,
    field: np.ndarray,
) -> np.ndarray:
    """On-shell E^2 action on a full-grid field (pinned rows vanish)."""
    kappa = (units.hbar * units.c) ** 2
    out = kappa * closure.second_difference(field) + diag * np.asarray(field)
    for p in closure.pinned:
        out[p] = 0.0
    return out


@dataclass(frozen=True)
class KineticMatrix:
    """Discrete c^2 p^2 + (mc^2)^2 + 2 mc^2 S with the closure baked in.

    `sym` is the Hermitian similarity-transformed representation on the
    unknowns; `l_dof` is the untransformed dynamic representation whose
    eigenvectors are the physical grid modes.
    """

    closure: DiscreteClosure
    units: PhysicalUnits
    t: float
    diag: np.ndarray      # (mc^2)^2 + 2 mc^2 S on the full grid
    l_dof: np.ndarray
    sym: np.ndarray
    hermiticity_defect: float

    @property
    def n_dof(self) -> int:
        return self.closure.n_dof

    def apply_full(self, field: np.ndarray) -> np.ndarray:
        return e2_field(self.closure, self.units, self.diag, field)


def assemble_kinetic(
    grid: Grid,
    potential: ScalarPotential,
    bc: BcRealization,
    units: PhysicalUnits = NATURAL_UNITS,
    t: float = 0.0,
) -> KineticMatrix:
    """Build the closed spatial operator at time t.

    Raises SingularClosure when the closure cannot be eliminated, including
    an end-identifying closure over a potential with S(a) != S(b).
    """
    closure = build_closure(grid, bc)
    x = grid.x
    s = np.asarray(potential.sample(x, t), dtype=float)
    if closure.slaved is not None and abs(s[0] - s[-1]) > 1e-12 * (1.0 + np.max(np.abs(s))):
        raise SingularClosure(
            "end-identifying boundary condition requires S(a, t) = S(b, t)"
        )
    mc2 = units.mc2
    diag = mc2**2 + 2.0 * mc2 * s
    kappa = (units.hbar * units.c) ** 2

    nd = closure.n_dof
    dtype = np.complex128 if closure.is_complex else np.float64
    l_dof = np.empty((nd, nd), dtype=dtype)
    unit = np.zeros(nd, dtype=dtype)
    for j in range(nd):
        unit[j] = 1.0
        full = closure.extend(unit)
        col = (kappa * closure.second_difference(full) + diag * full)[closure.dof]
        l_dof[:, j] = col if closure.is_complex else col.real
        unit[j] = 0.0

    sqrt_w = np.sqrt(closure.dof_weights)
    sym = (sqrt_w[:, None] * l_dof) / sqrt_w[None, :]
    defect = float(
        np.linalg.norm(sym - sym.conj().T) / max(np.linalg.norm(sym), 1e-300)
    )
    if defect > 1e-12:
        raise SingularClosure(f"closure is not self-adjoint (defect {defect:.3e})")
    return KineticMatrix(
        closure=closure, units=units, t=t, diag=diag,
        l_dof=l_dof, sym=sym, hermiticity_defect=defect,
    )


@dataclass(frozen=True)
class DiscreteHamiltonian:
    """2n x 2n first-order-in-time generator in the Hermitian representation.

    Blockwise [[W + mc^2, W], [-W, -W - mc^2]] with W = (K - (mc^2)^2)/(2 mc^2),
    i.e. the discrete p^2/2m + S.  Pseudo-Hermitian: tau_3 h^dag tau_3 = h.
    """

    kinetic: KineticMatrix
    matrix: np.ndarray
    pseudo_hermiticity_defect: float

    @property
    def n_dof(self) -> int:
        return self.kinetic.n_dof


def pseudo_hermiticity_defect(h: np.ndarray) -> float:
    """Relative Frobenius defect of tau_3 h^dag tau_3 - h."""
    m = h.shape[0] // 2
    t3 = np.ones(2 * m)
    t3[m:] = -1.0
    twisted = t3[:, None] * h.conj().T * t3[None, :]
    return float(np.linalg.norm(twisted - h) / max(np.linalg.norm(h), 1e-300))


def assemble_fv_hamiltonian(
    kinetic: KineticMatrix, tol: float = 1e-10
) -> DiscreteHamiltonian:
    """Assemble the two-component Hamiltonian from the closed kinetic matrix."""
    units = kinetic.units
    mc2 = units.mc2
    nd = kinetic.n_dof
    w_block = (kinetic.sym - mc2**2 * np.eye(nd)) / (2.0 * mc2)
    h = np.zeros((2 * nd, 2 * nd), dtype=np.complex128)
    h[:nd, :nd] = w_block + mc2 * np.eye(nd)
    h[:nd, nd:] = w_block
    h[nd:, :nd] = -w_block
    h[nd:, nd:] = -w_block - mc2 * np.eye(nd)
    defect = pseudo_hermiticity_defect(h)
    if defect > tol:
        raise ClosureNotSelfAdjoint(
            f"pseudo-Hermiticity defect {defect:.3e} exceeds {tol:.1e}"
        )
    return DiscreteHamiltonian(kinetic=kinetic, matrix=h, pseudo_hermiticity_defect=defect)


@dataclass(frozen=True)
class ModeSet:
    """Stationary modes: positive energies with weight-orthonormal grid fields.

    Nonpositive squared energies (possible for Robin-type closures) are
    quarantined in `diagnostics` as (eigen index, E^2) pairs and never used
    for synthesis.
    """

    energies: np.ndarray          # shape (k,), strictly positive, ascending
    fields: np.ndarray            # shape (k, n) full-grid fields
    diagnostics: tuple = ()

    @property
    def count(self) -> int:
        return len(self.energies)


def eigenmodes(kinetic: KineticMatrix, positivity_tol: float = 1e-12) -> ModeSet:
    """Full Hermitian eigendecomposition of the closed kinetic operator.

    Eigenvalues are E^2; modes store E = +sqrt(E^2) with fields extended to
    the full grid and orthonormal under the trapezoid weights.
    """
    try:
        vals, vecs = scipy.linalg.eigh(kinetic.sym)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - defensive
        raise NumericalFailure(f"eigensolver failed: {exc}") from exc
    closure = kinetic.closure
    cutoff = positivity_tol * max(1.0, float(np.max(np.abs(vals))))
    keep = vals > cutoff
    diagnostics = tuple((int(i), float(vals[i])) for i in np.flatnonzero(~keep))
    sqrt_w = np.sqrt(closure.dof_weights)
    fields = []
    for i in np.flatnonzero(keep):
        u = vecs[:, i] / sqrt_w
        fields.append(closure.extend(u))
    energies = np.sqrt(vals[keep])
    fields_arr = np.array(fields) if fields else np.zeros((0, closure.grid.n))
    return ModeSet(energies=energies, fields=fields_arr, diagnostics=diagnostics)


def synthesize_state(
    modes: ModeSet,
    coefficients: list[tuple[int, float, float]],
    t: float,
    kind: str = "plus",
    units: PhysicalUnits = NATURAL_UNITS,
) -> KfgState:
    """Build an exactly on-shell state from stationary modes.

    coefficients: (mode index, amplitude, phase).  kind "plus"/"minus" give
    the two strictly neutral sectors psi = sum A cos(E t/hbar + phi) u (times i
    for "minus"); kind "none" gives the charged superposition
    psi = sum A exp(-i(E t/hbar + phi)) u.
    """
    n = modes.fields.shape[1] if modes.count else 0
    psi = np.zeros(n, dtype=np.complex128)
    psi_t = np.zeros(n, dtype=np.complex128)
    hbar = units.hbar
    for index, amp, phase in coefficients:
        if not 0 <= index < modes.count:
            raise InvalidMode(
                f"mode index {index} outside the {modes.count} synthesizable modes"
            )
        e = modes.energies[index]
        u = modes.fields[index]
        arg = e * t / hbar + phase
        if kind in ("plus", "minus"):
            psi = psi + amp * math.cos(arg) * u
            psi_t = psi_t - amp * (e / hbar) * math.sin(arg) * u
        elif kind == "none":
            ph = np.exp(-1j * arg)
            psi = psi + amp * ph * u
            psi_t = psi_t + amp * (-1j * e / hbar) * ph * u
        else:
            raise ValueError("kind must be 'plus', 'minus' or 'none'")
    if kind == "minus":
        psi, psi_t = 1j * psi, 1j * psi_t
    return KfgState(psi=psi, psi_t=psi_t, t=t)


class System:
    """Grid + units + potential + boundary condition, with cached operators."""

    def __init__(
        self,
        grid: Grid,
        bc: BcParams,
        potential: ScalarPotential | None = None,
        units: PhysicalUnits = NATURAL_UNITS,
    ):
        self.grid = grid
        self.bc = bc
        self.potential = potential if potential is not None else ScalarPotential()
        self.units = units
        self.realization = bc_realization(bc)
        self.closure = build_closure(grid, self.realization)
        self._kinetic_static: KineticMatrix | None = None
        self._hamiltonian_static: DiscreteHamiltonian | None = None
        self._modes: ModeSet | None = None

    @property
    def is_static(self) -> bool:
        return self.potential.is_static

    def kinetic(self, t: float = 0.0) -> KineticMatrix:
        if self.is_static:
            if self._kinetic_static is None:
                self._kinetic_static = assemble_kinetic(
                    self.grid, self.potential, self.realization, self.units, t=0.0
                )
            return self._kinetic_static
        return assemble_kinetic(self.grid, self.potential, self.realization, self.units, t=t)

    def hamiltonian(self, t: float = 0.0) -> DiscreteHamiltonian:
        if self.is_static:
            if self._hamiltonian_static is None:
                self._hamiltonian_static = assemble_fv_hamiltonian(self.kinetic())
            return self._hamiltonian_static
        return assemble_fv_hamiltonian(self.kinetic(t))

    def modes(self) -> ModeSet:
        if not self.is_static:
            raise NumericalFailure("stationary modes require a static potential")
        if self._modes is None:
            self._modes = eigenmodes(self.kinetic())
        return self._modes

    def dx1(self, field: np.ndarray) -> np.ndarray:
        return self.closure.dx1(field)

    def e2_apply(self, field: np.ndarray, t: float = 0.0) -> np.ndarray:
        """On-shell E^2 psi = c^2 p^2 psi + (mc^2)^2 psi + 2 mc^2 S psi."""
        if self.is_static:
            return self.kinetic().apply_full(field)
        mc2 = self.units.mc2
        s = np.asarray(self.potential.sample(self.grid.x, t), dtype=float)
        diag = mc2**2 + 2.0 * mc2 * s
        return e2_field(self.closure, self.units, diag, field)

    def synthesize(
        self,
        coefficients: list[tuple[int, float, float]],
        t: float = 0.0,
        kind: str = "plus",
    ) -> KfgState:
        if kind in ("plus", "minus") and self.closure.is_complex:
            raise NotMajoranaCompatible(
                "complex boundary closure admits no strictly neutral states"
            )
        return synthesize_state(self.modes(), coefficients, t, kind, self.units)
