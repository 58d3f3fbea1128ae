"""Mixture parameters, grids, state containers and shared validation.

Units: temperatures in energy units (Boltzmann constant = 1), so the thermal
speed of species i is sqrt(theta/m_i).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np


class ConfigError(ValueError):
    """Invalid run configuration or parameter set (CLI exit code 2)."""


class InvariantViolation(RuntimeError):
    """A solver invariant tripped at runtime (CLI exit code 1)."""


@dataclass
class MixtureParams:
    """Species masses, collision frequencies and scaling parameters.

    nu_matrix holds the pairwise frequencies of the multispecies relaxation
    model; nu_vec the per-species frequencies of the single-relaxation model
    with interaction matrix ``a``.  Either may be None when unused.
    """

    N: int
    m: np.ndarray
    nu_matrix: np.ndarray | None = None
    nu_vec: np.ndarray | None = None
    a: np.ndarray | None = None
    eps: float = 0.1
    sigma: float = 1.0

    def __post_init__(self):
        self.m = np.asarray(self.m, dtype=float)
        if self.nu_matrix is not None:
            self.nu_matrix = np.asarray(self.nu_matrix, dtype=float)
        if self.nu_vec is not None:
            self.nu_vec = np.asarray(self.nu_vec, dtype=float)
        if self.a is not None:
            self.a = np.asarray(self.a, dtype=float)


def validate_params(p: MixtureParams) -> list[str]:
    """Return a list of violated invariants (empty list means ok)."""
    errors = []
    if p.N < 1:
        errors.append("species count must be >= 1")
    if p.m.shape != (p.N,):
        errors.append(f"mass vector has shape {p.m.shape}, expected ({p.N},)")
    elif not np.all(p.m > 0):
        errors.append("mass must be positive")
    if p.nu_matrix is None and p.nu_vec is None:
        errors.append("one of nu_matrix / nu_vec must be set")
    if p.nu_matrix is not None:
        if p.nu_matrix.shape != (p.N, p.N):
            errors.append(f"nu_matrix dimension mismatch: {p.nu_matrix.shape} != ({p.N}, {p.N})")
        elif not np.all(p.nu_matrix > 0):
            errors.append("collision frequencies nu_ij must be positive")
    if p.nu_vec is not None:
        if p.nu_vec.shape != (p.N,):
            errors.append(f"nu_vec dimension mismatch: {p.nu_vec.shape} != ({p.N},)")
        elif not np.all(p.nu_vec > 0):
            errors.append("collision frequencies nu_i must be positive")
    if p.a is not None and p.a.shape != (p.N, p.N):
        errors.append(f"interaction matrix dimension mismatch: {p.a.shape} != ({p.N}, {p.N})")
    if not (0.0 < p.eps <= 1.0):
        errors.append(f"eps={p.eps} out of range (0, 1]")
    if not p.sigma > 0:
        errors.append(f"sigma={p.sigma} must be positive")
    return errors


def require_valid(p: MixtureParams) -> MixtureParams:
    errors = validate_params(p)
    if errors:
        raise ConfigError("; ".join(errors))
    return p


@dataclass(frozen=True)
class Grid1D:
    """Uniform periodic 1D grid of cell centers on [0, L)."""

    L: float
    ncells: int
    periodic: bool = True

    def __post_init__(self):
        if self.ncells < 8:
            raise ConfigError("ncells must be >= 8")
        if not self.L > 0:
            raise ConfigError("domain length must be positive")

    @property
    def dx(self) -> float:
        return self.L / self.ncells

    @property
    def x(self) -> np.ndarray:
        return (np.arange(self.ncells) + 0.5) * self.dx


@dataclass(frozen=True)
class VelocityGrid1D:
    """Uniform symmetric midpoint grid on [-xi_max, xi_max].

    nodes[k] = -nodes[nnodes-1-k] exactly; the single quadrature weight is
    2*xi_max/nnodes so that sum(w) = 2*xi_max.
    """

    xi_max: float
    nnodes: int

    def __post_init__(self):
        if not (self.xi_max > 0 and self.nnodes >= 2):
            raise ConfigError("velocity grid needs xi_max > 0 and nnodes >= 2")

    @property
    def weight(self) -> float:
        return 2.0 * self.xi_max / self.nnodes

    @property
    def nodes(self) -> np.ndarray:
        # build one half and mirror so the symmetry is exact in floating point
        h = self.weight
        half = self.nnodes // 2
        pos = (np.arange(half) + 0.5) * h
        if self.nnodes % 2 == 0:
            return np.concatenate([-pos[::-1], pos])
        return np.concatenate([-pos[::-1], [0.0], pos])


def default_velocity_grid(theta_max: float, m: np.ndarray, nnodes: int = 64) -> VelocityGrid1D:
    """Grid wide enough for the hottest/lightest species: 8 thermal speeds."""
    xi_max = 8.0 * float(np.max(np.sqrt(theta_max / np.asarray(m))))
    return VelocityGrid1D(xi_max=xi_max, nnodes=nnodes)


class RegimeKind(enum.Enum):
    DIFFUSIVE = "diffusive"
    HIGHFIELD = "highfield"


@dataclass(frozen=True)
class ScalingRegime:
    kind: RegimeKind
    eps: float


def scaling_from_physical(Ma: float, Kn: float, tol: float = 1e-9) -> ScalingRegime:
    """Classify (Mach, Knudsen) into a supported scaling regime.

    Kn ~ Ma gives the diffusive regime, Kn ~ Ma^2 the high-field one; in both
    cases the small parameter is eps = Ma.
    """
    if not (0.0 < Ma < 1.0 and 0.0 < Kn < 1.0):
        raise ConfigError("Ma and Kn must lie in (0, 1)")
    if abs(Kn - Ma) <= tol * Ma:
        return ScalingRegime(RegimeKind.DIFFUSIVE, eps=Ma)
    if abs(Kn - Ma * Ma) <= tol * Ma * Ma:
        return ScalingRegime(RegimeKind.HIGHFIELD, eps=Ma)
    raise ConfigError(f"unsupported scaling regime: Ma={Ma}, Kn={Kn}")


@dataclass
class KineticState:
    """Reduced distribution pair per species on a space x velocity grid.

    G[s, k, c] integrates f over the transverse velocities; H[s, k, c] is the
    transverse-energy density int f (xi2^2+xi3^2).  Cached moments follow the
    owning solver's convention (shift scale absorbed by the caller).
    """

    G: np.ndarray  # (N, nnodes, ncells)
    H: np.ndarray
    n: np.ndarray = field(default=None)       # (N, ncells)
    v: np.ndarray = field(default=None)
    theta: np.ndarray = field(default=None)

    def copy(self) -> "KineticState":
        return KineticState(
            G=self.G.copy(), H=self.H.copy(),
            n=None if self.n is None else self.n.copy(),
            v=None if self.v is None else self.v.copy(),
            theta=None if self.theta is None else self.theta.copy(),
        )


@dataclass
class MacroStateMS:
    """Maxwell-Stefan macroscopic fields: densities, velocities, one temperature."""

    n: np.ndarray      # (N, ncells)
    v: np.ndarray      # (N, ncells) cell-centered diagnostic velocities
    theta: np.ndarray  # (ncells,)

    def copy(self) -> "MacroStateMS":
        return MacroStateMS(self.n.copy(), self.v.copy(), self.theta.copy())


@dataclass
class MacroStateBT:
    """Busenberg-Travis macroscopic fields: mass densities and per-species temperatures."""

    rho: np.ndarray    # (N, ncells)
    theta: np.ndarray  # (N, ncells)
    phi: np.ndarray = None  # (N, ncells), refreshed by the solver

    def copy(self) -> "MacroStateBT":
        return MacroStateBT(self.rho.copy(), self.theta.copy(),
                            None if self.phi is None else self.phi.copy())


def init_kinetic_state(grid: Grid1D, vgrid: VelocityGrid1D,
                       n: np.ndarray, v: np.ndarray, theta: np.ndarray,
                       p: MixtureParams, shift_scale: float = 1.0) -> KineticState:
    """Maxwellian kinetic state with per-cell moments (n, v, theta).

    The reduced pair is the continuous Maxwellian sampled at the nodes, with
    mean velocity shift_scale*v (the diffusive-scaling solver passes eps).
    """
    from . import maxwellian

    n = np.asarray(n, float)
    v = np.asarray(v, float)
    theta = np.asarray(theta, float)
    if n.shape != (p.N, grid.ncells) or v.shape != n.shape or theta.shape != n.shape:
        raise ConfigError("profile arrays must have shape (N, ncells)")
    if not np.all(n > 0):
        raise ConfigError("initial density must be positive")
    if not np.all(theta > 0):
        raise ConfigError("initial temperature must be positive")

    G = np.empty((p.N, vgrid.nnodes, grid.ncells))
    H = np.empty_like(G)
    for s in range(p.N):
        G[s], H[s] = maxwellian.reduced_maxwellian_pair(
            n[s], shift_scale * v[s], theta[s], p.m[s], vgrid)
    return KineticState(G=G, H=H)
