"""Maxwellian evaluation, closed-form Gaussian moments, and quadrature oracles.

Every Gaussian integral used anywhere in the package is defined here, so the
solvers never hand-code one.  The 3D midpoint-rule moments serve as the
independent oracle for the closed forms and for the reduced representation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import InvariantViolation, VelocityGrid1D


@dataclass
class MomentTable:
    """Moments of a velocity distribution up to fourth order (diagonal parts)."""

    zeroth: float
    first: np.ndarray                    # (3,)
    second_trace: float                  # int f |xi|^2
    second_tensor_diag: np.ndarray = None  # diag of int f xi (x) xi
    third_vector: np.ndarray = None      # int f xi |xi|^2
    fourth_tensor_diag: np.ndarray = None  # diag of int f xi (x) xi |xi|^2


def eval_maxwellian(n, v_shift, theta, m, xi):
    """Pointwise 3D Maxwellian n (m/2 pi theta)^{3/2} exp(-m|xi - v|^2 / 2 theta).

    xi has shape (..., 3); broadcasting applies to the scalar arguments.
    """
    if np.any(np.asarray(theta) <= 0):
        raise InvariantViolation("temperature must be positive")
    if np.any(np.asarray(m) <= 0):
        raise InvariantViolation("mass must be positive")
    v_shift = np.asarray(v_shift, dtype=float)
    d2 = np.sum((np.asarray(xi, dtype=float) - v_shift) ** 2, axis=-1)
    return n * (m / (2.0 * np.pi * theta)) ** 1.5 * np.exp(-0.5 * m * d2 / theta)


def reduced_maxwellian_pair(n, v, theta, m, vgrid: VelocityGrid1D):
    """Reduced pair (G_M, H_M) of the Maxwellian with 1D mean velocity v.

    G_M(xi1) = n sqrt(m/2 pi theta) exp(-m (xi1-v)^2 / 2 theta) and
    H_M = (2 theta / m) G_M, sampled at the grid nodes.  Scalar or per-cell
    array moments are accepted; arrays give shape (nnodes, ncells).
    """
    n = np.asarray(n, float)
    v = np.asarray(v, float)
    theta = np.asarray(theta, float)
    if np.any(theta <= 0):
        raise InvariantViolation("temperature must be positive")
    xi = vgrid.nodes
    if n.ndim == 0:
        G = n * np.sqrt(m / (2.0 * np.pi * theta)) * np.exp(-0.5 * m * (xi - v) ** 2 / theta)
        return G, (2.0 * theta / m) * G
    G = (n * np.sqrt(m / (2.0 * np.pi * theta)))[None, :] \
        * np.exp(-0.5 * m * (xi[:, None] - v[None, :]) ** 2 / theta[None, :])
    return G, (2.0 * theta / m)[None, :] * G


def reduced_moments(G, H, vgrid: VelocityGrid1D, m):
    """Extract (n, u, theta) per cell from a reduced pair.

    n = sum w G, n u = sum w G xi, 3 n theta / m = sum w (G xi^2 + H) - n u^2.
    The caller interprets u (eps*v in the diffusive-scaling model, v in the
    force model, which adds the u^2 part back for its full-moment temperature).
    """
    w = vgrid.weight
    xi = vgrid.nodes
    n = w * np.sum(G, axis=-2)
    if np.any(n <= 0):
        raise InvariantViolation("vacuum cell: nonpositive density in moment extraction")
    # pair each node with its mirror so odd moments of symmetric data cancel
    # exactly (nodes[k] = -nodes[-1-k] bitwise)
    half = vgrid.nnodes // 2
    flipped = np.flip(G, axis=-2)
    mom1 = w * np.einsum("k,...kc->...c", xi[:half],
                         G[..., :half, :] - flipped[..., :half, :])
    e2 = w * (np.einsum("k,...kc->...c", xi * xi, G) + np.sum(H, axis=-2))
    u = mom1 / n
    theta = (m / 3.0) * (e2 - n * u * u) / n
    return n, u, theta


def reduced_second_moment(G, H, vgrid: VelocityGrid1D):
    """Raw second moment e = sum w (G xi^2 + H) per cell."""
    w = vgrid.weight
    xi = vgrid.nodes
    return w * (np.einsum("k,...kc->...c", xi * xi, G) + np.sum(H, axis=-2))


def analytic_moments_m0(n, theta, m) -> MomentTable:
    """Closed-form moments of the centered Maxwellian.

    zeroth n; odd moments vanish; second tensor (n theta / m) I; fourth tensor
    5 (n theta^2 / m^2) I.
    """
    if n < 0 or theta <= 0 or m <= 0:
        raise InvariantViolation("need n >= 0, theta > 0, m > 0")
    s2 = n * theta / m
    s4 = 5.0 * n * theta * theta / (m * m)
    return MomentTable(
        zeroth=float(n),
        first=np.zeros(3),
        second_trace=3.0 * s2,
        second_tensor_diag=np.full(3, s2),
        third_vector=np.zeros(3),
        fourth_tensor_diag=np.full(3, s4),
    )


def analytic_moments_shifted(n, eps_v, theta, m) -> MomentTable:
    """Zeroth/first/trace moments of a Maxwellian with mean velocity eps_v.

    int M = n, int M xi = n eps_v, int M |xi|^2 = 3 n theta / m + n |eps_v|^2.
    """
    if n < 0 or theta <= 0 or m <= 0:
        raise InvariantViolation("need n >= 0, theta > 0, m > 0")
    eps_v = np.asarray(eps_v, dtype=float)
    return MomentTable(
        zeroth=float(n),
        first=n * eps_v,
        second_trace=3.0 * n * theta / m + n * float(eps_v @ eps_v),
    )


# ---------------------------------------------------------------------------
# 3D tensor-grid quadrature oracle


@dataclass(frozen=True)
class TensorGrid3V:
    """Midpoint tensor grid in velocity space, independent per axis."""

    axes: tuple[np.ndarray, np.ndarray, np.ndarray]
    weights: tuple[float, float, float]

    @property
    def cell_weight(self) -> float:
        return self.weights[0] * self.weights[1] * self.weights[2]

    def meshgrid(self):
        return np.meshgrid(*self.axes, indexing="ij")


def symmetric_axis(xi_max: float, nnodes: int) -> np.ndarray:
    return VelocityGrid1D(xi_max=xi_max, nnodes=nnodes).nodes


def oracle_grid(theta, m, shift=(0.0, 0.0, 0.0), nnodes: int = 48,
                nsigma: float = 8.0) -> TensorGrid3V:
    """Tensor grid tailored to one Gaussian: per axis, xi_max = nsigma
    thermal speeds plus the mean-velocity offset (tails < 1e-14)."""
    sd = float(np.sqrt(theta / m))
    shift = np.asarray(shift, dtype=float)
    axes = []
    weights = []
    for d in range(3):
        xi_max = nsigma * sd + abs(float(shift[d]))
        axes.append(symmetric_axis(xi_max, nnodes) + 0.0)
        weights.append(2.0 * xi_max / nnodes)
    # recenter each axis on the shift so the Gaussian is well resolved
    axes = [ax + float(s) for ax, s in zip(axes, shift)]
    return TensorGrid3V(axes=tuple(axes), weights=tuple(weights))


def quadrature_moments_3d(f: np.ndarray, grid: TensorGrid3V) -> MomentTable:
    """Midpoint-rule moments of samples f on a 3D tensor grid."""
    x1, x2, x3 = grid.meshgrid()
    w = grid.cell_weight
    sq = x1 * x1 + x2 * x2 + x3 * x3
    zeroth = w * np.sum(f)
    first = w * np.array([np.sum(f * x1), np.sum(f * x2), np.sum(f * x3)])
    second_trace = w * np.sum(f * sq)
    second_diag = w * np.array([np.sum(f * x1 * x1), np.sum(f * x2 * x2), np.sum(f * x3 * x3)])
    third = w * np.array([np.sum(f * x1 * sq), np.sum(f * x2 * sq), np.sum(f * x3 * sq)])
    fourth_diag = w * np.array([np.sum(f * x1 * x1 * sq), np.sum(f * x2 * x2 * sq),
                                np.sum(f * x3 * x3 * sq)])
    return MomentTable(zeroth, first, second_trace, second_diag, third, fourth_diag)


def sample_maxwellian_3d(n, v_shift, theta, m, grid: TensorGrid3V) -> np.ndarray:
    x1, x2, x3 = grid.meshgrid()
    xi = np.stack([x1, x2, x3], axis=-1)
    return eval_maxwellian(n, v_shift, theta, m, xi)


def maxwellian_moments_by_quadrature(n, v_shift, theta, m, nnodes: int = 48) -> MomentTable:
    """Oracle moments of a single Maxwellian on its own tailored grid."""
    grid = oracle_grid(theta, m, v_shift, nnodes=nnodes)
    return quadrature_moments_3d(sample_maxwellian_3d(n, v_shift, theta, m, grid), grid)


def gaussian_entropy_density(n, theta, m):
    """Spatial density of -int f (log f - 1) for a Maxwellian f.

    Equals -(n (log n - 1) + 3/2 n (log(m / 2 pi theta) - 1)); independent of
    the mean velocity.
    """
    n = np.asarray(n, float)
    theta = np.asarray(theta, float)
    return -(n * (np.log(n) - 1.0) + 1.5 * n * (np.log(m / (2.0 * np.pi * theta)) - 1.0))
