"""Full 3D-velocity-grid twins of both kinetic solvers.

These exist purely as oracles: the production solvers evolve the reduced pair
(G, H); these evolve f(x, xi1, xi2, xi3) on a tensor grid with the same
per-cell moment algebra, so extracted moments must agree to quadrature-tail
accuracy.  Layout: f[s, k1, k2, k3, c] with cells on the last axis.
"""

from __future__ import annotations

import numpy as np

from .core import Grid1D, InvariantViolation, MixtureParams, RegimeKind, VelocityGrid1D
from . import kinetic_brinkman as kb
from .kinetic_gk import advect_periodic, relax_moments_gk


def gauss1d(nodes: np.ndarray, shift, theta, m) -> np.ndarray:
    """Unit-mass 1D Gaussian factors, shape (K, C) for per-cell moments."""
    shift = np.atleast_1d(np.asarray(shift, float))
    theta = np.atleast_1d(np.asarray(theta, float))
    return (np.sqrt(m / (2.0 * np.pi * theta))[None, :]
            * np.exp(-0.5 * m * (nodes[:, None] - shift[None, :]) ** 2 / theta[None, :]))


def maxwellian3d(n, u1, theta, m, vgrid: VelocityGrid1D) -> np.ndarray:
    """Maxwellian with x-aligned mean velocity, shape (K, K, K, C)."""
    xi = vgrid.nodes
    gx = gauss1d(xi, u1, theta, m)
    gy = gauss1d(xi, np.zeros_like(np.atleast_1d(u1)), theta, m)
    return (np.atleast_1d(n)[None, :] * gx)[:, None, None, :] \
        * gy[None, :, None, :] * gy[None, None, :, :]


def moments3d(f: np.ndarray, vgrid: VelocityGrid1D):
    """(n, u1, e) per species and cell from the tensor samples."""
    w3 = vgrid.weight ** 3
    xi = vgrid.nodes
    n = w3 * np.einsum("sabcx->sx", f)
    if np.any(n <= 0):
        raise InvariantViolation("vacuum cell in 3D oracle")
    u1 = w3 * np.einsum("a,sabcx->sx", xi, f) / n
    sq = (xi ** 2)[:, None, None] + (xi ** 2)[None, :, None] + (xi ** 2)[None, None, :]
    e = w3 * np.einsum("abc,sabcx->sx", sq, f)
    return n, u1, e


def reduce_f(f: np.ndarray, vgrid: VelocityGrid1D):
    """Project tensor samples onto the reduced pair (G, H)."""
    w2 = vgrid.weight ** 2
    xi2 = vgrid.nodes ** 2
    G = w2 * np.einsum("sabcx->sax", f)
    H = w2 * (np.einsum("b,sabcx->sax", xi2, f) + np.einsum("c,sabcx->sax", xi2, f))
    return G, H


def init_state3d(n, v, theta, p: MixtureParams, vgrid: VelocityGrid1D,
                 shift_scale: float) -> np.ndarray:
    C = n.shape[1]
    K = vgrid.nnodes
    f = np.empty((p.N, K, K, K, C))
    for s in range(p.N):
        f[s] = maxwellian3d(n[s], shift_scale * v[s], theta[s], p.m[s], vgrid)
    return f


def _maxwellians3d(n, u, theta, p, vgrid):
    out = np.empty((p.N, vgrid.nnodes, vgrid.nnodes, vgrid.nnodes, n.shape[1]))
    for s in range(p.N):
        out[s] = maxwellian3d(n[s], u[s], theta[s], p.m[s], vgrid)
    return out


def gk3d_step(f: np.ndarray, p: MixtureParams, grid: Grid1D,
              vgrid: VelocityGrid1D, dt: float, limiter: str = "minmod") -> np.ndarray:
    """Strang step of the pair-relaxation model on the tensor grid."""
    eps = p.eps
    c = (vgrid.nodes / eps)[None, :, None, None, None]
    f = advect_periodic(f, c, 0.5 * dt, grid.dx, limiter)

    n, u, e = moments3d(f, vgrid)
    v = u / eps
    theta = p.m[:, None] * (e - n * u * u) / (3.0 * n)
    if np.any(theta <= 0):
        raise InvariantViolation("nonpositive temperature in 3D oracle")
    v_new, th_new, _ = relax_moments_gk(n, v, theta, p, eps, dt)
    nu_i = np.sum(p.nu_matrix, axis=1)
    kappa = np.exp(-nu_i * dt / (eps * eps))[:, None, None, None, None]
    f = _maxwellians3d(n, eps * v_new, th_new, p, vgrid) \
        + kappa * (f - _maxwellians3d(n, eps * v, theta, p, vgrid))

    return advect_periodic(f, c, 0.5 * dt, grid.dx, limiter)


def bb3d_step(f: np.ndarray, p: MixtureParams, grid: Grid1D, vgrid: VelocityGrid1D,
              dt: float, regime: RegimeKind = RegimeKind.DIFFUSIVE,
              limiter: str = "minmod") -> np.ndarray:
    """Strang step of the Brinkman-force model on the tensor grid."""
    eps = p.eps
    sig = float(np.sqrt(eps)) if regime == RegimeKind.HIGHFIELD else p.sigma
    c = (sig * vgrid.nodes / eps)[None, :, None, None, None]
    f = advect_periodic(f, c, 0.5 * dt, grid.dx, limiter)

    def theta_full():
        n, u, e = moments3d(f, vgrid)
        return n, u, p.m[:, None] * e / (3.0 * n)

    n, _, theta = theta_full()
    rho_theta = p.m[:, None] * n * theta
    phi = kb.brinkman_solve(-np.einsum("ij,jc->ic", p.a, rho_theta), eps, grid)
    force = kb.grad_centers(phi, grid) / eps

    def force_pass(tau):
        nonlocal f
        g = np.moveaxis(f, 1, -1)                    # (N, K, K, C, K1)
        cf = force[:, None, None, :, None]
        g, _ = kb.advect_zeroinflow(g, cf, tau, vgrid.weight, limiter)
        f = np.moveaxis(g, -1, 1)

    force_pass(0.5 * dt)
    n, _, theta = theta_full()
    kappa = np.exp(-sig * p.nu_vec * dt / (eps * eps))[:, None, None, None, None]
    fM = _maxwellians3d(n, np.zeros_like(n), theta, p, vgrid)
    f = fM + kappa * (f - fM)
    force_pass(0.5 * dt)

    return advect_periodic(f, c, 0.5 * dt, grid.dx, limiter)
