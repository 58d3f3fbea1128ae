"""Discrete-velocity solver for the multispecies pair-relaxation kinetic model.

Scaled equations (diffusive scaling, small parameter eps):

    dt f_i = -(xi/eps) dx f_i + (1/eps^2) sum_j nu_ij (M_ij - f_i)

advanced by Strang splitting: half transport, full stiff relaxation, half
transport.  The relaxation substep solves the per-cell moment exchange ODE by
backward Euler (conserving total momentum and kinetic energy identically) and
then decays the non-Maxwellian part of the reduced pair at rate nu_i/eps^2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Grid1D, InvariantViolation, KineticState, MixtureParams, VelocityGrid1D
from .diagnostics import neumaier_sum
from . import maxwellian, mixture

CFL_MAX = 0.9
RELAX_TOL = 1e-12
RELAX_MAX_ITER = 50


@dataclass
class GKStepReport:
    dt: float
    masses: np.ndarray      # per-species m_i * int n_i dx
    momentum: float         # sum_i int rho_i v_i dx
    energy: float           # sum_i (m_i/2) int int f_i |xi|^2
    entropy: float          # kinetic H
    max_subiters: int


def minmod(a, b):
    return 0.5 * (np.sign(a) + np.sign(b)) * np.minimum(np.abs(a), np.abs(b))


def advect_periodic(u, c, dt, dx, limiter: str = "minmod"):
    """Second-order flux-limited (MUSCL, minmod) advection, periodic in x.

    u has cells on the last axis; c is a scalar or broadcasts against the
    leading axes.  Exact at unit CFL; conservative (fluxes telescope).
    limiter="none" gives unlimited Lax-Wendroff, which is linear in u and
    therefore commutes exactly with the transverse-velocity reduction (used
    by the full-3D equivalence oracle).
    """
    a = c * dt / dx
    d = np.roll(u, -1, axis=-1) - u                  # forward difference at i+1/2
    if limiter == "none":
        F = 0.5 * c * (u + np.roll(u, -1, axis=-1)) - 0.5 * c * a * d
    else:
        s = minmod(np.roll(d, 1, axis=-1), d)        # limited slope of cell i
        f_pos = c * (u + 0.5 * (1.0 - a) * s)
        f_neg = c * (np.roll(u, -1, axis=-1) - 0.5 * (1.0 + a) * np.roll(s, -1, axis=-1))
        F = np.where(np.broadcast_to(c, u.shape) > 0, f_pos, f_neg)
    return u - (dt / dx) * (F - np.roll(F, 1, axis=-1))


def transport_substep(state: KineticState, grid: Grid1D, vgrid: VelocityGrid1D,
                      eps: float, dt: float, limiter: str = "minmod") -> None:
    """Advect G and H in place at per-node speed xi_k/eps."""
    c = (vgrid.nodes / eps)[None, :, None]
    if np.max(np.abs(c)) * dt / grid.dx > 1.0 + 1e-9:
        raise InvariantViolation("CFL violation in transport substep")
    state.G = advect_periodic(state.G, c, dt, grid.dx, limiter)
    state.H = advect_periodic(state.H, c, dt, grid.dx, limiter)


def extract_moments(state: KineticState, vgrid: VelocityGrid1D, p: MixtureParams,
                    eps: float):
    """(n, v, theta) per species and cell; v carries the 1/eps moment factor."""
    n, u, theta = maxwellian.reduced_moments(state.G, state.H, vgrid, p.m[:, None])
    if np.any(theta <= 0):
        raise InvariantViolation("nonpositive temperature in moment extraction")
    return n, u / eps, theta


def relax_moments_gk(n, v, theta, p: MixtureParams, eps: float, dt: float,
                     tol: float = RELAX_TOL, max_iter: int = RELAX_MAX_ITER):
    """Backward-Euler solve of the per-cell momentum/energy exchange ODE.

        dv_i/dt = (1/eps^2) sum_j nu_ij alpha_ji (v_j - v_i)
        de_i/dt = (1/eps^2) sum_j nu_ij [(3n_i/m_i) theta_ij + eps^2 n_i v_ij^2 - e_i]

    with e_i = 3 n_i theta_i / m_i + eps^2 n_i v_i^2 the raw second moment and
    the pair closures evaluated at the end-of-step state.  The implicit system
    is linear (alpha, beta depend only on the unchanged densities): total
    momentum sum rho_i v_i and total energy sum m_i e_i are conserved
    identically at the fixed point.  Densities are unchanged.

    Returns (v', theta', iterations).
    """
    n = np.asarray(n, float)
    v = np.asarray(v, float)
    theta = np.asarray(theta, float)
    N, C = n.shape
    nu = p.nu_matrix
    m = p.m
    c1 = dt / (eps * eps)
    rho = m[:, None] * n
    alpha, beta = mixture.alphas_betas(nu, rho, n)     # (N, N, C)
    nu_i = np.sum(nu, axis=1)

    # velocity solve: (I - c1 K) v' = v with K[i,j] = nu_ij alpha_ji off-diagonal
    W = nu[:, :, None] * np.swapaxes(alpha, 0, 1)      # (N, N, C)
    K = np.transpose(W, (2, 0, 1)).copy()
    rowsum = np.sum(K, axis=2)
    K[:, np.arange(N), np.arange(N)] -= rowsum
    A1 = np.eye(N)[None, :, :] - c1 * K

    # temperature system matrix: (1 + c1 nu_i) I - c1 G with
    # G[i,i] = sum_j nu_ij beta_ij + nu_ii beta_ii, G[i,j] = nu_ij beta_ji
    Gmat = np.transpose(nu[:, :, None] * np.swapaxes(beta, 0, 1), (2, 0, 1)).copy()
    gdiag = np.sum(np.transpose(nu[:, :, None] * beta, (2, 0, 1)), axis=2)
    Gmat[:, np.arange(N), np.arange(N)] += gdiag
    A2 = np.eye(N)[None, :, :] * (1.0 + c1 * nu_i)[None, :, None] - c1 * Gmat

    v_new, th_new = v, theta
    iters = 0
    for iters in range(1, max_iter + 1):
        v_prev, th_prev = v_new, th_new
        v_new = np.linalg.solve(A1, v.T[:, :, None])[:, :, 0].T
        vm = mixture.mix_velocity(alpha, v_new)        # (N, N, C)
        at = np.swapaxes(alpha, 0, 1)
        bt = np.swapaxes(beta, 0, 1)
        mw = beta * m[:, None, None] + bt * m[None, :, None]
        dv = v_new[:, None, :] - v_new[None, :, :]
        T_pair = (eps * eps / 3.0) * alpha * at * mw * dv * dv
        Tbar = np.einsum("ijc->ic", nu[:, :, None] * T_pair)
        q = np.einsum("ijc->ic", nu[:, :, None] * (vm * vm - (v_new * v_new)[:, None, :]))
        em3 = (eps * eps / 3.0) * m[:, None]
        rhs = theta - em3 * (v_new * v_new - v * v) + c1 * (Tbar + em3 * q)
        th_new = np.linalg.solve(A2, rhs.T[:, :, None])[:, :, 0].T
        inc = max(np.max(np.abs(v_new - v_prev)), np.max(np.abs(th_new - th_prev)))
        if iters > 1 and inc <= tol:
            break
    else:
        cell = int(np.argmax(np.abs(th_new - th_prev).max(axis=0)))
        raise InvariantViolation(f"relaxation fixed point not converged in cell {cell}")
    if np.any(th_new <= 0):
        cell = int(np.argmax(np.any(th_new <= 0, axis=0)))
        raise InvariantViolation(f"nonpositive relaxed temperature in cell {cell}")
    return v_new, th_new, iters


def _maxwellian_pair_all(n, u, theta, p, vgrid):
    G = np.empty((p.N, vgrid.nnodes, n.shape[1]))
    H = np.empty_like(G)
    for s in range(p.N):
        G[s], H[s] = maxwellian.reduced_maxwellian_pair(n[s], u[s], theta[s], p.m[s], vgrid)
    return G, H


def relax_substep(state: KineticState, p: MixtureParams, grid: Grid1D,
                  vgrid: VelocityGrid1D, dt: float) -> int:
    """Stiff relaxation over dt: conservative moment solve plus decay of the
    non-Maxwellian deviation, G <- G_M(relaxed) + kappa (G - G_M(pre))."""
    eps = p.eps
    n, v, theta = extract_moments(state, vgrid, p, eps)
    v_new, th_new, iters = relax_moments_gk(n, v, theta, p, eps, dt)
    nu_i = np.sum(p.nu_matrix, axis=1)
    kappa = np.exp(-nu_i * dt / (eps * eps))[:, None, None]
    G_pre, H_pre = _maxwellian_pair_all(n, eps * v, theta, p, vgrid)
    G_tgt, H_tgt = _maxwellian_pair_all(n, eps * v_new, th_new, p, vgrid)
    state.G = G_tgt + kappa * (state.G - G_pre)
    state.H = H_tgt + kappa * (state.H - H_pre)
    state.n, state.v, state.theta = n, v_new, th_new
    return iters


def kinetic_entropy(G, H, vgrid: VelocityGrid1D, grid: Grid1D, m) -> float:
    """Kinetic entropy -sum_i int int f (log f - 1) of the reduced pair.

    The transverse directions are closed with a Maxwellian of temperature
    m H/(2G) per node (exact at equilibrium), which collapses the integrand to
    G (log(G^2/(pi H)) - 2).
    """
    if np.any(G <= 0):
        raise InvariantViolation("nonpositive G at a quadrature node")
    if np.any(H <= 0):
        raise InvariantViolation("nonpositive transverse moment H")
    integrand = G * (np.log(G * G / (np.pi * H)) - 2.0)
    return -vgrid.weight * grid.dx * neumaier_sum(integrand)


def gk_step(state: KineticState, p: MixtureParams, grid: Grid1D,
            vgrid: VelocityGrid1D, dt: float, limiter: str = "minmod") -> GKStepReport:
    """One Strang step; mutates state and returns conserved-quantity report."""
    eps = p.eps
    if dt > CFL_MAX * eps * grid.dx / vgrid.xi_max * (1.0 + 1e-12):
        raise InvariantViolation(
            f"CFL violation: dt={dt} exceeds {CFL_MAX} eps dx / xi_max")
    transport_substep(state, grid, vgrid, eps, 0.5 * dt, limiter)
    iters = relax_substep(state, p, grid, vgrid, dt)
    transport_substep(state, grid, vgrid, eps, 0.5 * dt, limiter)

    n, v, theta = extract_moments(state, vgrid, p, eps)
    state.n, state.v, state.theta = n, v, theta
    dx = grid.dx
    masses = np.array([p.m[s] * neumaier_sum(n[s]) * dx for s in range(p.N)])
    momentum = neumaier_sum(p.m[:, None] * n * v) * dx
    e_raw = maxwellian.reduced_second_moment(state.G, state.H, vgrid)
    energy = neumaier_sum(0.5 * p.m[:, None] * e_raw) * dx
    ent = kinetic_entropy(state.G, state.H, vgrid, grid, p.m)
    return GKStepReport(dt=dt, masses=masses, momentum=momentum,
                        energy=energy, entropy=ent, max_subiters=iters)


def suggested_dt(p: MixtureParams, grid: Grid1D, vgrid: VelocityGrid1D,
                 cfl: float = CFL_MAX) -> float:
    return cfl * p.eps * grid.dx / vgrid.xi_max
