"""Finite-difference solver for the non-isothermal Maxwell-Stefan system.

    dt n_i + dx(n_i v_i) = 0
    dx(n_i theta) = -sum_j D_ij n_i n_j (v_i - v_j)
    (3/2) sum_i dt(n_i theta) + (5/2) sum_i dx{ n_i theta vbar_i
                                  - dx(n_i theta^2)/(m_i nu_i) } = 0

The friction system is singular with kernel (1,...,1); the right-hand side is
projected onto mean zero and the kernel mode fixed by zero barycentric
momentum sum rho_i v_i = 0 per face.  Mass and total thermal energy are
updated in conservative flux form with arithmetic face averages, which keeps
the mixture pressure sum n_i theta exactly uniform for symmetric data.
"""

from __future__ import annotations

import numpy as np

from .core import Grid1D, InvariantViolation, MacroStateMS, MixtureParams
from .diagnostics import neumaier_sum
from . import mixture

VSOLVE_TOL = 1e-12


def _face_avg(q):
    """Average onto face f between cells f and f+1 (periodic), last axis."""
    return 0.5 * (q + np.roll(q, -1, axis=-1))


def _face_diff(q, dx):
    return (np.roll(q, -1, axis=-1) - q) / dx


def solve_velocities(n_face: np.ndarray, theta_face: np.ndarray,
                     grad_p: np.ndarray, p: MixtureParams):
    """Species velocities per face from the friction balance.

    grad_p holds the raw pressure gradients dx(n_i theta) per face; the system
        sum_j D_ij n_i n_j (v_i - v_j) = -grad_p_i
    is solved after projecting grad_p onto sum_i = 0 (the continuous
    solvability condition holds only approximately on a grid), with the
    bordered closure sum_i rho_i v_i = 0.
    """
    N, F = n_face.shape
    D = mixture.ms_coefficients(p.nu_matrix, p.m, n_face)       # (N, N, F)
    nn = n_face[:, None, :] * n_face[None, :, :]
    W = D * nn                                                   # D_ij n_i n_j
    A = -np.transpose(W, (2, 0, 1)).copy()
    diag = np.sum(np.transpose(W, (2, 0, 1)), axis=2)
    A[:, np.arange(N), np.arange(N)] += diag

    g = -(grad_p - np.mean(grad_p, axis=0, keepdims=True))       # projected RHS
    rho = p.m[:, None] * n_face

    # bordered system [[A, rho],[rho^T, 0]] [v; lam] = [g; 0]
    B = np.zeros((F, N + 1, N + 1))
    B[:, :N, :N] = A
    B[:, :N, N] = rho.T
    B[:, N, :N] = rho.T
    rhs = np.zeros((F, N + 1))
    rhs[:, :N] = g.T
    try:
        sol = np.linalg.solve(B, rhs[:, :, None])[:, :, 0]
    except np.linalg.LinAlgError as exc:
        raise InvariantViolation(f"singular Maxwell-Stefan bordered system: {exc}")
    v = sol[:, :N].T

    resid = np.einsum("fij,jf->if", A, v) - g
    scale = max(np.max(np.abs(g)), 1.0)
    if np.max(np.abs(resid)) > VSOLVE_TOL * scale:
        raise InvariantViolation("Maxwell-Stefan velocity solve residual too large")
    return v


def face_velocities(state: MacroStateMS, p: MixtureParams, grid: Grid1D):
    n_face = _face_avg(state.n)
    theta_face = _face_avg(state.theta)
    grad_p = _face_diff(state.n * state.theta[None, :], grid.dx)
    return n_face, theta_face, solve_velocities(n_face, theta_face, grad_p, p)


def ms_cfl_dt(state: MacroStateMS, p: MixtureParams, grid: Grid1D,
              safety: float = 1.0) -> float:
    """Diffusive time-step bound, plus an advective bound from the current v."""
    nu_i = np.sum(p.nu_matrix, axis=1)
    dt = 0.4 * grid.dx ** 2 * float(np.min(p.m * nu_i)) / (5.0 * float(np.max(state.theta)))
    # mass cross-diffusion estimate: theta / (sum_j D_ij n_j)
    D = mixture.ms_coefficients(p.nu_matrix, p.m, state.n)
    dmass = float(np.max(state.theta) / np.min(np.einsum("ijc->ic", D * state.n[None, :, :])))
    dt = min(dt, 0.4 * grid.dx ** 2 / dmass)
    _, _, v = face_velocities(state, p, grid)
    vmax = float(np.max(np.abs(v)))
    if vmax > 0:
        dt = min(dt, 0.9 * grid.dx / vmax)
    return safety * dt


def ms_step(state: MacroStateMS, p: MixtureParams, grid: Grid1D, dt: float) -> MacroStateMS:
    """One conservative step; raises (step rejected) on lost positivity."""
    dx = grid.dx
    n_face, theta_face, v = face_velocities(state, p, grid)

    flux_n = n_face * v
    n_new = state.n - (dt / dx) * (flux_n - np.roll(flux_n, 1, axis=-1))

    rho_face = p.m[:, None] * n_face
    alpha, _ = mixture.alphas_betas(p.nu_matrix, rho_face, n_face)
    vbar, nu_i = mixture.mean_velocity_bar(p.nu_matrix, alpha, v)

    ntheta_face = _face_avg(state.n * state.theta[None, :])
    diff = _face_diff(state.n * state.theta[None, :] ** 2, dx) / (p.m * nu_i)[:, None]
    flux_E = 2.5 * np.sum(ntheta_face * vbar - diff, axis=0)

    E = 1.5 * np.sum(state.n, axis=0) * state.theta
    E_new = E - (dt / dx) * (flux_E - np.roll(flux_E, 1, axis=-1))

    if np.any(n_new <= 0):
        cell = int(np.argmax(np.any(n_new <= 0, axis=0)))
        raise InvariantViolation(f"negative density in cell {cell} (step rejected)")
    theta_new = E_new / (1.5 * np.sum(n_new, axis=0))
    if np.any(theta_new <= 0):
        cell = int(np.argmax(theta_new <= 0))
        raise InvariantViolation(f"negative temperature in cell {cell} (step rejected)")

    v_cells = 0.5 * (v + np.roll(v, 1, axis=-1))
    return MacroStateMS(n=n_new, v=v_cells, theta=theta_new)


def ms_entropy(state: MacroStateMS, p: MixtureParams, grid: Grid1D) -> float:
    """H0 = -sum_i int { n_i(log n_i - 1) + (3/2) n_i (log(m_i/2 pi theta) - 1) } dx."""
    if np.any(state.n <= 0) or np.any(state.theta <= 0):
        raise InvariantViolation("entropy needs positive density and temperature")
    integ = (state.n * (np.log(state.n) - 1.0)
             + 1.5 * state.n * (np.log(p.m[:, None] / (2.0 * np.pi * state.theta[None, :])) - 1.0))
    return -neumaier_sum(integ) * grid.dx


def entropy_production(state: MacroStateMS, p: MixtureParams, grid: Grid1D):
    """Pointwise (per-face) entropy production of the dissipation identity.

        (1/2 theta) sum_ij D_ij n_i n_j |v_i - v_j|^2
        + (5/2) sum_i (n_i / theta) |dx theta|^2        (valid for m_i nu_i = 1)

    Returns (integrand per face, integral)."""
    n_face, theta_face, v = face_velocities(state, p, grid)
    D = mixture.ms_coefficients(p.nu_matrix, p.m, n_face)
    dv = v[:, None, :] - v[None, :, :]
    nn = n_face[:, None, :] * n_face[None, :, :]
    fric = 0.5 / theta_face * np.einsum("ijf->f", D * nn * dv * dv)
    gtheta = _face_diff(state.theta, grid.dx)
    heat = 2.5 * np.sum(n_face, axis=0) / theta_face * gtheta * gtheta
    integrand = fric + heat
    return integrand, neumaier_sum(integrand) * grid.dx


def check_unit_m_nu(p: MixtureParams, tol: float = 1e-12):
    nu_i = np.sum(p.nu_matrix, axis=1)
    if np.max(np.abs(p.m * nu_i - 1.0)) > tol:
        raise InvariantViolation("hypothesis violated: m_i nu_i != 1")


def ms_entropy_identity_residual(samples, p: MixtureParams, grid: Grid1D) -> float:
    """Max relative defect of dH0/dt against the dissipation integral.

    samples: list of (t, MacroStateMS) at uniform spacing; dH0/dt uses the
    centered difference, the dissipation is evaluated at the middle sample.
    Requires m_i nu_i = 1.
    """
    check_unit_m_nu(p)
    if len(samples) < 3:
        raise InvariantViolation("need at least 3 trajectory samples")
    worst = 0.0
    for k in range(1, len(samples) - 1):
        t_prev, s_prev = samples[k - 1]
        t_mid, s_mid = samples[k]
        t_next, s_next = samples[k + 1]
        dH = (ms_entropy(s_next, p, grid) - ms_entropy(s_prev, p, grid)) / (t_next - t_prev)
        integrand, rhs = entropy_production(s_mid, p, grid)
        if np.any(integrand < -1e-14):
            raise InvariantViolation("negative entropy-production integrand")
        worst = max(worst, abs(dH - rhs) / max(abs(rhs), 1e-300))
    return worst


def run_ms(state: MacroStateMS, p: MixtureParams, grid: Grid1D, t_end: float,
           sample_every: int = 0, dt_fixed: float | None = None):
    """Advance to t_end; returns (state, samples) with samples [(t, state), ...]."""
    t = 0.0
    samples = [(0.0, state.copy())]
    step = 0
    while t < t_end * (1.0 - 1e-12):
        dt = dt_fixed if dt_fixed is not None else ms_cfl_dt(state, p, grid)
        dt = min(dt, t_end - t)
        state = ms_step(state, p, grid, dt)
        t += dt
        step += 1
        if sample_every and step % sample_every == 0:
            samples.append((t, state.copy()))
    samples.append((t, state.copy()))
    return state, samples
