"""Finite-difference solver for the generalized Busenberg-Travis system.

Modes:
  NONISOTHERMAL  full system of mass + per-species energy equations,
                   J_i = -(1/nu_i){ sigma dx(rho_i theta_i / m_i) - rho_i dx phi_i },
                   (3/2) dt(rho_i theta_i / m_i) =
                     (5/2) dx{ (sigma/nu_i) dx(rho_i theta_i^2 / m_i^2)
                               - (rho_i theta_i/(nu_i m_i)) dx phi_i }
                     + (1/sigma) J_i dx phi_i          (Joule heating)
  ISOTHERMAL     theta_i frozen at 1, mass equation only (sigma > 0)
  CLASSICAL      sigma = 0 segregation model (canonically a_ij = 1)
  HIGHFIELD      sigma = 0 limit of the high-field scaling, theta frozen at 1

phi_i = -sum_j a_ij rho_j theta_j is local (no elliptic regularization in the
limit system).  sigma = 0 modes use face-upwinded mobility; sigma > 0 modes
use centered fluxes with arithmetic face averages.
"""

from __future__ import annotations

import enum

import numpy as np

from .core import Grid1D, InvariantViolation, MacroStateBT, MixtureParams
from .diagnostics import neumaier_sum


class BTMode(enum.Enum):
    NONISOTHERMAL = "nonisothermal"
    ISOTHERMAL = "isothermal"
    CLASSICAL = "classical"
    HIGHFIELD = "highfield"


def _face_avg(q):
    return 0.5 * (q + np.roll(q, -1, axis=-1))


def _face_diff(q, dx):
    return (np.roll(q, -1, axis=-1) - q) / dx


def _div(face_flux, dx):
    return (face_flux - np.roll(face_flux, 1, axis=-1)) / dx


def local_potential(rho: np.ndarray, theta: np.ndarray, a: np.ndarray) -> np.ndarray:
    """phi_i(x) = -sum_j a_ij rho_j(x) theta_j(x) pointwise."""
    return -np.einsum("ij,jc->ic", a, rho * theta)


def check_psd(mat: np.ndarray, what: str, tol: float = 1e-12):
    sym = 0.5 * (mat + mat.T)
    if np.min(np.linalg.eigvalsh(sym)) < -tol:
        raise InvariantViolation(f"{what}: symmetric part not positive semidefinite")


def mass_fluxes(state: MacroStateBT, p: MixtureParams, grid: Grid1D, mode: BTMode,
                phi: np.ndarray):
    """Per-face species fluxes J_i; sign convention dt rho_i = -dx J_i."""
    dx = grid.dx
    nu = p.nu_vec[:, None]
    sigma = 0.0 if mode in (BTMode.CLASSICAL, BTMode.HIGHFIELD) else p.sigma
    gphi = _face_diff(phi, dx)
    if mode in (BTMode.CLASSICAL, BTMode.HIGHFIELD):
        # upwind the mobility rho_i/nu_i by the sign of the drift -dx phi... note
        # J_i = rho_i V_i with V_i = (1/nu_i) dx phi_i (phi = -interaction pressure)
        vel = gphi / nu
        rho_up = np.where(vel > 0, state.rho, np.roll(state.rho, -1, axis=-1))
        return rho_up * vel
    w = state.rho * state.theta / p.m[:, None]
    return -(sigma * _face_diff(w, dx) - _face_avg(state.rho) * gphi) / nu


def bt_step(state: MacroStateBT, p: MixtureParams, grid: Grid1D, dt: float,
            mode: BTMode = BTMode.ISOTHERMAL) -> MacroStateBT:
    """One conservative step; raises (step rejected) on lost positivity."""
    dx = grid.dx
    theta = state.theta if mode == BTMode.NONISOTHERMAL else np.ones_like(state.theta)
    phi = local_potential(state.rho, theta, p.a)
    J = mass_fluxes(MacroStateBT(state.rho, theta), p, grid, mode, phi)
    rho_new = state.rho - dt * _div(J, dx)
    if np.any(rho_new <= 0):
        cell = int(np.argmax(np.any(rho_new <= 0, axis=-1)))
        raise InvariantViolation(f"negative density in cell {cell} (step rejected)")

    if mode != BTMode.NONISOTHERMAL:
        return MacroStateBT(rho=rho_new, theta=np.ones_like(state.theta), phi=phi)

    nu = p.nu_vec[:, None]
    m = p.m[:, None]
    gphi_face = _face_diff(phi, dx)
    diff_flux = (p.sigma / nu) * _face_diff(state.rho * theta * theta / (m * m), dx)
    conv_flux = _face_avg(state.rho * theta / m) / nu * gphi_face
    J_cells = 0.5 * (J + np.roll(J, 1, axis=-1))
    gphi_cells = 0.5 * (gphi_face + np.roll(gphi_face, 1, axis=-1))
    joule = J_cells * gphi_cells / p.sigma
    w = state.rho * theta / m
    w_new = w + dt * (2.0 / 3.0) * (2.5 * _div(diff_flux - conv_flux, dx) + joule)
    theta_new = w_new * m / rho_new
    if np.any(theta_new <= 0):
        cell = int(np.argmax(np.any(theta_new <= 0, axis=-1)))
        raise InvariantViolation(f"negative temperature in cell {cell} (step rejected)")
    return MacroStateBT(rho=rho_new, theta=theta_new, phi=phi)


def bt_cfl_dt(state: MacroStateBT, p: MixtureParams, grid: Grid1D, mode: BTMode,
              safety: float = 1.0) -> float:
    """Diffusive bound 0.4 dx^2 / max diffusion coefficient for the mode.

    Self part sigma theta/(nu m) (widened for the energy equation), cross part
    (rho_i/nu_i) sum_j |a_ij| theta_j from the drift down the interaction
    pressure gradient."""
    theta = state.theta if mode == BTMode.NONISOTHERMAL else np.ones_like(state.theta)
    nu = p.nu_vec[:, None]
    m = p.m[:, None]
    sigma = 0.0 if mode in (BTMode.CLASSICAL, BTMode.HIGHFIELD) else p.sigma
    energy_factor = 10.0 / 3.0 if mode == BTMode.NONISOTHERMAL else 1.0
    d_self = energy_factor * sigma * theta / (nu * m)
    d_cross = (state.rho / nu) * np.einsum("ij,jc->ic", np.abs(p.a), theta)
    if mode == BTMode.NONISOTHERMAL:
        d_cross = d_cross * float(np.max(theta))
    dmax = float(np.max(d_self + d_cross))
    return safety * 0.4 * grid.dx ** 2 / max(dmax, 1e-300)


def bt_advance(state: MacroStateBT, p: MixtureParams, grid: Grid1D, dt: float,
               mode: BTMode, max_halvings: int = 10) -> MacroStateBT:
    """Advance by dt; on positivity rejection retry with halved sub-steps."""
    for k in range(max_halvings + 1):
        sub = 2 ** k
        try:
            s = state
            for _ in range(sub):
                s = bt_step(s, p, grid, dt / sub, mode)
            return s
        except InvariantViolation:
            if k == max_halvings:
                raise
    raise AssertionError("unreachable")


def bt_entropy(state: MacroStateBT, p: MixtureParams, grid: Grid1D) -> float:
    """H0 with per-species temperatures (n_i = rho_i / m_i)."""
    n = state.rho / p.m[:, None]
    if np.any(n <= 0) or np.any(state.theta <= 0):
        raise InvariantViolation("entropy needs positive density and temperature")
    integ = (n * (np.log(n) - 1.0)
             + 1.5 * n * (np.log(p.m[:, None] / (2.0 * np.pi * state.theta)) - 1.0))
    return -neumaier_sum(integ) * grid.dx


def bt_entropy_production(state: MacroStateBT, p: MixtureParams, grid: Grid1D):
    """Per-face integrand and integral of the dissipation identity RHS.

        sum_i (1/nu_i)[ (sigma/m_i^2)|dx(rho_i theta_i)|^2/(rho_i theta_i)
                        + (5/2)(sigma/m_i^2)(rho_i/theta_i)|dx theta_i|^2
                        + (1/sigma)(rho_i/theta_i)|dx phi_i|^2 ]
        + 2 sum_ij (a_ij/(m_i nu_i theta_i)) dx(rho_i theta_i) . dx(rho_j theta_j)
    """
    dx = grid.dx
    nu = p.nu_vec[:, None]
    m = p.m[:, None]
    rt = state.rho * state.theta
    g_rt = _face_diff(rt, dx)
    g_th = _face_diff(state.theta, dx)
    phi = local_potential(state.rho, state.theta, p.a)
    g_phi = _face_diff(phi, dx)
    rho_f = _face_avg(state.rho)
    th_f = _face_avg(state.theta)
    rt_f = _face_avg(rt)
    term = (1.0 / nu) * ((p.sigma / m ** 2) * g_rt * g_rt / rt_f
                         + 2.5 * (p.sigma / m ** 2) * (rho_f / th_f) * g_th * g_th
                         + (1.0 / p.sigma) * (rho_f / th_f) * g_phi * g_phi)
    coup = np.einsum("ij,if,jf->f", p.a, g_rt / (m * nu * th_f), g_rt)
    integrand = np.sum(term, axis=0) + 2.0 * coup
    return integrand, neumaier_sum(integrand) * grid.dx


def bt_entropy_identity_residual(samples, p: MixtureParams, grid: Grid1D) -> float:
    """Max relative defect of dH0/dt against the dissipation integral.

    Hypothesis checked pointwise along the window: the symmetric part of
    (a_ij / (m_i nu_i theta_i)) must be positive semidefinite.
    """
    if len(samples) < 3:
        raise InvariantViolation("need at least 3 trajectory samples")
    worst = 0.0
    for k in range(1, len(samples) - 1):
        t_prev, s_prev = samples[k - 1]
        _, s_mid = samples[k]
        t_next, s_next = samples[k + 1]
        denom = ((p.m * p.nu_vec)[:, None] * s_mid.theta).T        # (C, N)
        mats = p.a[None, :, :] / denom[:, :, None]
        sym = 0.5 * (mats + np.transpose(mats, (0, 2, 1)))
        if np.min(np.linalg.eigvalsh(sym)) < -1e-12:
            raise InvariantViolation("hypothesis violated: a_ij/(m_i nu_i theta_i) not PSD")
        dH = (bt_entropy(s_next, p, grid) - bt_entropy(s_prev, p, grid)) / (t_next - t_prev)
        _, rhs = bt_entropy_production(s_mid, p, grid)
        worst = max(worst, abs(dH - rhs) / max(1.0, abs(rhs)))
    return worst


def rao_entropy(state: MacroStateBT, p: MixtureParams, grid: Grid1D) -> float:
    """E_R = (1/2) sum_ij int a_ij rho_i rho_j dx."""
    return 0.5 * neumaier_sum(np.einsum("ij,ic,jc->c", p.a, state.rho, state.rho)) * grid.dx


def rao_dissipation(state: MacroStateBT, p: MixtureParams, grid: Grid1D) -> float:
    """Closed-form dE_R/dt of the isothermal system:

        -sigma sum_ij int (a_ij/(m_i nu_i)) dx rho_i dx rho_j
        - sum_i int (rho_i/nu_i) (sum_j a_ij dx rho_j)^2
    """
    dx = grid.dx
    g = _face_diff(state.rho, dx)
    t1 = np.einsum("ij,if,jf->f", p.a / (p.m * p.nu_vec)[:, None], g, g)
    s = np.einsum("ij,jf->if", p.a, g)
    t2 = np.einsum("if,if->f", _face_avg(state.rho) / p.nu_vec[:, None], s * s)
    return float(-(p.sigma * neumaier_sum(t1) + neumaier_sum(t2)) * dx)


def rao_entropy_trajectory(samples, p: MixtureParams, grid: Grid1D):
    """E_R series with monotonicity and dissipation checks (isothermal mode).

    Preconditions: a symmetric positive definite, m_i nu_i = 1.  Returns
    (times, E_R values, max relative defect of centered dE_R/dt vs closed form).
    """
    if np.max(np.abs(p.a - p.a.T)) > 1e-14:
        raise InvariantViolation("hypothesis violated: a not symmetric")
    if np.min(np.linalg.eigvalsh(0.5 * (p.a + p.a.T))) <= 0:
        raise InvariantViolation("hypothesis violated: a not positive definite")
    if np.max(np.abs(p.m * p.nu_vec - 1.0)) > 1e-12:
        raise InvariantViolation("hypothesis violated: m_i nu_i != 1")
    times = np.array([t for t, _ in samples])
    values = np.array([rao_entropy(s, p, grid) for _, s in samples])
    if np.any(np.diff(values) > 1e-10 * np.abs(values[:-1])):
        raise InvariantViolation("Rao entropy increased beyond tolerance")
    worst = 0.0
    for k in range(1, len(samples) - 1):
        dE = (values[k + 1] - values[k - 1]) / (times[k + 1] - times[k - 1])
        rhs = rao_dissipation(samples[k][1], p, grid)
        worst = max(worst, abs(dE - rhs) / max(abs(rhs), 1e-300))
    return times, values, worst


def run_bt(state: MacroStateBT, p: MixtureParams, grid: Grid1D, t_end: float,
           mode: BTMode, sample_every: int = 0, dt_fixed: float | None = None):
    if mode in (BTMode.CLASSICAL, BTMode.HIGHFIELD):
        # sigma = 0 removes the regularizing Laplacian: well-posedness needs
        # the symmetric part of the interaction matrix to be PSD
        check_psd(p.a, "interaction matrix (sigma = 0 mode)")
    t = 0.0
    samples = [(0.0, state.copy())]
    step = 0
    while t < t_end * (1.0 - 1e-12):
        dt = dt_fixed if dt_fixed is not None else bt_cfl_dt(state, p, grid, mode)
        dt = min(dt, t_end - t)
        state = bt_advance(state, p, grid, dt, mode)
        t += dt
        step += 1
        if sample_every and step % sample_every == 0:
            samples.append((t, state.copy()))
    samples.append((t, state.copy()))
    return state, samples
