"""Closed-form pairwise mixture quantities and their quadrature verification.

The pair equilibria of the multispecies relaxation operator are Maxwellians
with mixture velocity v_ij and temperature theta_ij chosen so that mass,
momentum and energy exchange between species i and j vanish identically.
This module provides those closed forms, the Maxwell-Stefan friction
coefficients of the diffusion limit, and a 3D-quadrature residual check that
verifies the exchange integrals actually vanish.
"""

from __future__ import annotations

import numpy as np

from .core import InvariantViolation, MixtureParams
from . import maxwellian

THETA_FORM_TOL = 1e-12


def _as2d(x):
    x = np.asarray(x, dtype=float)
    return (x[:, None], True) if x.ndim == 1 else (x, False)


def alphas_betas(nu_matrix, rho, n):
    """Mass- and number-weighted pair fractions.

    alpha_ij = nu_ij rho_i / (nu_ij rho_i + nu_ji rho_j) and beta_ij likewise
    with number densities; alpha_ij + alpha_ji = 1 row-consistently.
    Inputs (N,) or (N, C); outputs (N, N) or (N, N, C).
    """
    nu = np.asarray(nu_matrix, dtype=float)
    rho2, squeeze = _as2d(rho)
    n2, _ = _as2d(n)
    num_a = nu[:, :, None] * rho2[:, None, :]
    alpha = num_a / (num_a + np.swapaxes(num_a, 0, 1))
    num_b = nu[:, :, None] * n2[:, None, :]
    beta = num_b / (num_b + np.swapaxes(num_b, 0, 1))
    if squeeze:
        return alpha[..., 0], beta[..., 0]
    return alpha, beta


def mix_velocity(alpha, v):
    """Pair velocities v_ij = alpha_ij v_i + alpha_ji v_j (symmetric)."""
    a2 = alpha if alpha.ndim == 3 else alpha[..., None]
    v2, squeeze = _as2d(v)
    vm = a2 * v2[:, None, :] + np.swapaxes(a2, 0, 1) * v2[None, :, :]
    return vm[..., 0] if squeeze else vm


def mix_temperature(alpha, beta, m, theta, v, eps):
    """Pair temperatures theta_ij, manifestly positive form.

    theta_ij = beta_ij theta_i + beta_ji theta_j
               + (eps^2/3) alpha_ij alpha_ji (beta_ij m_i + beta_ji m_j) (v_i - v_j)^2

    The equivalent expansion through v_ij^2 differences is evaluated as a
    cross-check; disagreement beyond 1e-12 relative signals an implementation
    defect and raises.
    """
    a2 = alpha if alpha.ndim == 3 else alpha[..., None]
    b2 = beta if beta.ndim == 3 else beta[..., None]
    th2, squeeze = _as2d(theta)
    v2, _ = _as2d(v)
    m = np.asarray(m, dtype=float)

    at = np.swapaxes(a2, 0, 1)
    bt = np.swapaxes(b2, 0, 1)
    base = b2 * th2[:, None, :] + bt * th2[None, :, :]
    mw = b2 * m[:, None, None] + bt * m[None, :, None]
    dv = v2[:, None, :] - v2[None, :, :]
    tm = base + (eps * eps / 3.0) * a2 * at * mw * dv * dv

    # second form: velocity-square differences against v_ij
    vm = a2 * v2[:, None, :] + at * v2[None, :, :]
    tm_alt = base + (eps * eps / 3.0) * (
        b2 * m[:, None, None] * (v2[:, None, :] ** 2 - vm ** 2)
        + bt * m[None, :, None] * (v2[None, :, :] ** 2 - vm ** 2))

    scale = np.maximum(np.abs(tm), 1e-300)
    if np.max(np.abs(tm - tm_alt) / scale) > THETA_FORM_TOL:
        raise InvariantViolation("mixture temperature closed forms disagree beyond 1e-12")
    if np.any(tm <= 0):
        raise InvariantViolation("nonpositive mixture temperature")
    return tm[..., 0] if squeeze else tm


def ms_coefficients(nu_matrix, m, n):
    """Maxwell-Stefan friction coefficients.

    D_ij = nu_ij nu_ji m_i m_j / (nu_ij m_i n_i + nu_ji m_j n_j), symmetric.
    """
    nu = np.asarray(nu_matrix, dtype=float)
    m = np.asarray(m, dtype=float)
    n2, squeeze = _as2d(n)
    rho = m[:, None] * n2
    num = nu * np.swapaxes(nu, 0, 1) * (m[:, None] * m[None, :])
    den = nu[:, :, None] * rho[:, None, :] + np.swapaxes(nu, 0, 1)[:, :, None] * rho[None, :, :]
    D = num[:, :, None] / den
    return D[..., 0] if squeeze else D


def mean_velocity_bar(nu_matrix, alpha, v):
    """Frequency-weighted mean pair velocity.

    v_bar_i = sum_j nu_ij (alpha_ij v_i + alpha_ji v_j) / nu_i with
    nu_i = sum_j nu_ij.  Returns (v_bar, nu_i).
    """
    nu = np.asarray(nu_matrix, dtype=float)
    vm = mix_velocity(alpha, v)
    vm2 = vm if vm.ndim == 3 else vm[..., None]
    nu_i = np.sum(nu, axis=1)
    vbar = np.einsum("ij,ijc->ic", nu, vm2) / nu_i[:, None]
    return (vbar[:, 0], nu_i) if np.asarray(v).ndim == 1 else (vbar, nu_i)


def invariance_residuals(p: MixtureParams, n, v, theta, eps,
                         nnodes: int = 48, mix_temperature_factor: float = 1.0):
    """Exchange residuals of the pair-relaxation operator by 3D quadrature.

    For each ordered pair (i, j): the mass integral of nu_ij (M_ij - f_i)
    must vanish per species, and the momentum/energy integrals must vanish
    when summed with the (j, i) partner.  f_i is the Maxwellian with moments
    (n_i, eps v_i, theta_i); M_ij uses the closed-form (v_ij, theta_ij).
    Each Gaussian is integrated on its own tailored midpoint grid.

    Returns an array (3, N, N): normalized mass, momentum and energy
    residuals (diagonal zero; momentum/energy stored symmetrically).
    mix_temperature_factor rescales theta_ij, a sensitivity hook used to
    confirm the oracle detects wrong closures.
    """
    n = np.asarray(n, float)
    v = np.asarray(v, float)
    theta = np.asarray(theta, float)
    nu = p.nu_matrix
    rho = p.m * n
    alpha, beta = alphas_betas(nu, rho, n)
    vmix = mix_velocity(alpha, v)
    tmix = mix_temperature(alpha, beta, p.m, theta, v, eps) * mix_temperature_factor

    def gauss_moments(dens, vel1d, temp, mass):
        shift = np.array([vel1d, 0.0, 0.0])
        return maxwellian.maxwellian_moments_by_quadrature(dens, shift, temp, mass, nnodes=nnodes)

    f_mom = [gauss_moments(n[i], eps * v[i], theta[i], p.m[i]) for i in range(p.N)]
    res = np.zeros((3, p.N, p.N))
    for i in range(p.N):
        for j in range(p.N):
            if i == j:
                continue
            Mij = gauss_moments(n[i], eps * vmix[i, j], tmix[i, j], p.m[i])
            Mji = gauss_moments(n[j], eps * vmix[j, i], tmix[j, i], p.m[j])
            scale = nu[i, j] * n[i] * max(1.0, theta[i] / p.m[i])
            mass = nu[i, j] * (Mij.zeroth - f_mom[i].zeroth)
            mom = (p.m[i] * nu[i, j] * (Mij.first - f_mom[i].first)
                   + p.m[j] * nu[j, i] * (Mji.first - f_mom[j].first))
            ene = (p.m[i] * nu[i, j] * (Mij.second_trace - f_mom[i].second_trace)
                   + p.m[j] * nu[j, i] * (Mji.second_trace - f_mom[j].second_trace))
            res[0, i, j] = abs(mass) / scale
            res[1, i, j] = float(np.max(np.abs(mom))) / scale
            res[2, i, j] = abs(ene) / scale
    return res
