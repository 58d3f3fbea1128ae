import numpy as np
import pytest

from mbgk.core import Grid1D, InvariantViolation, MacroStateBT, MixtureParams
from mbgk import macro_bt as bt
from mbgk.macro_bt import BTMode


def _mix(a, sigma=1.0, nu=(1.0, 1.0), m=(1.0, 1.0), N=2):
    return MixtureParams(N=N, m=np.array(m), nu_vec=np.array(nu),
                         a=np.asarray(a, float), eps=0.1, sigma=sigma)


def test_local_potential_cases():
    assert np.all(bt.local_potential(np.zeros((2, 4)), np.ones((2, 4)),
                                     np.zeros((2, 2))) == 0.0)
    phi = bt.local_potential(np.array([[2.0]]), np.array([[3.0]]), np.array([[1.0]]))
    assert phi[0, 0] == -6.0
    a = np.array([[1.0, 0.5], [0.25, 1.0]])
    rho = np.array([[1.0, 2.0], [0.5, 0.25]])
    th = np.ones((2, 2))
    assert np.allclose(bt.local_potential(2 * rho, th, a),
                       2 * bt.local_potential(rho, th, a), rtol=0, atol=1e-15)


def test_uniform_stationary_all_modes():
    grid = Grid1D(L=1.0, ncells=32)
    p = _mix([[1.0, 0.3], [0.3, 1.0]])
    st = MacroStateBT(rho=np.stack([np.full(32, 1.2), np.full(32, 0.7)]),
                      theta=np.full((2, 32), 1.1))
    for mode in BTMode:
        thf = st.theta if mode == BTMode.NONISOTHERMAL else np.ones((2, 32))
        out = bt.bt_step(MacroStateBT(st.rho.copy(), thf.copy()), p, grid, 1e-5, mode)
        assert np.max(np.abs(out.rho - st.rho)) == 0.0


def test_isothermal_heat_equation_decay():
    # N=1, a=0: dt rho = (sigma/(nu m)) dxx rho; cosine decays at
    # sigma (2 pi / L)^2 / (nu m) within 2%
    grid = Grid1D(L=1.0, ncells=128)
    p = MixtureParams(N=1, m=np.array([1.3]), nu_vec=np.array([0.8]),
                      a=np.zeros((1, 1)), eps=0.1, sigma=0.6)
    x = grid.x
    st = MacroStateBT(rho=(1 + 0.1 * np.cos(2 * np.pi * x))[None, :],
                      theta=np.ones((1, 128)))
    t_end = 0.02
    out, _ = bt.run_bt(st, p, grid, t_end, BTMode.ISOTHERMAL)
    rate = -np.log((np.max(out.rho) - 1.0) / 0.1) / t_end
    expect = p.sigma * (2 * np.pi) ** 2 / (p.nu_vec[0] * p.m[0])
    assert abs(rate - expect) / expect < 0.02


def test_classical_uniform_total_density_stationary():
    # a_ij = 1, sum rho uniform: common drift velocity vanishes, state frozen
    grid = Grid1D(L=1.0, ncells=64)
    p = _mix(np.ones((2, 2)), sigma=0.0)
    x = grid.x
    rho1 = 1 + 0.2 * np.cos(2 * np.pi * x)
    st = MacroStateBT(rho=np.stack([rho1, 2.0 - rho1]), theta=np.ones((2, 64)))
    out = bt.bt_step(st, p, grid, 1e-5, BTMode.CLASSICAL)
    assert np.max(np.abs(out.rho - st.rho)) == 0.0


def test_classical_total_density_nonlinear_diffusion():
    # m_i nu_i = 1, a=1: u = sum rho obeys dt u = dx(u dx u) to scheme order
    grid = Grid1D(L=1.0, ncells=128)
    p = _mix(np.ones((2, 2)))
    x = grid.x
    rho = np.stack([1 + 0.1 * np.cos(2 * np.pi * x), 1 + 0.05 * np.sin(2 * np.pi * x)])
    st = MacroStateBT(rho=rho.copy(), theta=np.ones((2, 128)))
    dt = bt.bt_cfl_dt(st, p, grid, BTMode.CLASSICAL)
    out = bt.bt_step(st, p, grid, dt, BTMode.CLASSICAL)
    u0 = rho.sum(0)
    u1 = out.rho.sum(0)
    # reference: centered dx(u dx u) on the same grid
    dx = grid.dx
    gu = (np.roll(u0, -1) - u0) / dx
    uface = 0.5 * (u0 + np.roll(u0, -1))
    ref = u0 + dt * (uface * gu - np.roll(uface * gu, 1)) / dx
    assert np.max(np.abs(u1 - ref)) < 5e-3 * dt / dx * np.max(np.abs(u0))


def test_step_rejection_and_halving():
    # a density spike stepped at 100x the diffusive CFL yields a negative
    # cell (rejected); bt_advance recovers by sub-step halving
    grid = Grid1D(L=1.0, ncells=64)
    p = _mix(np.zeros((2, 2)))
    rho = np.full((2, 64), 0.1)
    rho[:, 32] = 1.0
    st = MacroStateBT(rho=rho, theta=np.ones((2, 64)))
    big = 100.0 * bt.bt_cfl_dt(st, p, grid, BTMode.ISOTHERMAL)
    with pytest.raises(InvariantViolation, match="step rejected"):
        bt.bt_step(st, p, grid, big, BTMode.ISOTHERMAL)
    out = bt.bt_advance(st, p, grid, big, BTMode.ISOTHERMAL)
    assert np.all(out.rho > 0)


def test_bt_entropy_hand_value_and_extensivity():
    g1 = Grid1D(L=1.0, ncells=32)
    g2 = Grid1D(L=2.0, ncells=64)
    p = MixtureParams(N=1, m=np.array([2 * np.pi]), nu_vec=np.ones(1),
                      a=np.eye(1), eps=0.1, sigma=1.0)
    s1 = MacroStateBT(rho=np.full((1, 32), 2 * np.pi), theta=np.ones((1, 32)))
    s2 = MacroStateBT(rho=np.full((1, 64), 2 * np.pi), theta=np.ones((1, 64)))
    assert abs(bt.bt_entropy(s1, p, g1) - 2.5) < 1e-12
    assert abs(bt.bt_entropy(s2, p, g2) - 5.0) < 1e-12


def test_bt_entropy_matches_kinetic():
    from mbgk.core import VelocityGrid1D, init_kinetic_state
    from mbgk.kinetic_brinkman import bb_kinetic_entropy
    grid = Grid1D(L=1.0, ncells=32)
    vg = VelocityGrid1D(xi_max=10.0, nnodes=96)
    p = _mix([[1.0, 0.0], [0.0, 1.0]])
    x = grid.x
    n = np.stack([1 + 0.1 * np.cos(2 * np.pi * x), np.full(32, 0.9)])
    th = np.stack([np.full(32, 1.1), np.full(32, 0.95)])
    stk = init_kinetic_state(grid, vg, n, np.zeros((2, 32)), th, p, shift_scale=1.0)
    stm = MacroStateBT(rho=p.m[:, None] * n, theta=th)
    hk = bb_kinetic_entropy(stk, vg, grid, p)
    hm = bt.bt_entropy(stm, p, grid)
    assert abs(hk - hm) / abs(hm) < 1e-6


def test_identity_residual_uniform_zero():
    grid = Grid1D(L=1.0, ncells=32)
    p = _mix([[1.0, 0.3], [0.3, 1.0]])
    st = MacroStateBT(rho=np.ones((2, 32)), theta=np.ones((2, 32)))
    res = bt.bt_entropy_identity_residual([(0.0, st), (1e-4, st), (2e-4, st)], p, grid)
    assert res == 0.0


def test_identity_psd_hypothesis_gate():
    grid = Grid1D(L=1.0, ncells=32)
    p = _mix([[0.1, 1.0], [1.0, 0.1]])   # indefinite symmetric part
    x = grid.x
    st = MacroStateBT(rho=np.stack([1 + 0.1 * np.cos(2 * np.pi * x), np.ones(32)]),
                      theta=np.ones((2, 32)))
    with pytest.raises(InvariantViolation, match="hypothesis violated"):
        bt.bt_entropy_identity_residual([(0.0, st), (1e-4, st), (2e-4, st)], p, grid)


def test_identity_residual_and_refinement():
    p = _mix([[1.0, 0.3], [0.3, 1.0]])
    dt0 = None

    def run(ncells):
        nonlocal dt0
        grid = Grid1D(L=1.0, ncells=ncells)
        x = grid.x
        st = MacroStateBT(rho=np.stack([1 + 0.15 * np.cos(2 * np.pi * x),
                                        1 - 0.1 * np.cos(2 * np.pi * x)]),
                          theta=np.ones((2, ncells)))
        if dt0 is None:
            dt0 = bt.bt_cfl_dt(st, p, grid, BTMode.NONISOTHERMAL)
        dt = dt0 * (64.0 / ncells) ** 2
        _, samples = bt.run_bt(st, p, grid, t_end=256 * dt0, mode=BTMode.NONISOTHERMAL,
                               sample_every=16, dt_fixed=dt)
        return bt.bt_entropy_identity_residual(samples, p, grid)

    r64 = run(64)
    r128 = run(128)
    assert r64 < 0.05
    assert r64 / r128 >= 3.0


def test_rao_initial_value_and_decay():
    grid = Grid1D(L=1.0, ncells=128)
    p = MixtureParams(N=1, m=np.array([1.0]), nu_vec=np.array([1.0]),
                      a=np.array([[1.0]]), eps=0.1, sigma=0.3)
    x = grid.x
    st = MacroStateBT(rho=(1 + 0.1 * np.cos(2 * np.pi * x))[None, :],
                      theta=np.ones((1, 128)))
    assert abs(bt.rao_entropy(st, p, grid) - 0.5 * 1.005) < 1e-12
    _, samples = bt.run_bt(st, p, grid, 0.01, BTMode.ISOTHERMAL, sample_every=5)
    times, values, worst = bt.rao_entropy_trajectory(samples, p, grid)
    assert worst < 0.05


def test_rao_constant_for_uniform_fields():
    grid = Grid1D(L=1.0, ncells=64)
    p = _mix(np.eye(2), sigma=0.5)
    st = MacroStateBT(rho=np.full((2, 64), 1.3), theta=np.ones((2, 64)))
    _, samples = bt.run_bt(st, p, grid, 0.005, BTMode.ISOTHERMAL, sample_every=5)
    _, values, _ = bt.rao_entropy_trajectory(samples, p, grid)
    assert np.max(np.abs(values - values[0])) < 1e-12 * abs(values[0])


def test_rao_hypothesis_gates():
    grid = Grid1D(L=1.0, ncells=32)
    st = MacroStateBT(rho=np.ones((2, 32)), theta=np.ones((2, 32)))
    samples = [(0.0, st), (1e-4, st), (2e-4, st)]
    p_bad = _mix([[1.0, 0.3], [0.2, 1.0]])   # not symmetric
    with pytest.raises(InvariantViolation, match="not symmetric"):
        bt.rao_entropy_trajectory(samples, p_bad, grid)
    p_bad2 = _mix([[1.0, 0.3], [0.3, 1.0]], nu=(2.0, 1.0))  # m nu != 1
    with pytest.raises(InvariantViolation, match="m_i nu_i"):
        bt.rao_entropy_trajectory(samples, p_bad2, grid)


def test_noniso_energy_budget_joule_only():
    # total thermal energy changes only through the Joule source, to scheme order
    grid = Grid1D(L=1.0, ncells=128)
    p = _mix([[1.0, 0.3], [0.3, 1.0]])
    x = grid.x
    st = MacroStateBT(rho=np.stack([1 + 0.15 * np.cos(2 * np.pi * x),
                                    1 - 0.1 * np.cos(2 * np.pi * x)]),
                      theta=np.ones((2, 128)))
    dt = bt.bt_cfl_dt(st, p, grid, BTMode.NONISOTHERMAL)
    E0 = 1.5 * np.sum(st.rho * st.theta / p.m[:, None]) * grid.dx
    phi = bt.local_potential(st.rho, st.theta, p.a)
    J = bt.mass_fluxes(st, p, grid, BTMode.NONISOTHERMAL, phi)
    gphi_face = (np.roll(phi, -1, -1) - phi) / grid.dx
    J_cells = 0.5 * (J + np.roll(J, 1, -1))
    gphi_cells = 0.5 * (gphi_face + np.roll(gphi_face, 1, -1))
    joule = float(np.sum(J_cells * gphi_cells) / p.sigma * grid.dx)
    out = bt.bt_step(st, p, grid, dt, BTMode.NONISOTHERMAL)
    E1 = 1.5 * np.sum(out.rho * out.theta / p.m[:, None]) * grid.dx
    assert abs((E1 - E0) / dt - joule) < 1e-10 * max(1.0, abs(joule))


def test_noniso_with_unit_theta_matches_isothermal_fluxes_bitwise():
    grid = Grid1D(L=1.0, ncells=64)
    p = _mix([[1.0, 0.25], [0.25, 1.0]])
    x = grid.x
    st = MacroStateBT(rho=np.stack([1 + 0.2 * np.cos(2 * np.pi * x),
                                    1 - 0.15 * np.cos(2 * np.pi * x)]),
                      theta=np.ones((2, 64)))
    phi = bt.local_potential(st.rho, st.theta, p.a)
    J_noniso = bt.mass_fluxes(st, p, grid, BTMode.NONISOTHERMAL, phi)
    J_iso = bt.mass_fluxes(st, p, grid, BTMode.ISOTHERMAL, phi)
    assert np.array_equal(J_noniso, J_iso)


def test_sigma_zero_requires_psd_interaction():
    grid = Grid1D(L=1.0, ncells=32)
    p = _mix([[0.1, 1.0], [1.0, 0.1]], sigma=0.0)
    st = MacroStateBT(rho=np.ones((2, 32)), theta=np.ones((2, 32)))
    with pytest.raises(InvariantViolation, match="positive semidefinite"):
        bt.run_bt(st, p, grid, 1e-4, BTMode.CLASSICAL)
