import numpy as np
import pytest

from mbgk.core import InvariantViolation, VelocityGrid1D
from mbgk import maxwellian as mx


def test_eval_hand_value():
    val = mx.eval_maxwellian(1.0, np.zeros(3), 1.0, 1.0, np.zeros(3))
    assert abs(val - (2 * np.pi) ** -1.5) < 1e-15


def test_eval_zero_density():
    assert mx.eval_maxwellian(0.0, np.zeros(3), 1.0, 1.0, np.array([1.0, 2.0, 3.0])) == 0.0


def test_eval_even_symmetry():
    xi = np.array([0.3, -0.7, 1.1])
    a = mx.eval_maxwellian(1.2, np.zeros(3), 0.8, 1.5, xi)
    b = mx.eval_maxwellian(1.2, np.zeros(3), 0.8, 1.5, -xi)
    assert a == b


def test_eval_rejects_nonpositive_temperature():
    with pytest.raises(InvariantViolation):
        mx.eval_maxwellian(1.0, np.zeros(3), -1.0, 1.0, np.zeros(3))


def _vg():
    return VelocityGrid1D(xi_max=8.0, nnodes=64)


def test_reduced_pair_recovers_density():
    vg = _vg()
    G, H = mx.reduced_maxwellian_pair(1.0, 0.0, 1.0, 1.0, vg)
    assert abs(vg.weight * G.sum() - 1.0) < 1e-10


def test_reduced_pair_trace_moment():
    # quadrature of (G xi^2 + H) = 3 n theta / m + n v^2
    vg = VelocityGrid1D(xi_max=8.0 + 0.4, nnodes=64)
    n, v, theta, m = 1.3, 0.4, 0.9, 1.0
    G, H = mx.reduced_maxwellian_pair(n, v, theta, m, vg)
    tr = vg.weight * ((G * vg.nodes ** 2).sum() + H.sum())
    assert abs(tr - (3 * n * theta / m + n * v * v)) < 1e-10


def test_reduced_pair_zero_velocity_first_moment_exact():
    vg = _vg()
    G, H = mx.reduced_maxwellian_pair(1.0, 0.0, 1.0, 1.0, vg)
    _, u, _ = mx.reduced_moments(G[:, None], H[:, None], vg, 1.0)
    assert u[0] == 0.0


def test_analytic_m0_unit_values():
    t = mx.analytic_moments_m0(1.0, 1.0, 1.0)
    assert np.allclose(t.second_tensor_diag, 1.0, rtol=0, atol=0)
    assert np.allclose(t.fourth_tensor_diag, 5.0, rtol=0, atol=0)


def test_analytic_m0_against_quadrature_oracle():
    # (n=2, theta=3, m=1): fourth tensor diagonal 90
    t = mx.maxwellian_moments_by_quadrature(2.0, np.zeros(3), 3.0, 1.0)
    assert np.max(np.abs(t.fourth_tensor_diag - 90.0) / 90.0) < 1e-10


def test_analytic_m0_zero_density():
    t = mx.analytic_moments_m0(0.0, 1.0, 1.0)
    assert t.zeroth == 0.0 and t.second_trace == 0.0
    assert np.all(t.fourth_tensor_diag == 0.0)


def test_analytic_shifted_hand_value():
    t = mx.analytic_moments_shifted(1.0, np.array([0.1, 0.0, 0.0]), 1.0, 1.0)
    assert np.allclose(t.first, [0.1, 0.0, 0.0], rtol=0, atol=0)
    assert abs(t.second_trace - 3.01) < 1e-15


def test_analytic_shifted_zero_shift_reduces_to_m0():
    a = mx.analytic_moments_shifted(1.7, np.zeros(3), 1.2, 2.0)
    b = mx.analytic_moments_m0(1.7, 1.2, 2.0)
    assert a.zeroth == b.zeroth
    assert np.all(a.first == 0.0)
    assert abs(a.second_trace - b.second_trace) < 1e-15


def test_analytic_shifted_linear_in_density():
    a = mx.analytic_moments_shifted(1.0, np.array([0.2, 0.1, 0.0]), 1.1, 1.3)
    b = mx.analytic_moments_shifted(2.0, np.array([0.2, 0.1, 0.0]), 1.1, 1.3)
    assert b.zeroth == 2 * a.zeroth
    assert np.allclose(b.first, 2 * a.first, rtol=1e-15)
    assert abs(b.second_trace - 2 * a.second_trace) < 1e-14


def test_quadrature_zero_function():
    grid = mx.oracle_grid(1.0, 1.0)
    t = mx.quadrature_moments_3d(np.zeros((48, 48, 48)), grid)
    assert t.zeroth == 0.0 and np.all(t.first == 0.0)


def test_quadrature_linearity_two_maxwellians():
    grid = mx.oracle_grid(1.0, 1.0)
    f1 = mx.sample_maxwellian_3d(1.0, np.zeros(3), 1.0, 1.0, grid)
    f2 = mx.sample_maxwellian_3d(0.5, np.array([0.2, 0.0, 0.0]), 0.8, 1.0, grid)
    a = mx.quadrature_moments_3d(f1, grid)
    b = mx.quadrature_moments_3d(f2, grid)
    c = mx.quadrature_moments_3d(f1 + f2, grid)
    assert abs(c.zeroth - (a.zeroth + b.zeroth)) < 1e-14
    assert abs(c.second_trace - (a.second_trace + b.second_trace)) < 1e-13


def test_quadrature_matches_analytic_m0():
    t = mx.maxwellian_moments_by_quadrature(1.0, np.zeros(3), 1.0, 1.0)
    ref = mx.analytic_moments_m0(1.0, 1.0, 1.0)
    assert abs(t.zeroth - 1.0) < 1e-10
    assert np.max(np.abs(t.second_tensor_diag - ref.second_tensor_diag)) < 1e-10
    assert np.max(np.abs(t.fourth_tensor_diag - ref.fourth_tensor_diag) / 5.0) < 1e-9


def test_oracle_agreement_random_draws():
    # analytic shifted moments vs quadrature, 100 draws <= 1e-9 relative
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(100):
        n = rng.uniform(0.5, 2.0)
        th = rng.uniform(0.5, 2.0)
        m = rng.uniform(0.5, 4.0)
        eps_v = rng.uniform(0.5, 2.0, 3) * rng.choice([-1.0, 1.0], 3)
        tab = mx.maxwellian_moments_by_quadrature(n, eps_v, th, m)
        ref = mx.analytic_moments_shifted(n, eps_v, th, m)
        worst = max(worst, abs(tab.zeroth - ref.zeroth) / ref.zeroth,
                    float(np.max(np.abs(tab.first - ref.first) / np.abs(ref.first))),
                    abs(tab.second_trace - ref.second_trace) / ref.second_trace)
    assert worst < 1e-9


def test_reduction_consistency_full_3d():
    # moments from (G, H) match moments of the corresponding 3D sample
    vg = VelocityGrid1D(xi_max=8.6, nnodes=64)
    n, v, th, m = 1.4, 0.3, 0.9, 1.2
    G, H = mx.reduced_maxwellian_pair(n, v, th, m, vg)
    n1, u1, th1 = mx.reduced_moments(G[:, None], H[:, None], vg, m)
    grid3 = mx.TensorGrid3V(axes=(vg.nodes, vg.nodes, vg.nodes),
                            weights=(vg.weight, vg.weight, vg.weight))
    f = mx.sample_maxwellian_3d(n, np.array([v, 0, 0]), th, m, grid3)
    t = mx.quadrature_moments_3d(f, grid3)
    th3 = m * (t.second_trace - t.first[0] ** 2 / t.zeroth) / (3 * t.zeroth)
    assert abs(n1[0] - t.zeroth) / t.zeroth < 1e-9
    assert abs(u1[0] - t.first[0] / t.zeroth) < 1e-9
    assert abs(th1[0] - th3) / th3 < 1e-9


def test_reduced_moments_round_trip():
    vg = VelocityGrid1D(xi_max=8.0 * np.sqrt(0.7 / 2.0) + 0.2, nnodes=64)
    G, H = mx.reduced_maxwellian_pair(1.5, 0.2, 0.7, 2.0, vg)
    n, u, th = mx.reduced_moments(G[:, None], H[:, None], vg, 2.0)
    assert abs(n[0] - 1.5) / 1.5 < 1e-8
    assert abs(u[0] - 0.2) < 1e-8
    assert abs(th[0] - 0.7) / 0.7 < 1e-8


def test_reduced_moments_vacuum_error():
    vg = _vg()
    with pytest.raises(InvariantViolation, match="vacuum"):
        mx.reduced_moments(np.zeros((vg.nnodes, 2)), np.zeros((vg.nnodes, 2)), vg, 1.0)


def test_reduced_moments_homogeneity():
    vg = _vg()
    G, H = mx.reduced_maxwellian_pair(1.0, 0.3, 1.1, 1.0, vg)
    n1, u1, t1 = mx.reduced_moments(G[:, None], H[:, None], vg, 1.0)
    n2, u2, t2 = mx.reduced_moments(2 * G[:, None], 2 * H[:, None], vg, 1.0)
    assert abs(n2[0] - 2 * n1[0]) < 1e-14
    assert abs(u2[0] - u1[0]) < 1e-14
    assert abs(t2[0] - t1[0]) < 1e-14
