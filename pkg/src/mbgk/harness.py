"""Run orchestration: single runs, eps-sweeps against the macroscopic limits,
and the seeded verification suites."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .core import (ConfigError, Grid1D, InvariantViolation, KineticState,
                   MacroStateBT, MacroStateMS, MixtureParams, RegimeKind,
                   VelocityGrid1D, init_kinetic_state)
from .config import RunConfig, config_echo
from .diagnostics import (DiagnosticsRecord, drift, l2_error, neumaier_sum,
                          rate_estimate, write_series_csv, write_snapshot_csv)
from . import kinetic_brinkman as kb
from . import kinetic_gk as kg
from . import macro_bt as mbt
from . import macro_ms as mms
from . import maxwellian as mx
from . import mixture


@dataclass
class RunResult:
    records: list
    state: KineticState
    t: float
    files: dict = field(default_factory=dict)


def _write_json(path, obj):
    with open(path, "w") as f:
        json.dump(obj, f, indent=2, sort_keys=True)
        f.write("\n")


def _ensure_outdir(outdir):
    os.makedirs(outdir, exist_ok=True)
    return outdir


def run_case(cfg: RunConfig, tag: str = "run") -> RunResult:
    """Advance the configured kinetic model to t_end, writing the time-series
    CSV, terminal snapshot CSV and a config echo JSON."""
    outdir = _ensure_outdir(cfg.outdir)
    p = cfg.params
    grid, vgrid = cfg.grid, cfg.vgrid
    n0, v0, th0 = cfg.profile_arrays()

    records = []
    t = 0.0
    step = 0
    if cfg.model == "gk":
        state = init_kinetic_state(grid, vgrid, n0, v0, th0, p, shift_scale=p.eps)
        dt = cfg.cfl * p.eps * grid.dx / vgrid.xi_max
        while t < cfg.t_end * (1.0 - 1e-12):
            dtk = min(dt, cfg.t_end - t)
            rep = kg.gk_step(state, p, grid, vgrid, dtk)
            t += dtk
            step += 1
            if step % cfg.cadence == 0 or t >= cfg.t_end * (1.0 - 1e-12):
                records.append(DiagnosticsRecord(
                    step=step, t=t, masses=rep.masses, momentum=rep.momentum,
                    energy=rep.energy, entropy=rep.entropy,
                    extra={"max_subiters": float(rep.max_subiters)}))
        cols = {}
        for s in range(p.N):
            cols[f"n_{s+1}"] = state.n[s]
            cols[f"v_{s+1}"] = state.v[s]
            cols[f"theta_{s+1}"] = state.theta[s]
    else:
        state = init_kinetic_state(grid, vgrid, n0, v0, th0, p, shift_scale=1.0)
        while t < cfg.t_end * (1.0 - 1e-12):
            phi = kb.potentials(state, p, grid, vgrid)
            fmax = float(np.max(np.abs(kb.grad_centers(phi, grid))))
            dt = kb.suggested_dt(p, grid, vgrid, cfg.regime,
                                 max_force_guess=max(fmax, 1e-12), cfl=cfg.cfl)
            dtk = min(dt, cfg.t_end - t)
            rep = kb.bb_step(state, p, grid, vgrid, dtk, cfg.regime)
            t += dtk
            step += 1
            if step % cfg.cadence == 0 or t >= cfg.t_end * (1.0 - 1e-12):
                momentum = neumaier_sum(p.m[:, None] * state.n * state.v) * grid.dx
                records.append(DiagnosticsRecord(
                    step=step, t=t, masses=rep.masses, momentum=momentum,
                    energy=rep.energy, entropy=rep.entropy,
                    extra={"outflow": float(np.sum(rep.outflow))}))
        phi = kb.potentials(state, p, grid, vgrid)
        cols = {}
        for s in range(p.N):
            cols[f"n_{s+1}"] = state.n[s]
            cols[f"v_{s+1}"] = state.v[s]
            cols[f"theta_{s+1}"] = state.theta[s]
        for s in range(p.N):
            cols[f"phi_{s+1}"] = phi[s]

    files = {
        "series": os.path.join(outdir, f"{tag}_series.csv"),
        "snapshot": os.path.join(outdir, f"{tag}_snapshot.csv"),
        "config": os.path.join(outdir, f"{tag}_config.json"),
    }
    write_series_csv(files["series"], records, p.N)
    write_snapshot_csv(files["snapshot"], grid.x, cols)
    _write_json(files["config"], config_echo(cfg))
    return RunResult(records=records, state=state, t=t, files=files)


# --- eps sweep ----------------------------------------------------------------


def _clone_params(p: MixtureParams, eps: float) -> MixtureParams:
    return MixtureParams(N=p.N, m=p.m.copy(),
                         nu_matrix=None if p.nu_matrix is None else p.nu_matrix.copy(),
                         nu_vec=None if p.nu_vec is None else p.nu_vec.copy(),
                         a=None if p.a is None else p.a.copy(),
                         eps=eps, sigma=p.sigma)


def _macro_reference(cfg: RunConfig):
    """Solve the eps-independent limit system from the matched initial moments."""
    p = cfg.params
    n0, v0, th0 = cfg.profile_arrays()
    if cfg.model == "gk":
        if np.max(np.abs(th0 - th0[0])) > 1e-14:
            raise ConfigError("Maxwell-Stefan reference needs one shared temperature profile")
        state = MacroStateMS(n=n0.copy(), v=np.zeros_like(n0), theta=th0[0].copy())
        final, _ = mms.run_ms(state, p, cfg.grid, cfg.t_end)
        fields = {f"n_{s+1}": final.n[s] for s in range(p.N)}
        fields["theta"] = final.theta
        return final, fields
    rho0 = p.m[:, None] * n0
    if cfg.regime == RegimeKind.HIGHFIELD:
        if np.max(np.abs(th0 - 1.0)) > 1e-14:
            raise ConfigError("high-field reference is isothermal: set theta profiles to 1")
        state = MacroStateBT(rho=rho0.copy(), theta=np.ones_like(rho0))
        final, _ = mbt.run_bt(state, p, cfg.grid, cfg.t_end, mbt.BTMode.HIGHFIELD)
        return final, {f"rho_{s+1}": final.rho[s] for s in range(p.N)}
    state = MacroStateBT(rho=rho0.copy(), theta=th0.copy())
    final, _ = mbt.run_bt(state, p, cfg.grid, cfg.t_end, mbt.BTMode.NONISOTHERMAL)
    fields = {f"rho_{s+1}": final.rho[s] for s in range(p.N)}
    fields.update({f"theta_{s+1}": final.theta[s] for s in range(p.N)})
    return final, fields


def _kinetic_terminal_fields(cfg: RunConfig, eps: float):
    p = _clone_params(cfg.params, eps)
    grid, vgrid = cfg.grid, cfg.vgrid
    n0, v0, th0 = cfg.profile_arrays()
    if cfg.model == "gk":
        state = init_kinetic_state(grid, vgrid, n0, v0, th0, p, shift_scale=eps)
        dt0 = cfg.cfl * eps * grid.dx / vgrid.xi_max
        t = 0.0
        while t < cfg.t_end * (1.0 - 1e-12):
            dtk = min(dt0, cfg.t_end - t)
            kg.gk_step(state, p, grid, vgrid, dtk)
            t += dtk
        n, v, theta = state.n, state.v, state.theta
        fields = {f"n_{s+1}": n[s] for s in range(p.N)}
        fields["theta"] = np.sum(n * theta, axis=0) / np.sum(n, axis=0)
        return fields
    state = init_kinetic_state(grid, vgrid, n0, v0, th0, p, shift_scale=1.0)
    t = 0.0
    while t < cfg.t_end * (1.0 - 1e-12):
        phi = kb.potentials(state, p, grid, vgrid)
        fmax = float(np.max(np.abs(kb.grad_centers(phi, grid))))
        dt = kb.suggested_dt(p, grid, vgrid, cfg.regime,
                             max_force_guess=max(fmax, 1e-12), cfl=cfg.cfl)
        dtk = min(dt, cfg.t_end - t)
        kb.bb_step(state, p, grid, vgrid, dtk, cfg.regime)
        t += dtk
    rho = p.m[:, None] * state.n
    if cfg.regime == RegimeKind.HIGHFIELD:
        return {f"rho_{s+1}": rho[s] for s in range(p.N)}
    fields = {f"rho_{s+1}": rho[s] for s in range(p.N)}
    fields.update({f"theta_{s+1}": state.theta[s] for s in range(p.N)})
    return fields


def eps_sweep(cfg: RunConfig, eps_list, tag: str = "sweep") -> dict:
    """Run the kinetic solver across eps_list and compare terminal moments
    against the macroscopic limit solution on the same grid."""
    eps_list = [float(e) for e in eps_list]
    if len(eps_list) < 3:
        raise ConfigError("need >= 3 points in the eps sweep")
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ConfigError("eps list must be strictly decreasing")

    outdir = _ensure_outdir(cfg.outdir)
    ref_state, ref_fields = _macro_reference(cfg)
    write_snapshot_csv(os.path.join(outdir, f"{tag}_reference.csv"),
                       cfg.grid.x, ref_fields)

    # kinetic initial moments must match the macroscopic initial condition
    n0, v0, th0 = cfg.profile_arrays()
    shift = cfg.params.eps if cfg.model == "gk" else 1.0
    st0 = init_kinetic_state(cfg.grid, cfg.vgrid, n0, v0, th0, cfg.params, shift)
    ni, ui, thi = mx.reduced_moments(st0.G, st0.H, cfg.vgrid, cfg.params.m[:, None])
    mismatch = max(float(np.max(np.abs(ni - n0) / n0)),
                   float(np.max(np.abs(ui - shift * v0))))
    if mismatch > 1e-8:
        raise InvariantViolation("kinetic initial moments do not match the macro IC")

    errors: dict[str, list] = {k: [] for k in ref_fields}
    result = {
        "model": cfg.model,
        "regime": cfg.regime.value,
        "t_end": cfg.t_end,
        "grid": {"L": cfg.grid.L, "ncells": cfg.grid.ncells},
        "eps": eps_list,
        "errors": errors,
        "rates": {},
        "monotone": {},
        "thresholds": {"rate_min": None if cfg.regime == RegimeKind.HIGHFIELD else 0.8},
        "pass": False,
    }
    path = os.path.join(outdir, f"{tag}_result.json")
    try:
        for e in eps_list:
            fields = _kinetic_terminal_fields(cfg, e)
            for k in ref_fields:
                errors[k].append(l2_error(fields[k], ref_fields[k], cfg.grid))
    except InvariantViolation as exc:
        result["failed"] = str(exc)
        _write_json(path, result)
        raise

    ok = True
    for k, errs in errors.items():
        result["rates"][k] = rate_estimate(errs, eps_list)
        mono = bool(np.all(np.diff(errs) < 0))
        result["monotone"][k] = mono
        ok = ok and mono
        if result["thresholds"]["rate_min"] is not None:
            ok = ok and result["rates"][k] >= result["thresholds"]["rate_min"]
    result["pass"] = bool(ok)
    _write_json(path, result)
    return result


# --- verification suites --------------------------------------------------------


def _case(name, measured, threshold, smaller_is_better=True):
    ok = measured <= threshold if smaller_is_better else measured >= threshold
    return {"name": name, "status": "pass" if ok else "fail",
            "measured": float(measured), "threshold": float(threshold)}


def verify_mixture(seed: int = 1234, nsets: int = 100) -> list:
    """Exchange-closure residuals by quadrature for seeded random mixtures."""
    rng = np.random.default_rng(seed)
    eps_values = [0.25, 0.5, 1.0]
    worst = np.zeros(3)
    for k in range(nsets):
        N = 2
        p = MixtureParams(N=N, m=rng.uniform(0.5, 2.0, N),
                          nu_matrix=rng.uniform(0.5, 2.0, (N, N)),
                          eps=eps_values[k % 3])
        n = rng.uniform(0.5, 2.0, N)
        v = rng.uniform(0.5, 2.0, N)
        th = rng.uniform(0.5, 2.0, N)
        res = mixture.invariance_residuals(p, n, v, th, p.eps)
        worst = np.maximum(worst, res.reshape(3, -1).max(axis=1))
    return [_case("exchange residual: mass", worst[0], 1e-9),
            _case("exchange residual: momentum", worst[1], 1e-9),
            _case("exchange residual: energy", worst[2], 1e-9)]


def verify_moments(seed: int = 1234, ndraws: int = 100) -> list:
    """Gaussian moment identities against the 3D quadrature oracle."""
    rng = np.random.default_rng(seed)
    worst = {"second": 0.0, "fourth": 0.0, "odd": 0.0, "first": 0.0, "trace": 0.0}
    for _ in range(ndraws):
        n = rng.uniform(0.5, 2.0)
        th = rng.uniform(0.5, 2.0)
        m = rng.uniform(0.5, 4.0)
        tab = mx.maxwellian_moments_by_quadrature(n, np.zeros(3), th, m)
        ref = mx.analytic_moments_m0(n, th, m)
        worst["second"] = max(worst["second"], float(np.max(
            np.abs(tab.second_tensor_diag - ref.second_tensor_diag) / ref.second_tensor_diag)))
        worst["fourth"] = max(worst["fourth"], float(np.max(
            np.abs(tab.fourth_tensor_diag - ref.fourth_tensor_diag) / ref.fourth_tensor_diag)))
        worst["odd"] = max(worst["odd"], float(np.max(np.abs(tab.third_vector))) / (n * th / m))
        eps_v = rng.uniform(0.25, 1.0) * rng.uniform(0.5, 2.0, 3) * rng.choice([-1.0, 1.0], 3)
        tab = mx.maxwellian_moments_by_quadrature(n, eps_v, th, m)
        ref = mx.analytic_moments_shifted(n, eps_v, th, m)
        worst["first"] = max(worst["first"], float(np.max(
            np.abs(tab.first - ref.first)) / (n * np.max(np.abs(eps_v)))))
        worst["trace"] = max(worst["trace"], float(
            abs(tab.second_trace - ref.second_trace) / ref.second_trace))
    return [_case("second tensor = n theta/m I", worst["second"], 1e-9),
            _case("fourth tensor = 5 n theta^2/m^2 I", worst["fourth"], 1e-9),
            _case("odd moments vanish", worst["odd"], 1e-9),
            _case("first moment = n eps v", worst["first"], 1e-9),
            _case("trace = 3 n theta/m + n |eps v|^2", worst["trace"], 1e-9)]


def verify_entropy(seed: int = 1234) -> list:
    """Entropy evaluations against the closed Gaussian form, plus extensivity."""
    rng = np.random.default_rng(seed)
    grid = Grid1D(L=1.0, ncells=32)
    vgrid = VelocityGrid1D(xi_max=10.0, nnodes=96)
    p = MixtureParams(N=2, m=np.array([1.0, 1.5]), nu_matrix=np.ones((2, 2)),
                      nu_vec=np.ones(2), a=np.eye(2), eps=0.1)
    n = rng.uniform(0.8, 1.2, (2, 32))
    th = rng.uniform(0.8, 1.2, (2, 32))
    v = np.zeros((2, 32))
    st = init_kinetic_state(grid, vgrid, n, v, th, p, shift_scale=p.eps)
    closed = sum(neumaier_sum(mx.gaussian_entropy_density(n[s], th[s], p.m[s]))
                 for s in range(2)) * grid.dx
    hk = kg.kinetic_entropy(st.G, st.H, vgrid, grid, p.m)
    e1 = abs(hk - closed) / abs(closed)

    bt_state = MacroStateBT(rho=p.m[:, None] * n, theta=th)
    e2 = abs(mbt.bt_entropy(bt_state, p, grid) - hk) / abs(hk)

    th_shared = np.broadcast_to(th[0], (2, 32)).copy()
    stms = init_kinetic_state(grid, vgrid, n, v, th_shared, p, shift_scale=p.eps)
    ms_state = MacroStateMS(n=n, v=v, theta=th_shared[0])
    e3 = abs(mms.ms_entropy(ms_state, p, grid)
             - kg.kinetic_entropy(stms.G, stms.H, vgrid, grid, p.m)) / abs(hk)

    grid2 = Grid1D(L=2.0, ncells=64)
    n2 = np.concatenate([n, n], axis=1)
    th2 = np.concatenate([th, th], axis=1)
    st2 = init_kinetic_state(grid2, vgrid, n2, np.zeros((2, 64)), th2, p, shift_scale=p.eps)
    e4 = abs(kg.kinetic_entropy(st2.G, st2.H, vgrid, grid2, p.m) - 2.0 * hk) / abs(hk)
    return [_case("kinetic entropy matches Gaussian closed form", e1, 1e-8),
            _case("macroscopic BT entropy matches kinetic", e2, 1e-6),
            _case("macroscopic MS entropy matches kinetic", e3, 1e-6),
            _case("entropy extensivity under domain doubling", e4, 1e-12)]


def verify_conservation(seed: int = 1234, nsteps: int = 200) -> list:
    """Short kinetic runs: conservation drift and entropy monotonicity."""
    grid = Grid1D(L=1.0, ncells=64)
    p = MixtureParams(N=2, m=np.array([1.0, 1.0]), nu_matrix=np.ones((2, 2)), eps=0.1)
    vgrid = VelocityGrid1D(xi_max=8.0, nnodes=64)
    x = grid.x
    n = np.stack([1 + 0.2 * np.cos(2 * np.pi * x), 1 - 0.2 * np.cos(2 * np.pi * x)])
    st = init_kinetic_state(grid, vgrid, n, np.zeros((2, 64)), np.ones((2, 64)), p,
                            shift_scale=p.eps)
    dt = kg.suggested_dt(p, grid, vgrid)
    reports = [kg.gk_step(st, p, grid, vgrid, dt) for _ in range(nsteps)]
    mass_d = max(drift([r.masses[s] for r in reports])[0] for s in range(2))
    mom_scale = float(np.sum(p.m[:, None] * n) * grid.dx)
    mom_d = max(abs(r.momentum - reports[0].momentum) for r in reports) / mom_scale
    en_d = drift([r.energy for r in reports])[0]
    ent = np.array([r.entropy for r in reports])
    h_dip = max(0.0, float(np.max(-np.diff(ent))) / abs(ent[0]))

    pb = MixtureParams(N=2, m=np.array([1.0, 1.0]), nu_vec=np.ones(2),
                       a=np.zeros((2, 2)), eps=0.1, sigma=1.0)
    st = init_kinetic_state(grid, vgrid, n, np.zeros((2, 64)), np.ones((2, 64)), pb,
                            shift_scale=1.0)
    dtb = kb.suggested_dt(pb, grid, vgrid)
    reps = [kb.bb_step(st, pb, grid, vgrid, dtb) for _ in range(nsteps)]
    mass_b = max(drift([r.masses[s] for r in reps])[0] for s in range(2))
    en_b = drift([r.energy for r in reps])[0]
    entb = np.array([r.entropy for r in reps])
    hb_dip = max(0.0, float(np.max(-np.diff(entb))) / abs(entb[0]))
    return [_case("gk mass drift", mass_d, 1e-12),
            _case("gk momentum drift", mom_d, 1e-10),
            _case("gk energy drift", en_d, 1e-10),
            _case("gk entropy dip", h_dip, 1e-10),
            _case("bb mass drift", mass_b, 1e-12),
            _case("bb energy drift (force-free)", en_b, 1e-10),
            _case("bb entropy dip", hb_dip, 1e-10)]


SUITES = {
    "mixture": verify_mixture,
    "moments": verify_moments,
    "entropy": verify_entropy,
    "conservation": verify_conservation,
}


def verify(suite: str, seed: int = 1234, outdir: str | None = None) -> dict:
    """Run a named verification suite (or 'all'); returns the JSON report."""
    if suite == "all":
        cases = []
        for name in ("mixture", "moments", "entropy", "conservation"):
            cases += SUITES[name](seed)
    elif suite in SUITES:
        cases = SUITES[suite](seed)
    else:
        raise ConfigError(f"unknown verify suite '{suite}'")
    report = {"suite": suite, "seed": seed, "cases": cases,
              "pass": all(c["status"] == "pass" for c in cases)}
    if outdir:
        _ensure_outdir(outdir)
        _write_json(os.path.join(outdir, f"verify_{suite}.json"), report)
    return report


def format_report(report: dict) -> str:
    lines = [f"suite: {report['suite']}  (seed {report['seed']})"]
    width = max(len(c["name"]) for c in report["cases"])
    for c in report["cases"]:
        lines.append(f"  {c['name']:<{width}}  {c['status']:<4}  "
                     f"measured={c['measured']:.3e}  threshold={c['threshold']:.3e}")
    lines.append(f"overall: {'pass' if report['pass'] else 'FAIL'}")
    return "\n".join(lines)
