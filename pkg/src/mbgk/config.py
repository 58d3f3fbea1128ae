"""Run configuration: INI files with per-module sections, mirrored by CLI flags.

Sections: [mixture] species parameters, [grid] space/velocity grids,
[solver] model/regime/times, [ic] per-species Fourier-mode profiles
"mean amplitude wavenumber" for n, v, theta, [output] directory and cadence.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field

import numpy as np

from .core import (ConfigError, Grid1D, MixtureParams, RegimeKind, VelocityGrid1D,
                   default_velocity_grid, require_valid)


@dataclass
class FourierProfile:
    """f(x) = mean + amplitude * cos(2 pi k x / L)."""

    mean: float
    amplitude: float = 0.0
    wavenumber: int = 0

    def eval(self, x: np.ndarray, L: float) -> np.ndarray:
        return self.mean + self.amplitude * np.cos(2.0 * np.pi * self.wavenumber * x / L)


@dataclass
class RunConfig:
    model: str                     # "gk" | "brinkman"
    params: MixtureParams
    grid: Grid1D
    vgrid: VelocityGrid1D
    regime: RegimeKind = RegimeKind.DIFFUSIVE
    t_end: float = 0.1
    cfl: float = 0.9
    cadence: int = 10
    outdir: str = "out"
    profiles: dict = field(default_factory=dict)   # name -> FourierProfile

    def profile_arrays(self):
        """(n, v, theta) arrays of shape (N, ncells) from the Fourier profiles."""
        x = self.grid.x
        N = self.params.N
        n = np.stack([self.profiles[f"n{i+1}"].eval(x, self.grid.L) for i in range(N)])
        v = np.stack([self.profiles[f"v{i+1}"].eval(x, self.grid.L) for i in range(N)])
        th = np.stack([self.profiles[f"theta{i+1}"].eval(x, self.grid.L) for i in range(N)])
        return n, v, th


def _parse_vector(text: str, n: int, what: str) -> np.ndarray:
    vals = np.array([float(v) for v in text.replace(",", " ").split()])
    if vals.size != n:
        raise ConfigError(f"{what}: expected {n} entries, got {vals.size}")
    return vals


def _parse_matrix(text: str, n: int, what: str) -> np.ndarray:
    rows = [r for r in text.split(";") if r.strip()]
    if len(rows) != n:
        raise ConfigError(f"{what}: expected {n} rows, got {len(rows)}")
    return np.stack([_parse_vector(r, n, what) for r in rows])


def _parse_profile(text: str, what: str) -> FourierProfile:
    vals = text.replace(",", " ").split()
    if len(vals) not in (1, 3):
        raise ConfigError(f"{what}: expected 'mean' or 'mean amplitude wavenumber'")
    if len(vals) == 1:
        return FourierProfile(mean=float(vals[0]))
    return FourierProfile(mean=float(vals[0]), amplitude=float(vals[1]),
                          wavenumber=int(vals[2]))


def load_config(path_or_text, overrides: dict | None = None) -> RunConfig:
    """Parse an INI run configuration; overrides is a flat dict of
    section-qualified keys, e.g. {"mixture.eps": 0.05, "solver.model": "gk"}."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        if isinstance(path_or_text, io.StringIO):
            cp.read_file(path_or_text)
        else:
            with open(path_or_text) as f:
                cp.read_file(f)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read configuration: {exc}")

    ov = dict(overrides or {})
    for key, val in ov.items():
        sec, _, opt = key.partition(".")
        if not cp.has_section(sec):
            cp.add_section(sec)
        cp.set(sec, opt, str(val))

    def get(sec, opt, typ=str, default=None):
        if not cp.has_option(sec, opt):
            if default is None:
                raise ConfigError(f"missing [{sec}] {opt}")
            return default
        raw = cp.get(sec, opt)
        try:
            if typ is bool:
                return raw.strip().lower() in ("1", "true", "yes", "on")
            return typ(raw)
        except ValueError as exc:
            raise ConfigError(f"bad value for [{sec}] {opt}: {exc}")

    N = get("mixture", "species", int)
    m = _parse_vector(get("mixture", "m"), N, "[mixture] m")
    nu_matrix = None
    nu_vec = None
    a = None
    if cp.has_option("mixture", "nu_matrix"):
        nu_matrix = _parse_matrix(cp.get("mixture", "nu_matrix"), N, "[mixture] nu_matrix")
    if cp.has_option("mixture", "nu_vec"):
        nu_vec = _parse_vector(cp.get("mixture", "nu_vec"), N, "[mixture] nu_vec")
    if cp.has_option("mixture", "a"):
        a = _parse_matrix(cp.get("mixture", "a"), N, "[mixture] a")
    params = MixtureParams(N=N, m=m, nu_matrix=nu_matrix, nu_vec=nu_vec, a=a,
                           eps=get("mixture", "eps", float),
                           sigma=get("mixture", "sigma", float, 1.0))
    require_valid(params)

    grid = Grid1D(L=get("grid", "l", float, 1.0), ncells=get("grid", "ncells", int))
    nnodes = get("grid", "nnodes", int, 64)

    model = get("solver", "model").strip().lower()
    if model not in ("gk", "brinkman"):
        raise ConfigError(f"unknown model '{model}' (expected gk or brinkman)")
    if model == "gk" and params.nu_matrix is None:
        raise ConfigError("model gk requires [mixture] nu_matrix")
    if model == "brinkman" and (params.nu_vec is None or params.a is None):
        raise ConfigError("model brinkman requires [mixture] nu_vec and a")
    regime_txt = get("solver", "regime", str, "diffusive").strip().lower()
    try:
        regime = RegimeKind(regime_txt)
    except ValueError:
        raise ConfigError(f"unknown regime '{regime_txt}'")

    profiles = {}
    for i in range(N):
        for nm in (f"n{i+1}", f"v{i+1}", f"theta{i+1}"):
            if not cp.has_option("ic", nm):
                raise ConfigError(f"missing [ic] {nm}")
            profiles[nm] = _parse_profile(cp.get("ic", nm), f"[ic] {nm}")

    cfg = RunConfig(
        model=model, params=params, grid=grid,
        vgrid=_make_vgrid(cp, grid, profiles, params, nnodes),
        regime=regime,
        t_end=get("solver", "t_end", float),
        cfl=get("solver", "cfl", float, 0.9),
        cadence=get("output", "cadence", int, 10),
        outdir=get("output", "dir", str, "out"),
        profiles=profiles,
    )
    validate_runconfig(cfg)
    return cfg


def _make_vgrid(cp, grid, profiles, params, nnodes) -> VelocityGrid1D:
    if cp.has_option("grid", "xi_max") and cp.get("grid", "xi_max").strip() != "auto":
        try:
            return VelocityGrid1D(xi_max=float(cp.get("grid", "xi_max")), nnodes=nnodes)
        except ValueError as exc:
            raise ConfigError(f"bad [grid] xi_max: {exc}")
    theta_max = max(profiles[f"theta{i+1}"].mean + abs(profiles[f"theta{i+1}"].amplitude)
                    for i in range(params.N))
    return default_velocity_grid(theta_max, params.m, nnodes)


def validate_runconfig(cfg: RunConfig) -> None:
    n, v, th = cfg.profile_arrays()
    if np.any(n <= 0):
        raise ConfigError("initial density profile not positive")
    if np.any(th <= 0):
        raise ConfigError("initial temperature profile not positive")
    if not cfg.t_end > 0:
        raise ConfigError("t_end must be positive")
    if not (0 < cfg.cfl <= 0.9):
        raise ConfigError("cfl must lie in (0, 0.9]")
    if cfg.model == "gk":
        # the Maxwell-Stefan reference uses the zero-barycentric-momentum
        # closure, so kinetic runs must start with zero net momentum
        total = float(np.sum(cfg.params.m[:, None] * n * v) * cfg.grid.dx)
        scale = float(np.sum(cfg.params.m[:, None] * n) * cfg.grid.dx)
        if abs(total) > 1e-12 * scale:
            raise ConfigError("initial velocities must carry zero net momentum for model gk")


def config_echo(cfg: RunConfig) -> dict:
    p = cfg.params
    return {
        "model": cfg.model,
        "regime": cfg.regime.value,
        "mixture": {
            "species": p.N,
            "m": p.m.tolist(),
            "nu_matrix": None if p.nu_matrix is None else p.nu_matrix.tolist(),
            "nu_vec": None if p.nu_vec is None else p.nu_vec.tolist(),
            "a": None if p.a is None else p.a.tolist(),
            "eps": p.eps,
            "sigma": p.sigma,
        },
        "grid": {"L": cfg.grid.L, "ncells": cfg.grid.ncells,
                 "xi_max": cfg.vgrid.xi_max, "nnodes": cfg.vgrid.nnodes},
        "solver": {"t_end": cfg.t_end, "cfl": cfg.cfl},
        "ic": {k: [pr.mean, pr.amplitude, pr.wavenumber] for k, pr in cfg.profiles.items()},
        "output": {"dir": cfg.outdir, "cadence": cfg.cadence},
    }
