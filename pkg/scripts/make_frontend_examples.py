#!/usr/bin/env python3
"""Generate the example harness outputs shipped with the plotting frontend.

Produces, under frontend/examples/:
  sweep_gk_ms.json   eps-sweep verdict (convergence figure input)
  gk_series.csv      kinetic time series (entropy trace input)
  rao_series.csv     isothermal macro run with the quadratic functional E_R
  bb_snapshot.csv    terminal Brinkman-run snapshot (field plot input)
"""

import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from mbgk.core import Grid1D, MacroStateBT, MixtureParams, VelocityGrid1D
from mbgk.config import FourierProfile, RunConfig
from mbgk.diagnostics import DiagnosticsRecord, write_series_csv
from mbgk import harness, macro_bt as bt
from mbgk.macro_bt import BTMode

OUT = os.path.join(os.path.dirname(__file__), "..", "frontend", "examples")


def profiles(specs):
    return {k: FourierProfile(*v) for k, v in specs.items()}


def gk_config(ncells=64, outdir=OUT):
    p = MixtureParams(N=2, m=np.ones(2), nu_matrix=np.ones((2, 2)), eps=0.1)
    return RunConfig(
        model="gk", params=p, grid=Grid1D(L=1.0, ncells=ncells),
        vgrid=VelocityGrid1D(xi_max=8.0, nnodes=64), t_end=0.1, cfl=0.9,
        cadence=10, outdir=outdir,
        profiles=profiles({"n1": (1.0, 0.2, 1), "n2": (1.0, -0.2, 1),
                           "v1": (0.0,), "v2": (0.0,),
                           "theta1": (1.0,), "theta2": (1.0,)}))


def bb_config(outdir=OUT):
    p = MixtureParams(N=2, m=np.ones(2), nu_vec=np.ones(2),
                      a=np.array([[1.0, 0.25], [0.25, 1.0]]), eps=0.1, sigma=1.0)
    return RunConfig(
        model="brinkman", params=p, grid=Grid1D(L=1.0, ncells=64),
        vgrid=VelocityGrid1D(xi_max=8.0, nnodes=64), t_end=0.02, cfl=0.9,
        cadence=10, outdir=outdir,
        profiles=profiles({"n1": (1.0, 0.2, 1), "n2": (1.0, -0.15, 1),
                           "v1": (0.0,), "v2": (0.0,),
                           "theta1": (1.0,), "theta2": (1.0,)}))


def make_rao_series(path):
    p = MixtureParams(N=2, m=np.ones(2), nu_vec=np.ones(2),
                      a=np.array([[1.0, 0.3], [0.3, 1.0]]), eps=0.1, sigma=0.3)
    grid = Grid1D(L=1.0, ncells=128)
    x = grid.x
    st = MacroStateBT(rho=np.stack([1 + 0.15 * np.cos(2 * np.pi * x),
                                    1 - 0.1 * np.cos(2 * np.pi * x)]),
                      theta=np.ones((2, 128)))
    _, samples = bt.run_bt(st, p, grid, 0.02, BTMode.ISOTHERMAL, sample_every=10)
    records = []
    for k, (t, s) in enumerate(samples):
        records.append(DiagnosticsRecord(
            step=k, t=t, masses=np.sum(s.rho, axis=1) * grid.dx, momentum=0.0,
            energy=float(1.5 * np.sum(s.rho * s.theta) * grid.dx),
            entropy=bt.bt_entropy(s, p, grid),
            extra={"E_R": bt.rao_entropy(s, p, grid)}))
    write_series_csv(path, records, 2)


def main():
    os.makedirs(OUT, exist_ok=True)
    res = harness.eps_sweep(gk_config(), [0.2, 0.1, 0.05, 0.025], tag="sweep_gk_ms")
    os.replace(os.path.join(OUT, "sweep_gk_ms_result.json"),
               os.path.join(OUT, "sweep_gk_ms.json"))
    os.remove(os.path.join(OUT, "sweep_gk_ms_reference.csv"))
    print("sweep rates:", {k: round(v, 3) for k, v in res["rates"].items()})

    run = harness.run_case(gk_config(ncells=32), tag="gk")
    os.replace(run.files["series"], os.path.join(OUT, "gk_series.csv"))
    os.remove(run.files["snapshot"])
    os.remove(run.files["config"])

    run = harness.run_case(bb_config(), tag="bb")
    os.replace(run.files["snapshot"], os.path.join(OUT, "bb_snapshot.csv"))
    os.remove(run.files["series"])
    os.remove(run.files["config"])

    make_rao_series(os.path.join(OUT, "rao_series.csv"))
    print("wrote examples to", os.path.abspath(OUT))


if __name__ == "__main__":
    main()
