#!/usr/bin/env python3
"""Run the three eps-sweeps (diffusive GK, diffusive Brinkman, high-field)
from the shipped configs and print the fitted convergence rates."""

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from mbgk.config import load_config
from mbgk import harness

CONFIGS = {
    "gk": "gk_two_species.ini",
    "bb": "bb_two_species.ini",
    "hf": "bb_highfield.ini",
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--eps", default="0.2,0.1,0.05,0.025")
    ap.add_argument("--only", choices=list(CONFIGS), default=None)
    ap.add_argument("--out", default="out/sweeps")
    args = ap.parse_args()
    eps = [float(v) for v in args.eps.split(",")]
    here = os.path.join(os.path.dirname(__file__), "configs")

    for name, fname in CONFIGS.items():
        if args.only and name != args.only:
            continue
        cfg = load_config(os.path.join(here, fname),
                          {"output.dir": os.path.join(args.out, name)})
        print(f"== sweep {name} ({cfg.model}, {cfg.regime.value}) ==")
        res = harness.eps_sweep(cfg, eps, tag=name)
        for k, r in res["rates"].items():
            mono = "monotone" if res["monotone"][k] else "NOT monotone"
            print(f"   {k}: rate {r:.3f} ({mono})")
        print("   overall:", "pass" if res["pass"] else "FAIL")


if __name__ == "__main__":
    main()
