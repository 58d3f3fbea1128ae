"""Command-line interface: run / sweep / verify.

Exit codes: 0 success, 1 solver invariant failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .core import ConfigError, InvariantViolation
from .config import load_config
from . import harness


def _overrides(args) -> dict:
    ov = {}
    if args.eps is not None and "," not in str(args.eps):
        ov["mixture.eps"] = float(args.eps)
    if getattr(args, "model", None):
        ov["solver.model"] = args.model
    if getattr(args, "mode", None):
        ov["solver.regime"] = args.mode
    if getattr(args, "out", None):
        ov["output.dir"] = args.out
    return ov


def _error_report(outdir, exc, kind):
    try:
        os.makedirs(outdir, exist_ok=True)
        with open(os.path.join(outdir, "error.json"), "w") as f:
            json.dump({"error": str(exc), "kind": kind}, f, indent=2, sort_keys=True)
            f.write("\n")
    except OSError:
        pass
    print(f"error ({kind}): {exc}", file=sys.stderr)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="mbgk",
        description="Multispecies BGK kinetic solvers and their cross-diffusion limits")
    sub = ap.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="advance one kinetic run to t_end")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--eps", type=float)
    p_run.add_argument("--model", choices=["gk", "brinkman"])
    p_run.add_argument("--mode", choices=["diffusive", "highfield"])
    p_run.add_argument("--out")

    p_sw = sub.add_parser("sweep", help="eps-sweep against the macroscopic limit")
    p_sw.add_argument("--config", required=True)
    p_sw.add_argument("--eps", required=True,
                      help="comma-separated decreasing list, e.g. 0.2,0.1,0.05,0.025")
    p_sw.add_argument("--model", choices=["gk", "brinkman"])
    p_sw.add_argument("--mode", choices=["diffusive", "highfield"])
    p_sw.add_argument("--out")

    p_vf = sub.add_parser("verify", help="seeded oracle/property suites")
    p_vf.add_argument("suite", choices=["mixture", "moments", "entropy",
                                        "conservation", "all"])
    p_vf.add_argument("--seed", type=int, default=1234)
    p_vf.add_argument("--out", default="out")

    args = ap.parse_args(argv)
    outdir = getattr(args, "out", None) or "out"
    try:
        if args.command == "run":
            cfg = load_config(args.config, _overrides(args))
            res = harness.run_case(cfg)
            print(f"run finished at t={res.t:.6g}; wrote {res.files['series']}")
            return 0
        if args.command == "sweep":
            cfg = load_config(args.config, _overrides(args))
            eps_list = [float(v) for v in args.eps.split(",")]
            result = harness.eps_sweep(cfg, eps_list)
            for k, r in result["rates"].items():
                mono = "monotone" if result["monotone"][k] else "NOT monotone"
                print(f"  {k}: rate {r:.3f} ({mono})")
            print("sweep:", "pass" if result["pass"] else "FAIL")
            return 0 if result["pass"] else 1
        if args.command == "verify":
            report = harness.verify(args.suite, seed=args.seed, outdir=args.out)
            print(harness.format_report(report))
            return 0 if report["pass"] else 1
    except ConfigError as exc:
        _error_report(outdir, exc, "config")
        return 2
    except InvariantViolation as exc:
        _error_report(outdir, exc, "invariant")
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
