"""chaoscope command line: run, sweep, baseline, report."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_RESOURCE = 4


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="chaoscope",
        description="Spectral and dynamical quantum-chaos diagnostics for "
                    "Dicke-type models.  Config files are flat key = value "
                    "sections; see README for all keys and defaults.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute the pipeline for one config")
    run.add_argument("config", help="path to a run config file")

    sweep = sub.add_parser("sweep", help="run a g sweep and aggregate scan files")
    sweep.add_argument("config", help="path to a run config file")

    base = sub.add_parser("baseline", help="sample a random-matrix baseline")
    base.add_argument("--kind", required=True,
                      choices=["goe", "ginue", "poisson1d", "poisson2d"])
    base.add_argument("--n", type=int, required=True, help="matrix/sample size")
    base.add_argument("--realizations", "-r", type=int, default=20)
    base.add_argument("--seed", "-s", type=int, default=0)
    base.add_argument("--indicator", default="nnsd",
                      choices=["nnsd", "sff", "dsff"])
    base.add_argument("--out", default=".", help="output directory")
    base.add_argument("--write-table", action="store_true",
                      help="write the NNSD as a versioned reference table")

    rep = sub.add_parser("report", help="summarize a finished run directory")
    rep.add_argument("run_dir")
    return ap


def _cmd_run(args, aggregate: bool) -> int:
    from .pipeline import ConfigError, execute, load_config

    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        manifest = execute(cfg, aggregate=aggregate)
    except MemoryError as exc:
        print(f"resource cap exceeded: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ValueError, RuntimeError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    n_fail = len(manifest["failures"])
    solves = manifest["eigensolves"]
    print(f"{len(manifest['points'])} points done, {n_fail} failed; "
          f"eigensolves: {solves['total'] - solves['cache_hits']} computed, "
          f"{solves['cache_hits']} cache hits")
    for rec in manifest["failures"]:
        print(f"  failed at g={rec['g_input']} gamma={rec['gamma']}: "
              f"{rec['error']}", file=sys.stderr)
    return EXIT_OK


def _cmd_baseline(args) -> int:
    import numpy as np

    from .baselines import EnsembleSpec, ensemble_curve, write_nnsd_table
    from .pipeline import _write_csv

    spec = EnsembleSpec(args.kind, args.n, args.realizations, args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.indicator == "nnsd":
        if args.write_table:
            path = out / f"ref_nnsd_{args.kind}.csv"
            write_nnsd_table(spec, path)
        else:
            hist = ensemble_curve(spec, "nnsd")
            path = out / f"nnsd_{args.kind}.csv"
            _write_csv(path, ["bin_center", "pdf"], zip(hist.centers, hist.pdf))
    else:
        curve = ensemble_curve(spec, args.indicator)
        path = out / f"{args.indicator}_{args.kind}.csv"
        sem = curve.sem if curve.sem is not None else np.zeros_like(curve.raw)
        _write_csv(path, ["t", "value", "sem"],
                   zip(curve.abscissa, curve.raw, sem))
    print(f"wrote {path}")
    return EXIT_OK


def _cmd_report(args) -> int:
    from .pipeline import report

    try:
        summary = report(args.run_dir)
    except FileNotFoundError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CONFIG
    json.dump(summary, sys.stdout, indent=1, sort_keys=True)
    print()
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args, aggregate=False)
    if args.command == "sweep":
        return _cmd_run(args, aggregate=True)
    if args.command == "baseline":
        return _cmd_baseline(args)
    return _cmd_report(args)


if __name__ == "__main__":
    sys.exit(main())
