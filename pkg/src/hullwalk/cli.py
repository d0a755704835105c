"""Command line entry point: ``hullwalk run`` and ``hullwalk limits``."""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .config import ConfigError, parse_config
from .estimators import BudgetError
from .limits import limit_table
from .runner import run

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BUDGET = 3


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hullwalk", description="Monte Carlo experiments on random-walk convex hulls.")
    p.add_argument("--version", action="version", version=f"hullwalk {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run an experiment config; writes results.csv and manifest.txt")
    r.add_argument("config", help="path to the experiment config file")
    r.add_argument("--out", default=None, help="output directory (default: experiment/output or '.')")
    r.add_argument("--workers", type=int, default=1, help="worker processes for replicates")

    lim = sub.add_parser("limits", help="print the closed-form limit constants")
    lim.add_argument("--d", type=int, required=True, help="dimension")
    return p


def _cmd_run(args) -> int:
    try:
        cfg = parse_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.workers < 1:
        print("config error: --workers must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    out = args.out or cfg.output or "."
    try:
        rec = run(cfg, out, args.workers)
    except BudgetError as exc:
        print(f"budget error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    print(f"wrote {len(rec.rows)} rows to {out}/results.csv in {rec.wall_time:.1f}s")
    return EXIT_OK


def _cmd_limits(args) -> int:
    try:
        rows = limit_table(args.d)
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print("formula,value")
    for lim in rows:
        print(f"{lim.label},{lim.value:.12g}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    return _cmd_limits(args)


if __name__ == "__main__":
    raise SystemExit(main())
