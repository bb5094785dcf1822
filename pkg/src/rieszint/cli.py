"""Command line: ``rieszint run <config>`` and ``rieszint verify <suite>``."""

from __future__ import annotations

import argparse
import configparser
import sys

from . import harness
from .errors import RieszIntError


def build_parser():
    p = argparse.ArgumentParser(prog="rieszint", description="Certified Riemann-type integrals of vector-valued set functions.")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment config")
    run.add_argument("config")
    run.add_argument("--tol", type=float)
    run.add_argument("--depth", type=int)
    run.add_argument("--trace", help="trace CSV path (default: <output dir>/<config name>.csv)")
    run.add_argument("--variant", choices=("indicator", "per-set"))
    run.add_argument("--seed", type=int)
    run.add_argument("--timing", action="store_true", help="record wall time in the report")

    ver = sub.add_parser("verify", help="run a verification suite")
    ver.add_argument("suite", help="one of: " + ", ".join(harness.SUITES + ("all",)))
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--trace", help="report JSON path (default: <output dir>/verify-<suite>.json)")
    return p


def _run(args):
    cfg = harness.load_config(args.config)
    if args.tol is not None:
        cfg.tol = args.tol
    if args.depth is not None:
        cfg.depth = args.depth
    if args.variant is not None:
        cfg.variant = args.variant
    if args.seed is not None:
        cfg.seed = args.seed
    cfg.validate()
    code, doc = harness.run_experiment(cfg, trace=args.trace, timing=args.timing)
    print(f"{doc['verdict']}: value={','.join(doc['value'])} bound={','.join(doc['cauchy_bound'])}")
    return code


def _verify(args):
    rep = harness.run_verification_suite(args.suite, args.seed)
    path = args.trace or harness.output_dir() / f"verify-{args.suite}.json"
    harness.dump_json(rep, path)
    for e in rep["results"]:
        print(f"{'PASS' if e['passed'] else 'FAIL'} {e['suite']}: {e['name']}")
    return 0 if rep["passed"] else 3


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return _run(args) if args.command == "run" else _verify(args)
    except (RieszIntError, OSError, configparser.Error, ValueError) as exc:
        print(f"error: {harness.summarize_error(exc)}", file=sys.stderr)
        return harness.EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
