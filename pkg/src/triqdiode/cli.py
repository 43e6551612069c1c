"""Command line front end: ``triqdiode run | steady | validate``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import __version__
from .config import ConfigError, load_config, parse_config, preset_config
from .correlations import correlation_report
from .model import common_mode_active, crossing_condition
from .steady import steady_chr, steady_ihr
from .sweep import resolve_threads, run_sweep, write_outputs
from .thermo import heat_report

log = logging.getLogger("triqdiode")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="triqdiode", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a parameter sweep and write CSV + manifest")
    run.add_argument("--config", help="JSON run configuration")
    run.add_argument("--out", required=True, help="output path prefix")
    run.add_argument("--threads", type=int, default=None,
                     help="worker processes (default: $TRIQDIODE_THREADS or 1)")
    run.add_argument("--preset", help="figure preset id; overrides the config's preset")

    steady = sub.add_parser("steady", help="print one steady state and its report as JSON")
    steady.add_argument("--config", required=True, help="JSON run configuration (base and p are used)")

    val = sub.add_parser("validate", help="run the oracle-triangle self-test")
    val.add_argument("--points", type=int, default=5, help="random points per mode")
    val.add_argument("--seed", type=int, default=0)
    return parser


def _load(args):
    if args.config:
        return load_config(args.config, preset=args.preset)
    if args.preset:
        return parse_config({}, preset_override=args.preset)
    raise ConfigError("either --config or --preset is required")


def _cmd_run(args) -> int:
    cfg = _load(args)
    threads = resolve_threads(args.threads)
    log.info("sweeping %s with %d worker(s)", cfg.preset or args.config, threads)
    rows = run_sweep(cfg, threads)
    paths = write_outputs(rows, args.out, cfg)
    failed = sum(1 for r in rows if r.diagnostics.get("error"))
    for p in paths:
        print(p)
    if failed:
        print(f"{failed} of {len(rows)} rows failed; see the error column", file=sys.stderr)
    return 0


def _matrix(m):
    return {"re": np.real(m).tolist(), "im": np.imag(m).tolist()}


def _cmd_steady(args) -> int:
    cfg = load_config(args.config)
    params = cfg.base
    out = {"params": params.as_dict(), "crossing": crossing_condition(params),
           "common_mode": common_mode_active(params)}
    if common_mode_active(params):
        dec = steady_chr(params, p=cfg.p)
        rho = dec.rho
        out.update(p=dec.p, null_dim=dec.null_dim, rho1=_matrix(dec.rho1), rho2=_matrix(dec.rho2))
    else:
        rho = steady_ihr(params)
        out["null_dim"] = 1
    out["rho"] = _matrix(rho)
    out["heat"] = heat_report(params, rho).as_dict()
    out["correlations"] = correlation_report(rho).as_dict()
    json.dump(out, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return 0


def _cmd_validate(args) -> int:
    from .validate import run_self_test

    return 0 if run_self_test(args.points, args.seed, sys.stdout) else 1


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return {"run": _cmd_run, "steady": _cmd_steady, "validate": _cmd_validate}[args.command](args)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"triqdiode: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
