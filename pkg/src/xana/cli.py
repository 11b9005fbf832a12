"""Command-line entry point: ``xana {bounds,build,verify,run,sweep}``.

Exit codes: 0 ok, 1 verification failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import bounds
from .harness import (
    ConfigError,
    ScenarioConfig,
    build_trial,
    run_scenario,
    sweep,
    write_csv,
)
from .metrics import default_grid_db
from .network import ExtendedChannelSet
from .schemes import BeamformingPlan
from .verify import check_alignment

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG = 0, 1, 2


def _scenario_args(p):
    p.add_argument("--config", help="JSON file with ScenarioConfig fields; flags override it")
    p.add_argument("--scheme", choices=["mx2", "asymptotic", "blind"])
    p.add_argument("--M", type=int)
    p.add_argument("--K", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--no-eve", dest="include_eve", action="store_const", const=False,
                   help="asymptotic scheme without the external eavesdropper")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--pmin-db", type=float)
    p.add_argument("--pmax-db", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--experimental-blind-m", dest="experimental_blind", action="store_const", const=True,
                   help="allow the generalized blind layout for M > 3")
    p.add_argument("--out", help="output path (default: stdout)")


def load_config(args):
    base = {}
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                base = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    for key in ("scheme", "M", "K", "n", "include_eve", "seed", "trials", "workers", "experimental_blind", "out"):
        val = getattr(args, key, None)
        if val is not None:
            base[key] = val
    if any(getattr(args, k, None) is not None for k in ("pmin_db", "pmax_db", "points")):
        grid = base.get("P_grid_db") or default_grid_db()
        lo = args.pmin_db if args.pmin_db is not None else grid[0]
        hi = args.pmax_db if args.pmax_db is not None else grid[-1]
        pts = args.points if args.points is not None else len(grid)
        if pts < 2:
            raise ConfigError("--points must be >= 2")
        base["P_grid_db"] = np.linspace(lo, hi, pts).tolist()
    try:
        cfg = ScenarioConfig.from_dict(base)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg.validate()


def _emit(text, path):
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_bounds(args):
    try:
        bs = bounds.bound_set(args.M, args.K, args.n)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    print(bounds.format_table(bs))
    return EXIT_OK


def cmd_build(args):
    cfg = load_config(args)
    ch, plan = build_trial(cfg, cfg.seed)
    doc = {"config": cfg.identity(), "channels": ch.to_dict(), "plan": plan.to_dict()}
    _emit(json.dumps(doc) + "\n", cfg.out)
    return EXIT_OK


def cmd_verify(args):
    if args.input:
        try:
            with open(args.input) as fh:
                doc = json.load(fh)
            ch = ExtendedChannelSet.from_dict(doc["channels"])
            plan = BeamformingPlan.from_dict(doc["plan"])
        except (OSError, KeyError, ValueError) as exc:
            raise ConfigError(f"cannot load build file {args.input}: {exc}") from exc
        report = check_alignment(plan, ch)
    else:
        cfg = load_config(args)
        ch, plan = build_trial(cfg, cfg.seed)
        report = check_alignment(plan, ch, span_tol=cfg.align_tol, rank_factor=cfg.rank_factor)
    print(report.table())
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(report.to_json(indent=2))
    return EXIT_OK if report.overall_pass else EXIT_VERIFY


def _finish(results, cfg, summary_path):
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            write_csv(results, fh)
    else:
        write_csv(results, sys.stdout)
    if summary_path:
        with open(summary_path, "w") as fh:
            json.dump([r.to_dict() for r in results], fh, indent=2)
    aborted = sum(r.aggregate()["aborted"] for r in results)
    for r in results:
        agg = r.aggregate()
        print(f"[{r.config.scheme} M={r.config.M} K={r.config.K}] {json.dumps(agg)}", file=sys.stderr)
    return EXIT_VERIFY if aborted else EXIT_OK


def cmd_run(args):
    cfg = load_config(args)
    return _finish([run_scenario(cfg)], cfg, args.summary)


def parse_vary(items):
    vary = []
    for item in items or []:
        name, _, vals = item.partition("=")
        if not vals:
            raise ConfigError(f"--vary expects NAME=v1,v2,..., got {item!r}")
        try:
            vary.append((name.strip(), [int(v) for v in vals.split(",")]))
        except ValueError as exc:
            raise ConfigError(f"--vary {item!r}: {exc}") from exc
    return vary


def cmd_sweep(args):
    cfg = load_config(args)
    vary = parse_vary(args.vary)
    for name, vals in vary:
        for v in vals:
            cfg.replace(**{name: v}).validate()
    return _finish(sweep(cfg, vary), cfg, args.summary)


def build_parser():
    parser = argparse.ArgumentParser(prog="xana", description="Artificial noise alignment for X networks")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="closed-form SDOF bounds")
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--n", type=int)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("build", help="draw channels and build a plan, emit JSON")
    _scenario_args(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", help="audit alignment relations and ranks")
    _scenario_args(p)
    p.add_argument("--input", help="verify a JSON document written by `build`")
    p.add_argument("--json", help="also write the report as JSON")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("run", help="run a scenario, emit CSV")
    _scenario_args(p)
    p.add_argument("--summary", help="write a JSON summary here")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="run a scenario over a parameter grid, emit CSV")
    _scenario_args(p)
    p.add_argument("--vary", action="append", metavar="NAME=v1,v2", help="parameter values (M, K or n)")
    p.add_argument("--summary", help="write a JSON summary here")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, RuntimeError, NotImplementedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
