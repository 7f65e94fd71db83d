"""Command line: ``mssc generate|solve|simulate|sweep|calibrate``."""

from __future__ import annotations

import argparse
import sys

from .adaptive import Calibration
from .bench import CALIBRATION_SIZES, calibrate, parse_sweep_spec, rows_to_csv, run_sweep
from .generate import GeneratorConfig, generate
from .grid import valid_pairs
from .io import (config_from_mapping, config_to_kv, format_assignment, format_instance, read_instance,
                 read_kv, write_instance)
from .model import MSSCError
from .simulate import run_rounds
from .solvers import SOLVER_NAMES, make_solver


def _config(path: str | None, overrides: list[str]) -> GeneratorConfig:
    values = read_kv(path) if path else {}
    for item in overrides:
        if "=" not in item:
            raise MSSCError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        values[k.strip()] = v.strip()
    return config_from_mapping(values)


def _calibration(path: str | None) -> Calibration | None:
    if not path:
        return None
    kv = read_kv(path)
    return Calibration(float(kv.get("c_greedy", 1.0)), float(kv.get("c_gdc", 1.0)))


def _out(path: str | None):
    return open(path, "w", encoding="utf-8") if path and path != "-" else sys.stdout


def cmd_generate(args) -> int:
    cfg = _config(args.config, args.set)
    if args.seed is not None:
        cfg = cfg.with_(seed=args.seed)
    inst = generate(cfg)
    if args.output in (None, "-"):
        sys.stdout.write(format_instance(inst))
    else:
        write_instance(inst, args.output)
    return 0


def cmd_solve(args) -> int:
    inst = read_instance(args.instance)
    graph = valid_pairs(inst, tau=args.tau, use_grid=not args.no_grid)
    solver = make_solver(args.solver, seed=args.seed, runs=args.runs,
                         calibration=_calibration(args.calibration), g=args.g)
    res = solver(graph)
    out = _out(args.output)
    try:
        out.write(format_assignment(res, as_json=args.json))
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_simulate(args) -> int:
    cfg = _config(args.config, args.set)
    solver = make_solver(args.solver, seed=args.seed, calibration=_calibration(args.calibration))
    reports = run_rounds(cfg, solver, args.rounds, tau=args.tau, max_carry=args.max_carry)
    out = _out(args.output)
    try:
        out.write("round,score,completed,assigned,available,busy,open_tasks,time_ms\n")
        for r in reports:
            out.write(f"{r.timestamp},{r.score!r},{len(r.completed)},{len(r.assignment)},"
                      f"{r.available_workers},{r.busy_workers},{r.open_tasks},{r.wall_ms:.3f}\n")
        out.write(f"# total score {sum(r.score for r in reports)!r}\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_sweep(args) -> int:
    spec = parse_sweep_spec(read_kv(args.spec))
    rows = run_sweep(spec)
    out = _out(args.output)
    try:
        out.write(rows_to_csv(rows, with_means=not args.no_means))
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_calibrate(args) -> int:
    base = _config(args.config, args.set)
    sizes = tuple(args.sizes) if args.sizes else CALIBRATION_SIZES
    cal = calibrate(sizes, base, repeats=args.repeats)
    out = _out(args.output)
    try:
        out.write(f"c_greedy = {cal.c_greedy!r}\nc_gdc = {cal.c_gdc!r}\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_defaults(args) -> int:
    sys.stdout.write(config_to_kv(GeneratorConfig()))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mssc", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def config_args(sp):
        sp.add_argument("--config", help="key=value generator settings file")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override one generator setting (repeatable)")

    g = sub.add_parser("generate", help="write a synthetic instance file")
    config_args(g)
    g.add_argument("--seed", type=int)
    g.add_argument("-o", "--output", help="instance file (default: stdout)")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", help="solve one instance file")
    s.add_argument("instance")
    s.add_argument("--solver", choices=SOLVER_NAMES, default="greedy")
    s.add_argument("--seed", type=int, default=0, help="seed for the random baseline")
    s.add_argument("--runs", type=int, default=10, help="random baseline runs")
    s.add_argument("--tau", type=float, help="grid cell side (default: chosen from instance size)")
    s.add_argument("--no-grid", action="store_true", help="use the all-pairs scan")
    s.add_argument("--g", type=int, help="group count for gdc (default: estimated)")
    s.add_argument("--calibration", help="key=value file with c_greedy and c_gdc")
    s.add_argument("--json", action="store_true", help="JSON lines instead of plain lines")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_solve)

    r = sub.add_parser("simulate", help="run the multi-round simulation")
    config_args(r)
    r.add_argument("--rounds", type=int, default=5)
    r.add_argument("--solver", choices=SOLVER_NAMES, default="greedy")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--tau", type=float)
    r.add_argument("--max-carry", type=int, help="rounds an unfinished task stays open")
    r.add_argument("--calibration")
    r.add_argument("-o", "--output")
    r.set_defaults(func=cmd_simulate)

    w = sub.add_parser("sweep", help="run a parameter sweep and print CSV")
    w.add_argument("spec", help="key=value sweep spec file")
    w.add_argument("--no-means", action="store_true", help="omit the per-point mean rows")
    w.add_argument("-o", "--output")
    w.set_defaults(func=cmd_sweep)

    c = sub.add_parser("calibrate", help="fit the adaptive cost constants on this machine")
    config_args(c)
    c.add_argument("--sizes", type=int, nargs="+", help=f"probe sizes (default {CALIBRATION_SIZES})")
    c.add_argument("--repeats", type=int, default=3)
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_calibrate)

    d = sub.add_parser("defaults", help="print the default generator settings")
    d.set_defaults(func=cmd_defaults)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args) or 0
    except (MSSCError, OSError, ValueError) as exc:
        print(f"mssc: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
