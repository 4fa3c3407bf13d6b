"""Command-line entry point: ``olctkit <subcommand> ...``.

Exit codes: 0 success, 1 solver failure, 2 configuration or input error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import replace

import numpy as np

from ..ambiguity import cross_ambiguity
from ..core import Grid, OLCTError, ParameterMatrix
from ..io import (
    FormatError,
    read_json,
    read_signal,
    signal_to_dict,
    spectrum_from_dict,
    spectrum_to_dict,
    surface_to_dict,
    write_json,
    write_signal,
)
from ..pairs import certify_pair, make_nontrivial_pair
from ..stolct import stolct
from ..transforms import fast_grid, olct_fast, olct_forward, olct_inverse
from .config import ConfigError, load_config
from .generators import InvalidSpec
from .runner import execute_run, plan_runs, run_experiment

EXIT_OK, EXIT_SOLVER, EXIT_CONFIG = 0, 1, 2


class UsageError(ValueError):
    pass


def _floats(text: str, n: int | tuple, what: str):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"{what}: expected comma-separated numbers, got {text!r}") from exc
    allowed = (n,) if isinstance(n, int) else n
    if len(vals) not in allowed:
        raise UsageError(f"{what}: expected {' or '.join(map(str, allowed))} values, got {len(vals)}")
    return vals


def parse_matrix(text: str) -> ParameterMatrix:
    vals = _floats(text, (4, 6), "--matrix")
    try:
        return ParameterMatrix(*vals)
    except OLCTError as exc:
        raise UsageError(f"--matrix: {exc}") from exc


def parse_grid(text: str, what: str) -> Grid:
    start, step, count = _floats(text, 3, what)
    if count != int(count):
        raise UsageError(f"{what}: count must be an integer")
    try:
        return Grid(start, step, int(count))
    except ValueError as exc:
        raise UsageError(f"{what}: {exc}") from exc


def _cmd_olct(args) -> int:
    A = parse_matrix(args.matrix)
    if args.inverse:
        if not args.grid:
            raise UsageError("--inverse needs --grid start,step,count for the time lattice")
        spec = spectrum_from_dict(read_json(args.input))
        write_signal(args.out, olct_inverse(spec, A, parse_grid(args.grid, "--grid")))
        return EXIT_OK
    x = read_signal(args.input)
    if args.fast:
        spec = olct_fast(x, A)
    else:
        grid = parse_grid(args.grid, "--grid") if args.grid else fast_grid(x, A)
        spec = olct_forward(x, A, grid)
    write_json(args.out, spectrum_to_dict(spec))
    return EXIT_OK


def _cmd_stolct(args) -> int:
    A = parse_matrix(args.matrix)
    f = read_signal(args.input)
    phi = read_signal(args.window)
    vm = stolct(f, phi, A, parse_grid(args.shifts, "--shifts"), parse_grid(args.freqs, "--freqs"), args.window)
    if args.out.endswith(".csv"):
        # magnitude table: one row per shift, one column per frequency
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["shift"] + [f"{u:.12g}" for u in vm.freq_grid.points])
            for v, row in zip(vm.shift_grid.points, np.abs(vm.values)):
                w.writerow([f"{v:.12g}"] + [f"{m:.17g}" for m in row])
    else:
        write_json(args.out, surface_to_dict(vm.values, vm.shift_grid, vm.freq_grid, "shifts", "freqs"))
    return EXIT_OK


def _cmd_ambiguity(args) -> int:
    f = read_signal(args.input)
    g = read_signal(args.cross) if args.cross else f
    s = cross_ambiguity(f, g, parse_grid(args.lags, "--lags"), parse_grid(args.mods, "--mods"))
    write_json(args.out, surface_to_dict(s.values, s.lag_grid, s.mod_grid, "lags", "mods"))
    return EXIT_OK


def _cmd_pair(args) -> int:
    A = parse_matrix(args.matrix)
    if args.action == "make":
        if not (args.g1 and args.g2):
            raise UsageError("pair make needs --g1 and --g2")
        pair = make_nontrivial_pair(read_signal(args.g1), read_signal(args.g2), A, args.beta, args.n0)
        os.makedirs(args.out, exist_ok=True)
        write_signal(os.path.join(args.out, "x.json"), pair.x)
        write_signal(os.path.join(args.out, "y.json"), pair.y)
        report = pair.report
    else:
        if not (args.x and args.y):
            raise UsageError("pair certify needs --x and --y")
        report = certify_pair(read_signal(args.x), read_signal(args.y), A)
    summary = {
        "max_dev": report.max_dev,
        "distinct": report.distinct,
        "trivial_equivalent": report.trivial_equivalent,
        "passed": report.passed,
    }
    print(json.dumps(summary))
    if args.action == "make":
        write_json(os.path.join(args.out, "report.json"), summary)
    return EXIT_OK if report.passed else EXIT_SOLVER


def _load_cfg(path):
    try:
        raw = read_json(path)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return raw


def _cmd_recover(args) -> int:
    raw = _load_cfg(args.config)
    if args.solver:
        raw = dict(raw, solver=args.solver)
    cfg = load_config(raw)
    run = plan_runs(cfg)[0]
    row, report, truth, _ = execute_run(cfg, run)
    os.makedirs(cfg.output_path, exist_ok=True)
    if report is None:
        print(f"{cfg.solver}: {row['verdict']}", file=sys.stderr)
        return EXIT_SOLVER
    with open(os.path.join(cfg.output_path, "report.json"), "w") as fh:
        json.dump(report, fh, indent=1, sort_keys=True, allow_nan=False)
    with open(os.path.join(cfg.output_path, "truth.json"), "w") as fh:
        json.dump(signal_to_dict(truth), fh)
    print(f"{cfg.solver}: residual {row['residual']:.3e} ({row['verdict']})")
    return EXIT_OK


def _cmd_experiment(args) -> int:
    cfg = load_config(_load_cfg(args.config))
    if args.out:
        cfg = replace(cfg, output_path=args.out)
    res = run_experiment(cfg, workers=args.workers, figures=not args.no_figures)
    failed = sum(1 for r in res.rows if r["verdict"].startswith("error:"))
    print(f"{len(res.rows)} runs, {failed} failed; artifacts in {res.output_dir}")
    return res.status


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="olctkit", description="OLCT / STOLCT transforms and phase-retrieval experiments")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("olct", help="forward or inverse OLCT of a sig-json signal")
    s.add_argument("--matrix", required=True, help="a,b,c,d[,y0,w0]")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--fast", action="store_true", help="chirp-FFT path on its natural grid")
    s.add_argument("--inverse", action="store_true", help="input is a spectrum; output a signal")
    s.add_argument("--grid", help="start,step,count (u-grid forward, t-lattice inverse)")
    s.set_defaults(func=_cmd_olct)

    s = sub.add_parser("stolct", help="short-time OLCT on lattice shifts")
    s.add_argument("--matrix", required=True)
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--window", required=True)
    s.add_argument("--shifts", required=True, help="start,step,count")
    s.add_argument("--freqs", required=True, help="start,step,count")
    s.add_argument("--out", required=True, help=".csv for a magnitude table, otherwise JSON")
    s.set_defaults(func=_cmd_stolct)

    s = sub.add_parser("ambiguity", help="(cross-)ambiguity surface")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--cross", help="second signal (conjugated slot)")
    s.add_argument("--lags", required=True)
    s.add_argument("--mods", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=_cmd_ambiguity)

    s = sub.add_parser("pair", help="build or certify magnitude-ambiguous pairs")
    s.add_argument("action", choices=("make", "certify"))
    s.add_argument("--matrix", required=True)
    s.add_argument("--g1")
    s.add_argument("--g2")
    s.add_argument("--x")
    s.add_argument("--y")
    s.add_argument("--beta", type=float, default=0.0)
    s.add_argument("--n0", type=int, default=0)
    s.add_argument("--out", default="pair_out")
    s.set_defaults(func=_cmd_pair)

    s = sub.add_parser("recover", help="one recovery from a config file")
    s.add_argument("--solver", choices=("multi-olct", "stolct", "nonseparable", "bandlimited"))
    s.add_argument("--config", required=True)
    s.set_defaults(func=_cmd_recover)

    s = sub.add_parser("experiment", help="batch experiment with CSV, JSON and PNG output")
    s.add_argument("--config", required=True)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out", help="override output_path")
    s.add_argument("--no-figures", action="store_true")
    s.set_defaults(func=_cmd_experiment)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, InvalidSpec, UsageError, FormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OLCTError as exc:
        print(f"solver failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
