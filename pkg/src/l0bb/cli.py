"""Command line front end.

Subcommands: fit (single penalty triple), path (decreasing lambda0 sweep),
gen (synthetic data), bench (acceptance suite).  Results are machine
readable JSON; node traces are optional JSON lines.  Exit codes: 0 when the
gap target is met, 2 when a node or time limit fires first, 1 for input or
configuration errors.  The L0BNB_LOG environment variable sets verbosity
(DEBUG, INFO, WARNING, ERROR).
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from typing import Any

import numpy as np

from ._kernels import PenaltyParams
from .bnb import solve, solve_path
from .config import SolverSettings
from .datasets import (SynthSpec, generate, lambda0_max, load_bin, load_csv,
                       normalize, save_bin, save_csv)

log = logging.getLogger("l0bb")


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad flags; the contract here is 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _float_or_auto(text: str) -> float | str:
    if text == "auto":
        return "auto"
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'auto', got {text!r}")


def _add_solver_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--lambda0", type=_float_or_auto, default="auto",
                     help="selection charge, or 'auto' for 0.1 * lambda0_max")
    sub.add_argument("--lambda2", type=float, default=1e-2,
                     help="ridge weight (default 0.01)")
    sub.add_argument("--big-m", type=_float_or_auto, default="auto",
                     help="coefficient box half-width, or 'auto' for unbounded")
    sub.add_argument("--gap", type=float, default=1e-2,
                     help="relative optimality gap target (default 0.01)")
    sub.add_argument("--int-tol", type=float, default=1e-4)
    sub.add_argument("--pd-tol", type=float, default=1e-5)
    sub.add_argument("--time-limit", type=float, default=None)
    sub.add_argument("--nodes-limit", type=int, default=None)
    sub.add_argument("--screening", choices=("auto", "on", "off"),
                     default="auto")
    sub.add_argument("--branching", choices=("strong", "frac"),
                     default="strong")
    sub.add_argument("--workers", type=int, default=1)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--output", default=None,
                     help="result file (default: stdout)")
    sub.add_argument("--trace", default=None,
                     help="write per-node JSON lines to this file")
    sub.add_argument("--no-timing", action="store_true",
                     help="report wall_time_s as null for reproducible bytes")
    sub.add_argument("--response", default=None,
                     help="CSV response column name (default: last column)")


def _load_matrix(path: str, response: str | None):
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head == b"L0BB":
        if response is not None:
            raise ValueError("--response applies to CSV input only")
        return load_bin(path)
    return load_csv(path, response=response)


def _build_settings(args, trace_cb) -> SolverSettings:
    return SolverSettings(rel_gap_target=args.gap, int_tol=args.int_tol,
                          pd_gap=args.pd_tol, screening=args.screening,
                          branching=args.branching, workers=args.workers,
                          seed=args.seed, time_limit=args.time_limit,
                          node_limit=args.nodes_limit, trace=trace_cb)


def _resolve_params(args, data) -> PenaltyParams:
    lam2 = float(args.lambda2)
    big_m = math.inf if args.big_m == "auto" else float(args.big_m)
    if args.lambda0 == "auto":
        lam0 = 0.1 * lambda0_max(data, lam2)
    else:
        lam0 = float(args.lambda0)
    return PenaltyParams(lam0, lam2, big_m)


def _settings_echo(args, params: PenaltyParams) -> dict[str, Any]:
    return {
        "lambda0": params.lambda0,
        "lambda2": params.lambda2,
        "big_m": None if math.isinf(params.big_m) else params.big_m,
        "gap": args.gap,
        "int_tol": args.int_tol,
        "pd_tol": args.pd_tol,
        "time_limit": args.time_limit,
        "nodes_limit": args.nodes_limit,
        "screening": args.screening,
        "branching": args.branching,
        "workers": args.workers,
        "seed": args.seed,
        "input": args.input,
    }


def _emit(payload: dict, output: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


class _TraceWriter:
    def __init__(self, path: str | None):
        self.fh = open(path, "w") if path else None

    def __call__(self, record: dict) -> None:
        if self.fh is not None:
            clean = {k: (None if isinstance(v, float) and not math.isfinite(v)
                         else v) for k, v in record.items()}
            self.fh.write(json.dumps(clean, sort_keys=True) + "\n")

    def close(self) -> None:
        if self.fh is not None:
            self.fh.close()


def _fit_record(data, outcome, no_timing: bool) -> dict[str, Any]:
    beta_orig = data.to_original_units(outcome.beta)
    return {
        "objective": outcome.objective,
        "lower_bound": outcome.lower_bound,
        "rel_gap": outcome.rel_gap,
        "support": [[i, beta_orig[i]] for i in sorted(beta_orig)],
        "intercept": data.intercept_for(beta_orig),
        "nodes_explored": outcome.nodes_explored,
        "status": outcome.status,
        "wall_time_s": None if no_timing else outcome.wall_time,
    }


_STATUS_EXIT = {"converged": 0, "node_limit": 2, "time_limit": 2}


def _cmd_fit(args) -> int:
    x, y = _load_matrix(args.input, args.response)
    data = normalize(x, y)
    params = _resolve_params(args, data)
    tracer = _TraceWriter(args.trace)
    try:
        outcome = solve(data, params, _build_settings(args, tracer))
    finally:
        tracer.close()
    payload = _fit_record(data, outcome, args.no_timing)
    payload["settings_echo"] = _settings_echo(args, params)
    _emit(payload, args.output)
    return _STATUS_EXIT[outcome.status]


def _cmd_path(args) -> int:
    x, y = _load_matrix(args.input, args.response)
    data = normalize(x, y)
    lam2 = float(args.lambda2)
    big_m = math.inf if args.big_m == "auto" else float(args.big_m)
    if args.grid:
        grid = [float(tok) for tok in args.grid.split(",") if tok.strip()]
        if not grid:
            raise ValueError("empty --grid")
    else:
        lam_max = lambda0_max(data, lam2)
        size = args.grid_size
        frac = args.grid_min_frac
        if size < 1 or not 0.0 < frac <= 1.0:
            raise ValueError("invalid grid shape flags")
        grid = [lam_max * frac ** (j / max(size - 1, 1)) for j in range(size)]
    tracer = _TraceWriter(args.trace)
    try:
        results = solve_path(data, lam2, big_m, grid,
                             _build_settings(args, tracer))
    finally:
        tracer.close()
    records = []
    worst = 0
    for lam0, outcome in results:
        rec = _fit_record(data, outcome, args.no_timing)
        rec["lambda0"] = lam0
        rec["support_size"] = len(rec["support"])
        records.append(rec)
        worst = max(worst, _STATUS_EXIT[outcome.status])
    echo = _settings_echo(args, PenaltyParams(grid[0] if grid else 1.0,
                                              lam2, big_m))
    echo["lambda0"] = None  # grid run, see per-record values
    _emit({"path": records, "settings_echo": echo}, args.output)
    return worst


def _cmd_gen(args) -> int:
    snr = math.inf if args.snr == "inf" else float(args.snr)
    spec = SynthSpec(n=args.n, p=args.p, k=args.k, rho=args.rho,
                     corr=args.corr, snr=snr, seed=args.seed)
    made = generate(spec)
    if args.format == "bin":
        save_bin(args.output, made.x, made.y)
    else:
        save_csv(args.output, made.x, made.y)
    summary = {"path": args.output, "format": args.format, "n": args.n,
               "p": args.p, "k": args.k, "rho": args.rho, "corr": args.corr,
               "snr": None if math.isinf(snr) else snr, "seed": args.seed,
               "planted_support": list(made.support),
               "noise_variance": made.sigma2}
    sys.stdout.write(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return 0


def _cmd_bench(args) -> int:
    from . import bench
    numbers = None
    if args.criteria:
        numbers = sorted({int(tok) for tok in args.criteria.split(",")})
    return 0 if bench.run_all(numbers) else 1


def build_parser() -> _Parser:
    parser = _Parser(prog="l0bb",
                     description="Exact sparse regression solver: least "
                                 "squares with an L0 charge, a ridge term, "
                                 "and a coefficient box.")
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="solve one penalty setting")
    fit.add_argument("input", help="dataset file (binary or CSV)")
    _add_solver_flags(fit)

    path = sub.add_parser("path", help="sweep a decreasing lambda0 grid")
    path.add_argument("input")
    _add_solver_flags(path)
    path.add_argument("--grid", default=None,
                      help="comma separated lambda0 values")
    path.add_argument("--grid-size", type=int, default=10)
    path.add_argument("--grid-min-frac", type=float, default=0.05,
                      help="smallest grid point as a fraction of lambda0_max")

    gen = sub.add_parser("gen", help="generate a synthetic dataset")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--p", type=int, required=True)
    gen.add_argument("--k", type=int, required=True)
    gen.add_argument("--rho", type=float, default=0.0)
    gen.add_argument("--corr", choices=("constant", "block"),
                     default="constant")
    gen.add_argument("--snr", default="5.0",
                     help="signal to noise ratio, or 'inf' for noiseless")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--format", choices=("bin", "csv"), default="bin")
    gen.add_argument("--output", required=True)

    bench = sub.add_parser("bench", help="run the acceptance suite")
    bench.add_argument("--criteria", default=None,
                       help="comma separated subset, e.g. 1,2,5")
    return parser


def main(argv: list[str] | None = None) -> int:
    level = os.environ.get("L0BNB_LOG", "").upper()
    if level in ("DEBUG", "INFO", "WARNING", "ERROR"):
        logging.basicConfig(stream=sys.stderr,
                            format="%(levelname)s %(name)s: %(message)s")
        log.setLevel(level)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handlers = {"fit": _cmd_fit, "path": _cmd_path, "gen": _cmd_gen,
                "bench": _cmd_bench}
    try:
        return handlers[args.command](args)
    except (OSError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
