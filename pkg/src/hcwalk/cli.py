"""Command-line front end.

Subcommands:

* ``run``    - execute a (d, q) sweep and write one CSV row per cell.
* ``fit``    - fit a scaling law to two columns of a sweep CSV.
* ``report`` - render figures from a sweep CSV next to the data.

Exit codes: 0 on success with every cell converged, 2 if any cell did not
converge, 1 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys

from .errors import CapacityError
from .fitting import FitModel, fit_scaling
from .grid import Scenario
from .quantum import DEFAULT_MAX_STEPS
from .sweep import Engine, RunMode, RunRequest, all_converged, run_experiment, write_csv


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would sys.exit(2); we want 1
        raise _UsageError(message)


def _parse_range(text: str) -> list[int]:
    """``LO:HI[:STEP]`` inclusive on both ends."""
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise _UsageError(f"bad range {text!r}; expected LO:HI or LO:HI:STEP")
    try:
        lo, hi = int(parts[0]), int(parts[1])
        step = int(parts[2]) if len(parts) == 3 else 1
    except ValueError:
        raise _UsageError(f"bad range {text!r}; entries must be integers") from None
    if step < 1 or hi < lo:
        raise _UsageError(f"bad range {text!r}; need LO <= HI and STEP >= 1")
    return list(range(lo, hi + 1, step))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hcwalk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a (d, q) sweep and emit CSV")
    run.add_argument(
        "--scenario",
        required=True,
        choices=[s.value for s in Scenario],
        help="perturbation scenario",
    )
    run.add_argument("--d", type=int, action="append", help="dimension (repeatable)")
    run.add_argument("--d-range", help="dimension range LO:HI[:STEP]")
    run.add_argument("--q", type=int, action="append", help="Hamming weight (repeatable)")
    run.add_argument("--q-range", help="Hamming weight range LO:HI[:STEP]")
    run.add_argument(
        "--mode",
        choices=[m.value for m in RunMode],
        default=RunMode.BOTH.value,
        help="which walks to run (default both)",
    )
    run.add_argument("--epsilon", type=float, default=1e-4, help="arrival threshold stop rule")
    run.add_argument(
        "--delta",
        type=float,
        help="switch to the dark-window stop rule with this gain threshold",
    )
    run.add_argument(
        "--t-window",
        type=float,
        help="dark-window length parameter (window is t_window * d steps; default 1/delta)",
    )
    run.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    run.add_argument(
        "--oracle",
        action="store_true",
        help="force the full-space walk (small d only)",
    )
    run.add_argument(
        "--engine",
        choices=[e.value for e in Engine],
        default=Engine.AUTO.value,
        help="dark-window evaluation engine (default auto)",
    )
    run.add_argument("--out", default="-", help="output CSV path (default stdout)")
    run.add_argument("--jobs", type=int, default=1, help="parallel sweep cells")

    fit = sub.add_parser("fit", help="fit a scaling law to CSV columns")
    fit.add_argument("--model", required=True, choices=[m.value for m in FitModel])
    fit.add_argument("--x-col", default="d")
    fit.add_argument("--y-col", default="tau")
    fit.add_argument("--in", dest="infile", required=True, help="input CSV")

    report = sub.add_parser("report", help="render figures from a sweep CSV")
    report.add_argument("--in", dest="infile", required=True, help="input CSV")
    report.add_argument("--outdir", help="figure directory (default: next to the CSV)")

    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    d_values: list[int] = list(args.d or [])
    if args.d_range:
        d_values.extend(_parse_range(args.d_range))
    if not d_values:
        raise _UsageError("run needs --d or --d-range")
    q_values: list[int] | None = list(args.q or [])
    if args.q_range:
        q_values.extend(_parse_range(args.q_range))
    if not q_values:
        q_values = None

    request = RunRequest(
        scenario=Scenario(args.scenario),
        d_values=tuple(d_values),
        q_values=None if q_values is None else tuple(q_values),
        mode=RunMode(args.mode),
        epsilon=args.epsilon,
        delta=args.delta,
        t_window=args.t_window,
        max_steps=args.max_steps,
        oracle=args.oracle,
        engine=Engine(args.engine),
        jobs=args.jobs,
    )
    rows = run_experiment(request)
    if args.out == "-":
        write_csv(rows, sys.stdout)
    else:
        with open(args.out, "w", newline="", encoding="utf-8") as stream:
            write_csv(rows, stream)
    return 0 if all_converged(rows) else 2


def _cmd_fit(args: argparse.Namespace) -> int:
    with open(args.infile, newline="", encoding="utf-8") as stream:
        rows = list(csv.DictReader(stream))
    points = []
    for row in rows:
        x, y = row.get(args.x_col, ""), row.get(args.y_col, "")
        if x not in ("", None) and y not in ("", None):
            points.append((float(x), float(y)))
    try:
        result = fit_scaling(points, FitModel(args.model))
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    kind = "exponent" if result.model is FitModel.POWER_LAW else "rate"
    print(
        f"model={result.model.value} {kind}={result.exponent:.6g}"
        f" coefficient={result.coefficient:.6g} residual={result.residual:.3g}"
        f" n_points={result.n_points}"
    )
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    from .plots import render_report  # matplotlib import stays off the fast paths

    for path in render_report(args.infile, args.outdir):
        print(path)
    return 0


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "fit":
            return _cmd_fit(args)
        return _cmd_report(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, CapacityError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
