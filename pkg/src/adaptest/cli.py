"""Command-line interface: ``adaptest test | simulate | null-table``.

Exit status is 0 when a command completes (whether or not the test
rejects), 2 for unusable input and 3 for numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .core import RngSpec, load_dataset
from .errors import AdaptestError, InputError, NumericalError
from .families import FAMILIES, get_family
from .nulldist import quantiles, simulate_null_paths, simulate_null_series
from .report import format_report, table_header, write_report, write_table
from .sim import DEFAULT_OPTIONS, SCENARIOS, TESTS, ScenarioSpec, results_table, run_study
from .smooth import KERNELS, KernelSpec
from .transform import TestOptions, wn_statistic

EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL = 0, 2, 3


def _bandwidth(text: str):
    if text == "rule":
        return "rule"
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bandwidth must be 'rule' or a number, got {text!r}")
    if not value > 0:
        raise argparse.ArgumentTypeError("bandwidth must be positive")
    return value


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _add_test_options(p: argparse.ArgumentParser, spherical_default) -> None:
    g = p.add_argument_group("test options")
    g.add_argument("--x0-quantile", type=float, default=0.99,
                   help="truncation quantile of the fitted index (default 0.99)")
    g.add_argument("--kernel", choices=sorted(KERNELS), default="quartic")
    g.add_argument("--bandwidth", type=_bandwidth, default="rule",
                   help="'rule' (1.06 sd n^-1/5) or a positive number")
    g.add_argument("--variance-mode", choices=("homoscedastic", "smoothed"), default="homoscedastic")
    g.add_argument("--grid", type=int, default=64, help="direction grid resolution (default 64)")
    g.add_argument("--spherical", action=argparse.BooleanOptionalAction, default=spherical_default,
                   help="use the scalar transform for elliptically distributed covariates")
    g.add_argument("--frame", choices=("adaptive", "beta"), default="adaptive")
    g.add_argument("--integration", choices=("beta", "direction"), default="beta")
    g.add_argument("--ridge-c", type=float, default=None,
                   help="override the MRER ridge constant (default log n / n)")


def _options_dict(args) -> dict:
    out = dict(
        kernel=KernelSpec(kernel=args.kernel, bandwidth=args.bandwidth),
        x0_quantile=args.x0_quantile,
        grid_resolution=args.grid,
        variance_mode=args.variance_mode,
        frame=args.frame,
        integration=args.integration,
        ridge_c=args.ridge_c,
    )
    if args.spherical is not None:
        out["spherical"] = args.spherical
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adaptest", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"adaptest {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("test", help="test a parametric single-index model on a data file")
    t.add_argument("--data", required=True, help="delimited text file (tab, comma or whitespace)")
    t.add_argument("--response", default="-1", help="response column label or index (default last)")
    t.add_argument("--no-header", action="store_true", help="the file has no header row")
    t.add_argument("--raw", action="store_true", help="do not standardize the columns")
    t.add_argument("--family", choices=sorted(FAMILIES), default="linear")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--out", help="report path; a .json sidecar is written next to it")
    _add_test_options(t, False)

    s = sub.add_parser("simulate", help="empirical rejection rates for a simulation design")
    s.add_argument("--scenario", required=True, help=f"one of {', '.join(SCENARIOS)}")
    s.add_argument("--n", type=int, default=100)
    s.add_argument("--p", type=int, default=None)
    s.add_argument("--a", type=_float_list, default=[0.0], help="amplitude(s), comma separated")
    s.add_argument("--x-law", choices=("iso", "sigma"), default="iso")
    s.add_argument("--tests", default="wn", help=f"comma-separated subset of {', '.join(TESTS)}")
    s.add_argument("--reps", type=int, default=500)
    s.add_argument("--level", type=float, default=0.05)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out", help="write the delimited table here as well as to stdout")
    _add_test_options(s, None)

    q = sub.add_parser("null-table", help="quantiles of the limiting null law")
    q.add_argument("--method", choices=("series", "paths"), default="series")
    q.add_argument("--m", type=int, default=200_000, help="number of samples")
    q.add_argument("--terms", type=int, default=200, help="series terms (series method)")
    q.add_argument("--k", type=int, default=2000, help="grid steps (paths method)")
    q.add_argument("--probs", type=_float_list, default=[0.9, 0.95, 0.99])
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out", help="write the table here as well as to stdout")
    return parser


def _resolved(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k != "func"}
    return {k: (list(v) if isinstance(v, tuple) else v) for k, v in cfg.items()}


def cmd_test(args) -> int:
    path = Path(args.data)
    if not path.is_file():
        raise InputError(f"data file not found: {path}")
    with path.open() as fh:
        d = load_dataset(fh, response_column=args.response, standardize=not args.raw,
                         header=not args.no_header)
    model = get_family(args.family, d.p)
    opts = TestOptions(**_options_dict(args), rng=RngSpec(args.seed))
    report = wn_statistic(d, model, opts)
    config = _resolved(args)
    if args.out:
        write_report(report, args.out, config)
    sys.stdout.write(format_report(report, config))
    if not report.ok:
        print(f"adaptest: {report.message}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_simulate(args) -> int:
    tests = tuple(t.strip() for t in args.tests.split(",") if t.strip())
    results = []
    options = _options_dict(args)
    for a in args.a:
        spec = ScenarioSpec(args.scenario, n=args.n, p=args.p, a=a, x_law=args.x_law)
        results += run_study(spec, tests, reps=args.reps, level=args.level,
                             rng=RngSpec(args.seed), workers=args.workers, options=options)
    config = _resolved(args)
    config["resolved_options"] = {**DEFAULT_OPTIONS,
                                  **{k: (v.__dict__ if isinstance(v, KernelSpec) else v)
                                     for k, v in options.items()}}
    body = results_table(results)
    if args.out:
        write_table(body, args.out, config)
    sys.stdout.write(table_header(config) + body)
    return EXIT_OK


def cmd_null_table(args) -> int:
    if args.m < 1000:
        print(f"adaptest: warning: m = {args.m} < 1000 gives a coarse table", file=sys.stderr)
    if any(not 0 < pr < 1 for pr in args.probs):
        raise InputError("probabilities must lie in (0, 1)")
    rng = RngSpec(args.seed)
    if args.method == "series":
        table = simulate_null_series(args.m, args.terms, rng)
    else:
        table = simulate_null_paths(args.m, args.k, rng)
    probs = np.asarray(args.probs)
    qs = quantiles(table, probs)
    body = "prob,quantile\n" + "".join(f"{p:.6g},{v:.10g}\n" for p, v in zip(probs, qs))
    config = _resolved(args)
    if args.out:
        write_table(body, args.out, config)
    sys.stdout.write(table_header(config) + body)
    return EXIT_OK


COMMANDS = {"test": cmd_test, "simulate": cmd_simulate, "null-table": cmd_null_table}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except InputError as exc:
        print(f"adaptest: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"adaptest: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except AdaptestError as exc:
        print(f"adaptest: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"adaptest: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
