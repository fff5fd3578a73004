"""Command line front end: ``lambda-quad run|verify|catalog|export``."""

from __future__ import annotations

import argparse
import logging
import os
import sys

from . import catalog
from .expr import ExprError
from .pipeline import ROUTES, Report, RunOptions, run_pipeline, verify_trajectories
from .problem import Problem, ProblemError, load_problem

log = logging.getLogger("lambdaquad")


def resolve(target: str) -> Problem:
    """A spec file path, or else a catalog name."""
    if os.path.exists(target):
        return load_problem(target)
    try:
        return catalog.get_problem(target)
    except KeyError as exc:
        raise ProblemError(f"{target!r} is neither a file nor a catalog problem ({exc.args[0]})") from None


def _options(args) -> RunOptions:
    return RunOptions(tol=args.tol, samples=args.samples, seed=args.seed, route=getattr(args, "route", "both"))


def _emit(report: Report, out: str | None):
    text = report.dumps()
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for f in report.failures():
        log.warning("FAILED %s", f)
    if report.error:
        log.error("error: %s", report.error)
    return 0 if report.passed else 1


def cmd_run(args) -> int:
    problem = resolve(args.spec)
    if args.csv_dir:
        os.makedirs(args.csv_dir, exist_ok=True)
    opts = _options(args)
    report = run_pipeline(problem, opts, trajectories=not args.no_trajectories)
    if args.csv_dir and problem.trajectories:
        # trajectories are recomputed only to write the CSV files
        verify_trajectories(
            problem,
            [t["ic"] for t in problem.trajectories],
            opts,
            report=Report(problem.name, opts),
            ends=[t["x_end"] for t in problem.trajectories],
            csv_dir=args.csv_dir,
        )
    return _emit(report, args.out)


def cmd_verify(args) -> int:
    problem = resolve(args.spec)
    if args.csv_dir:
        os.makedirs(args.csv_dir, exist_ok=True)
    ics = args.ic or []
    ends = [args.x_end if args.x_end is not None else problem.box.intervals["x"][1]] * len(ics)
    report = verify_trajectories(problem, ics, _options(args), ends=ends, csv_dir=args.csv_dir)
    return _emit(report, args.out)


def cmd_catalog(args) -> int:
    for name in catalog.catalog_names():
        print(name)
    return 0


def cmd_export(args) -> int:
    text = resolve(args.name).dumps() + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lambda-quad", description="Quadrature certificates from two lambda-symmetries.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--tol", type=float, default=1e-9, help="relative tolerance of identity checks")
        sp.add_argument("--samples", type=int, default=200, help="sample points per identity")
        sp.add_argument("--seed", type=int, default=1729)
        sp.add_argument("--out", help="write the JSON report here instead of stdout")
        sp.add_argument("--csv-dir", help="directory for trajectory CSV files")

    r = sub.add_parser("run", help="run the full procedure on a spec file or catalog problem")
    r.add_argument("spec")
    common(r)
    r.add_argument("--route", choices=ROUTES, default="both")
    r.add_argument("--no-trajectories", action="store_true", help="skip the trajectory checks")
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("verify", help="integrate from initial conditions and check first integrals")
    v.add_argument("spec")
    common(v)
    v.add_argument("--ic", nargs=3, type=float, action="append", metavar=("X", "U", "UX"))
    v.add_argument("--x-end", type=float, help="end of integration (default: right end of the x box)")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("catalog", help="built-in problems")
    c.add_argument("action", choices=["list"])
    c.set_defaults(func=cmd_catalog)

    e = sub.add_parser("export", help="print a catalog problem as a JSON spec")
    e.add_argument("name")
    e.add_argument("--out")
    e.set_defaults(func=cmd_export)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (ProblemError, ExprError, ValueError) as exc:
        log.error("error: %s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
