"""Command line harness: ``solve``, ``converge`` and ``table``.

Exit codes: 0 success, 1 invalid input, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys

from .bench import TABLE_M, TABLE_PRESETS, BenchConfig, emit_csv, emit_plot_data, format_csv, run_convergence, solve_once
from .errors import IoFailure, NumericalError, ValidationError
from .problems import PROBLEMS, get_problem
from .scheme import ThetaParams

log = logging.getLogger("thetabsde")

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _m_list(text):
    try:
        return [int(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma separated list of integers: {text!r}") from None


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--problem", default="example1", choices=sorted(PROBLEMS))
    common.add_argument("--gh-order", type=int, default=8, help="Gauss-Hermite order (default 8)")
    common.add_argument("--gamma", type=float, default=10.0,
                        help="space half width in units of sqrt(T+S) (default 10)")
    common.add_argument("--jobs", type=int, default=1, help="threads per time level")
    common.add_argument("-v", "--verbose", action="store_true")

    theta = argparse.ArgumentParser(add_help=False)
    theta.add_argument("--theta1", type=float, default=0.5)
    theta.add_argument("--theta2", type=float, default=0.5)
    theta.add_argument("--theta3", type=float, default=0.5)

    parser = _Parser(prog="thetabsde", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", parents=[common, theta], help="single solve, prints Y0, Z0 and errors")
    p.add_argument("-M", "--m", type=int, default=35, help="time steps over [0, T+S]")

    p = sub.add_parser("converge", parents=[common, theta], help="sweep M and write CSV")
    p.add_argument("--m-list", type=_m_list, default=list(TABLE_M))
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.add_argument("--plot-data", metavar="PREFIX",
                   help="also write PREFIX_y.txt and PREFIX_z.txt with log(dt), log(err) columns")

    p = sub.add_parser("table", parents=[common], help="reproduce the preset theta sets for a problem")
    p.add_argument("--m-list", type=_m_list, default=list(TABLE_M))
    p.add_argument("--out", help="directory for one CSV per theta set")
    return parser


def _config(args):
    return BenchConfig(gh_order=args.gh_order, gamma=args.gamma, n_jobs=args.jobs)


def _params(args):
    return ThetaParams(args.theta1, args.theta2, args.theta3)


def cmd_solve(args):
    problem = get_problem(args.problem)
    est, wall = solve_once(problem, _params(args), args.m, _config(args))
    print(f"problem={problem.name} M={args.m} dt={est.grid_.dt:.6g} nodes={est.space_grid_.size}")
    print(f"Y0={est.y0_:.10g}")
    print(f"Z0={est.z0_:.10g}")
    if problem.has_exact:
        err_y, err_z = est.errors()
        print(f"err_y={err_y:.6e}")
        print(f"err_z={err_z:.6e}")
    print(f"wall_time_s={wall:.3f}")


def cmd_converge(args):
    report = run_convergence(args.problem, _params(args), args.m_list, _config(args))
    if args.out:
        emit_csv(report, args.out)
    else:
        sys.stdout.write(format_csv(report))
    if args.plot_data:
        emit_plot_data(report, f"{args.plot_data}_y.txt", "y")
        emit_plot_data(report, f"{args.plot_data}_z.txt", "z")


def cmd_table(args):
    if args.problem not in TABLE_PRESETS:
        raise ValidationError(f"no preset table for {args.problem!r}; choose from {sorted(TABLE_PRESETS)}")
    if args.out:
        try:
            os.makedirs(args.out, exist_ok=True)
        except OSError as exc:
            raise IoFailure(f"cannot create {args.out}: {exc}") from exc
    print("theta1,theta2,theta3,cr_y,cr_z,paper_cr_y,paper_cr_z")
    for thetas, (ref_y, ref_z) in TABLE_PRESETS[args.problem]:
        params = ThetaParams(*thetas)
        report = run_convergence(args.problem, params, args.m_list, _config(args))
        for row in report.rows:
            log.info("theta=%s M=%d err_y=%.3e err_z=%.3e", thetas, row.M, row.err_y, row.err_z)
        print(f"{thetas[0]:g},{thetas[1]:g},{thetas[2]:g},{report.cr_y:.3f},{report.cr_z:.3f},{ref_y:.3f},{ref_z:.3f}")
        if args.out:
            name = "theta_" + "_".join(f"{t:g}" for t in thetas) + ".csv"
            emit_csv(report, os.path.join(args.out, name))


COMMANDS = {"solve": cmd_solve, "converge": cmd_converge, "table": cmd_table}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        COMMANDS[args.command](args)
    except (ValidationError, IoFailure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
