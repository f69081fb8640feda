"""ptkl command line: figure data as CSV, and the Monte Carlo validation suite.

Exit status is 0 on success, 1 when a validation comparison fails and 2 for
invalid arguments.
"""
import argparse
import io
import math
import sys

import numpy as np

from . import bootstrap as bs
from . import polya_tree as pt
from .errors import DomainError
from .mc_harness import write_reports
from .sampling import default_seed
from .validation import all_passed, validation_reports

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2

SENSITIVITY_ALPHAS = (0.05, 0.1, 0.3, 1.0)
SENSITIVITY_DELTAS = (1.01, 1.1, 1.5, 2.0)
BOOTSTRAP_NS = (2, 3, 5, 10, 20, 50, 100, 200, 500, 1000)


def _floats(text):
    try:
        values = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _ints(text):
    try:
        values = tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _schedules(text):
    names = tuple(v.strip().lower() for v in text.split(",") if v.strip())
    bad = [n for n in names if n not in bs.SCHEDULES]
    if bad or not names:
        raise argparse.ArgumentTypeError(f"schedules must be among {', '.join(bs.SCHEDULES)}")
    return names


def _u64(text):
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def cmd_pt_moments(args, out):
    grid = pt.figure_grid(args.alpha, args.delta, args.levels)
    pt.write_moment_csv(pt.moment_table(grid), out)
    return EXIT_OK


def cmd_pt_sensitivity(args, out):
    out.write("panel,alpha,delta,M,mean_fwd\n")
    panels = [("alpha", a, args.fixed_delta) for a in args.alpha] + [
        ("delta", args.fixed_alpha, d) for d in args.delta
    ]
    for panel, alpha, delta in panels:
        for levels in range(1, args.levels + 1):
            spec = pt.PolyaTreeSpec(alpha, pt.RhoFamily.polynomial(delta), levels)
            out.write(f"{panel},{pt.fmt(alpha)},{pt.fmt(delta)},{levels},"
                      f"{pt.fmt(pt.mean_kl_forward(spec))}\n")
    return EXIT_OK


def default_contour_grid():
    alphas = tuple(np.geomspace(0.05, 5.0, 20))
    deltas = tuple(np.linspace(1.01, 4.0, 20))
    return alphas, deltas


def cmd_pt_contour(args, out):
    alphas, deltas = default_contour_grid()
    alphas = args.alpha or alphas
    deltas = args.delta or deltas
    out.write("alpha,delta,log_mean_fwd,log_var_fwd\n")
    for alpha in alphas:
        for delta in deltas:
            spec = pt.PolyaTreeSpec(alpha, pt.RhoFamily.polynomial(delta), args.levels)
            out.write(f"{pt.fmt(alpha)},{pt.fmt(delta)},"
                      f"{pt.fmt(math.log(pt.mean_kl_forward(spec)))},"
                      f"{pt.fmt(math.log(pt.var_kl_forward(spec)))}\n")
    return EXIT_OK


def cmd_bootstrap_moments(args, out):
    schedules = [bs.AlphaSchedule(kind, args.alpha) for kind in args.schedule]
    bs.write_bootstrap_csv(bs.bootstrap_table(args.n, schedules), out)
    return EXIT_OK


def cmd_validate(args, out):
    reports = validation_reports(args.seed, args.workers, args.draws, args.freq_draws)
    write_reports(reports, out)
    failed = [r.label for r in reports if not r.passed]
    for label in failed:
        print(f"FAIL {label}", file=sys.stderr)
    return EXIT_OK if all_passed(reports) else EXIT_FAILED


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_u64, default=None,
                        help="master seed (default $PTKL_SEED or 42)")
    common.add_argument("--workers", type=_positive_int, default=1)
    common.add_argument("--out", default="-", help="output CSV path, '-' for stdout")

    parser = argparse.ArgumentParser(prog="ptkl", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pt-moments", parents=[common],
                       help="closed-form KL moments over M for the four rho families")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=2.0)
    p.add_argument("--levels", type=_positive_int, default=10, help="largest M")
    p.set_defaults(func=cmd_pt_moments)

    p = sub.add_parser("pt-sensitivity", parents=[common],
                       help="forward-KL mean over M for varying alpha and delta")
    p.add_argument("--alpha", type=_floats, default=SENSITIVITY_ALPHAS)
    p.add_argument("--delta", type=_floats, default=SENSITIVITY_DELTAS)
    p.add_argument("--fixed-alpha", type=float, default=1.0, help="alpha while delta varies")
    p.add_argument("--fixed-delta", type=float, default=2.0, help="delta while alpha varies")
    p.add_argument("--levels", type=_positive_int, default=10)
    p.set_defaults(func=cmd_pt_sensitivity)

    p = sub.add_parser("pt-contour", parents=[common],
                       help="log mean and log variance of the forward KL over (alpha, delta)")
    p.add_argument("--alpha", type=_floats, default=None)
    p.add_argument("--delta", type=_floats, default=None)
    p.add_argument("--levels", type=_positive_int, default=10)
    p.set_defaults(func=cmd_pt_contour)

    p = sub.add_parser("bootstrap-moments", parents=[common],
                       help="Bayesian-bootstrap KL moments over n for each alpha_n schedule")
    p.add_argument("--n", type=_ints, default=BOOTSTRAP_NS)
    p.add_argument("--schedule", type=_schedules, default=bs.SCHEDULES)
    p.add_argument("--alpha", type=float, default=1.0)
    p.set_defaults(func=cmd_bootstrap_moments)

    p = sub.add_parser("validate", parents=[common],
                       help="Monte Carlo against every closed form; exit 1 on failure")
    p.add_argument("--draws", type=_positive_int, default=200_000)
    p.add_argument("--freq-draws", type=_positive_int, default=100_000)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.seed is None:
            args.seed = default_seed()
        buf = io.StringIO()
        status = args.func(args, buf)
    except (DomainError, IndexError) as exc:
        parser.print_usage(sys.stderr)
        print(f"ptkl {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out == "-":
        sys.stdout.write(buf.getvalue())
    else:
        with open(args.out, "w", newline="") as fh:
            fh.write(buf.getvalue())
    return status


if __name__ == "__main__":
    sys.exit(main())
