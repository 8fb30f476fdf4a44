"""Command line front end.

Exit codes: 0 success (threshold holds), 1 threshold does not hold,
2 the maximal conditional expectation is infinite, 3 bad input or a
violated precondition.
"""

import argparse
import sys
import time
from fractions import Fraction

from . import bounds, finiteness, modelio, optimize, oracle, saturation
from . import threshold as thresholding
from . import transform
from .errors import CmdpError


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(3, "%s: error: %s\n" % (self.prog, message))


def _rational(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError("expected a rational like 7/2: %r" % text)


def _build_parser():
    parser = _Parser(prog="cmdp", description=__doc__.splitlines()[0])
    parser.add_argument("--stats", action="store_true",
                        help="print key=value statistics to stderr")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("check-finite", help="decide finiteness of the value")
    p.add_argument("model")
    p = sub.add_parser("bound", help="print an upper bound on the value")
    p.add_argument("model")
    p = sub.add_parser("threshold", help="compare the value against a rational")
    p.add_argument("model")
    p.add_argument("--value", type=_rational, required=True,
                   help="threshold as an integer or a/b")
    p.add_argument("--rel", choices=("GE", "GT", "LE", "LT"), default="GE",
                   help="relation to test (default GE)")
    p = sub.add_parser("solve", help="compute the maximal conditional expectation")
    p.add_argument("model")
    p.add_argument("--naive", action="store_true",
                   help="use the plain fixpoint loop instead of the "
                        "level-walking improvement")
    p.add_argument("--export", metavar="PATH",
                   help="write value and scheduler as JSON")
    p = sub.add_parser("min-acyclic",
                       help="minimal conditional expectation of an acyclic model")
    p.add_argument("model")
    p = sub.add_parser("oracle", help="brute-force the value (small models only)")
    p.add_argument("model")
    p.add_argument("--cap", type=int, default=10 ** 6,
                   help="largest scheduler space to enumerate")
    return parser


def _load(path):
    with open(path) as handle:
        return modelio.parse_model(handle.read()).mdp


def _print_infinite(verdict, stats):
    print("infinite (%s)" % verdict.kind)
    for state, label in verdict.witness:
        print("  %s %s" % (state, label))
    stats["finite"] = 0


def _prepare(m, stats):
    """Shared pipeline front: canonical model, bound and saturation."""
    verdict = finiteness.check_finiteness(m)
    stats["scale_factor"] = verdict.scale.factor
    if not verdict.finite:
        return verdict, None, None
    ub = bounds.upper_bound(verdict.canonical)
    sat = saturation.saturation_point(verdict.canonical, ub)
    stats["upper_bound"] = ub / verdict.scale.factor
    stats["saturation_point"] = 0 if sat.point is None else sat.point
    return verdict, ub, sat


def _run(args, stats):
    m = _load(args.model)
    if args.command == "min-acyclic":
        res = transform.min_conditional_acyclic(m)
        print(res.value)
        return 0

    if args.command == "check-finite":
        verdict = finiteness.check_finiteness(m)
        stats["scale_factor"] = verdict.scale.factor
        if not verdict.finite:
            _print_infinite(verdict, stats)
            return 2
        stats["finite"] = 1
        print("finite")
        return 0

    if args.command == "solve":
        res = optimize.solve_model(m, naive=args.naive)
        if not res.verdict.finite:
            _print_infinite(res.verdict, stats)
            return 2
        stats["scale_factor"] = res.verdict.scale.factor
        stats["upper_bound"] = res.upper_bound
        stats["saturation_point"] = res.scheduler.saturation
        stats["threshold_calls"] = res.threshold_calls
        stats["accepted_values"] = ",".join(str(v) for v in res.accepted)
        print(res.value)
        if args.export:
            with open(args.export, "w") as handle:
                handle.write(modelio.export_result(res, res.scheduler))
        return 0

    verdict, ub, sat = _prepare(m, stats)
    if not verdict.finite:
        _print_infinite(verdict, stats)
        return 2

    if args.command == "bound":
        print(ub / verdict.scale.factor)
        return 0

    if args.command == "threshold":
        thr = args.value * verdict.scale.factor
        ok, ans = thresholding.decide(verdict.canonical, thr, args.rel, sat)
        stats["threshold_calls"] = 1
        if ans.value is not None:
            stats["scheduler_value"] = ans.value / verdict.scale.factor
        print("yes" if ok else "no")
        return 0 if ok else 1

    if args.command == "oracle":
        value, _ = oracle.brute_force_max(verdict.canonical, sat, cap=args.cap)
        print(value / verdict.scale.factor)
        return 0

    raise AssertionError("unhandled command %r" % (args.command,))


def main(argv=None):
    args = _build_parser().parse_args(argv)
    stats = {}
    begin = time.monotonic()
    try:
        code = _run(args, stats)
    except (CmdpError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 3
    finally:
        if args.stats:
            stats["wall_seconds"] = "%.3f" % (time.monotonic() - begin)
            for key in stats:
                print("%s=%s" % (key, stats[key]), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
