"""Command-line entry point: ``displab {demo,suite,estimate,trace}``.

Exit status: 0 pass, 1 fail, 2 inconclusive, 3 usage or parse error.
"""

import argparse
import sys
import time

import numpy as np

from . import dsl
from .displacement import EstimatorConfig, estimate_displacement, exact_displacement
from .errors import DisplabError
from .experiments import DEMOS, DEPIERRO_X0, ExperimentReport, run_demo, run_random_suite
from .trace import emit_trace

EXIT_USAGE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text):
    return [int(t) for t in text.split(",") if t.strip()]


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--max-iter", type=int, default=None, help="estimator iteration budget")
    common.add_argument("--tol", type=float, default=None, help="stopping tolerance on difference vectors")
    common.add_argument("--json", metavar="OUT", default=None, help="write the JSON report here")

    parser = _Parser(prog="displab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("demo", parents=[common], help="run a named demonstration")
    p.add_argument("name", choices=sorted(DEMOS))

    p = sub.add_parser("suite", parents=[common], help="randomized bound suite")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--dims", type=_int_list, default=[1, 2, 5])
    p.add_argument("--m-values", type=_int_list, default=[2, 3, 4])
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("estimate", parents=[common], help="estimate v_T for an operator file")
    p.add_argument("--op", required=True, metavar="FILE")
    p.add_argument("--x0", type=float, nargs="+", default=None)

    p = sub.add_parser("trace", parents=[common], help="write CSV/SVG stage traces")
    p.add_argument("--op", required=True, metavar="FILE")
    p.add_argument("--steps", type=int, default=30)
    p.add_argument("--x0", type=float, nargs="+", default=None)
    p.add_argument("--csv", metavar="PATH", default=None)
    p.add_argument("--svg", metavar="PATH", default=None)
    return parser


def _config(args, x0=None):
    kwargs = {}
    if args.max_iter is not None:
        kwargs["max_iter"] = args.max_iter
    if args.tol is not None:
        kwargs["tol_residual_change"] = args.tol
    if x0 is not None:
        kwargs["x0"] = tuple(x0)
    return EstimatorConfig(**kwargs)


def _estimate_report(args):
    op = dsl.parse_operator_file(args.op)
    cfg = _config(args, args.x0)
    start = time.perf_counter()
    est = estimate_displacement(op, cfg)
    exact = exact_displacement(op)
    result = {"name": "estimate", "pass": bool(est.converged), **est.to_dict()}
    if exact is not None:
        result["exact"] = exact.tolist()
        result["pass"] = bool(result["pass"] and np.linalg.norm(exact - est.v_hat) <= 1e-6)
    return ExperimentReport(experiment_id=f"estimate:{args.op}", seed=0,
                            inputs={"operator": dsl.dump_operator(op), "estimator": cfg.to_dict()},
                            results=[result], wall_time=time.perf_counter() - start)


def _print_report(report, out):
    for r in report.results:
        if r["name"].startswith("trial_"):
            continue
        status = "PASS" if r["pass"] else "FAIL"
        if r.get("converged") is False:
            status = "INCONCLUSIVE"
        shown = {k: v for k, v in r.items()
                 if k not in ("name", "pass") and isinstance(v, (int, float, bool))}
        print(f"{status:12s} {r['name']} {shown}", file=out)
    print(f"verdict: {report.verdict}", file=out)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "trace":
            op = dsl.parse_operator_file(args.op)
            x0 = args.x0
            if x0 is None:
                x0 = DEPIERRO_X0 if op.dim == 2 else np.zeros(op.dim)
            records = emit_trace(op, x0, args.steps, args.csv, args.svg)
            print(f"wrote {len(records)} trace points", file=sys.stdout)
            return 0
        if args.command == "demo":
            report = run_demo(args.name)
        elif args.command == "suite":
            report = run_random_suite(args.trials, args.seed, args.dims, args.m_values,
                                      config=_config(args), workers=args.workers)
        else:
            report = _estimate_report(args)
    except (DisplabError, ValueError, OSError) as exc:
        print(f"displab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.json:
        report.write(args.json)
    _print_report(report, sys.stdout)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
