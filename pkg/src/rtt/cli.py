"""Command-line front end: solve, gen, eval.

Exit codes: 0 ok, 2 parse/flag error, 3 incompatible algorithm or
instance family, 4 oracle size guard refusal, 5 infeasible flow.  The
RTT_SIZE_GUARD environment variable ('ARCS' or 'ARCS,BUDGET') widens the
oracle's size guard for `solve --algo exact`.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import approx, oracle, series_parallel
from .errors import (
    IncompatibleAlgorithmError,
    InvalidFlowError,
    InvalidInstanceError,
    ParseError,
    RttError,
    SizeGuardError,
)
from .flows import LowerBoundedFlowProblem  # noqa: F401  (re-export for scripts)
from .generators import (
    gen_numeric_3dm,
    gen_parallel_mm,
    gen_partition,
    gen_sat_general,
    gen_sat_splitting,
    GeneratedInstance,
    mm_cell_time,
    parse_formula,
)
from .lp import build_lp
from .model import NODE_JOBS, FlowAssignment, evaluate, validate_flow
from .rat import format_rational, parse_rational
from .serialize import (
    read_flow,
    read_instance,
    save_certificate,
    save_flow,
    save_instance,
)
from .transform import activity_on_arc, two_tuple_expand

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INCOMPATIBLE = 3
EXIT_GUARD = 4
EXIT_INFEASIBLE = 5

ALGOS = ("bicriteria", "kway5", "binary4", "binary-improved", "sp", "exact")


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rtt",
                                     description="resource-time tradeoff solvers")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve an instance file")
    p_solve.add_argument("file")
    p_solve.add_argument("--algo", required=True, choices=ALGOS)
    p_solve.add_argument("--budget", type=int, default=None,
                         help="resource budget (default: the instance's)")
    p_solve.add_argument("--alpha", default="1/2",
                         help="rounding threshold for --algo bicriteria (e.g. 1/2 or 0.25)")
    p_solve.add_argument("--emit-flow", metavar="PATH", default=None,
                         help="write the witness flow as a flow file")
    p_solve.add_argument("--dump-lp", metavar="PATH", default=None,
                         help="write the relaxation LP in LP text format")
    p_solve.add_argument("--report-dir", metavar="DIR", default=None,
                         help="write CSV tables and figures of the solution")

    p_gen = sub.add_parser("gen", help="generate a benchmark instance")
    p_gen.add_argument("kind", choices=("sat", "sat-split", "partition", "3dm", "mm"))
    p_gen.add_argument("--out", required=True)
    p_gen.add_argument("--formula", help="clauses like '1,-2,3;-1,2,3' (sat, sat-split)")
    p_gen.add_argument("--family", choices=("kway", "binary"), default="binary",
                       help="duration family for sat-split")
    p_gen.add_argument("--set", dest="values", help="comma-separated integers (partition)")
    p_gen.add_argument("--a", help="comma-separated integers (3dm)")
    p_gen.add_argument("--b", help="comma-separated integers (3dm)")
    p_gen.add_argument("--c", help="comma-separated integers (3dm)")
    p_gen.add_argument("--n", type=int, help="matrix dimension (mm)")
    p_gen.add_argument("--h", type=int, help="reducer height (mm)")

    p_eval = sub.add_parser("eval", help="evaluate a flow against an instance")
    p_eval.add_argument("file")
    p_eval.add_argument("--flow", required=True)
    p_eval.add_argument("--report-dir", metavar="DIR", default=None)
    return parser


def _load_arc_instance(path):
    instance = read_instance(path)
    if instance.form == NODE_JOBS:
        instance, _ = activity_on_arc(instance)
    return instance


def _print_solution(algo, makespan, resource_used, guarantee):
    res_factor, mk_factor = guarantee
    print(f"algo: {algo}")
    print(f"makespan: {format_rational(makespan)}")
    print(f"resource_used: {resource_used}")
    print(f"guarantee: resource {format_rational(res_factor)}, "
          f"makespan {format_rational(mk_factor)}")


def _cmd_solve(args) -> int:
    instance = _load_arc_instance(args.file)
    budget = instance.budget if args.budget is None else args.budget
    if budget < 0:
        raise ParseError("budget must be non-negative")
    if args.dump_lp:
        expanded, _ = two_tuple_expand(instance)
        with open(args.dump_lp, "w") as fh:
            fh.write(build_lp(expanded, budget).to_lp_text())

    if args.algo == "exact":
        guard = oracle.guard_from_env()
        makespan, flow = oracle.brute_min_makespan(instance, budget, guard=guard)
        schedule = evaluate(instance, flow, budget=budget)
        _print_solution("exact", makespan, flow.value(instance), (Fraction(1), Fraction(1)))
    elif args.algo == "sp":
        tree = series_parallel.sp_recognize(instance)
        if tree is None:
            print("not series-parallel", file=sys.stderr)
            return EXIT_INCOMPATIBLE
        makespan, table, _ = series_parallel.sp_min_makespan(tree, budget)
        needed = series_parallel.sp_min_resource(tree, makespan, budget)
        _, _, allocation = series_parallel.sp_min_makespan(tree, needed)
        tree_leaves = series_parallel.leaves(tree)
        flow = FlowAssignment({tree_leaves[pos].ref: lam
                               for pos, lam in allocation.items() if lam})
        schedule = evaluate(instance, flow, budget=needed)
        _print_solution("sp", makespan, needed, (Fraction(1), Fraction(1)))
        if args.report_dir:
            from .report import write_tradeoff_report
            write_tradeoff_report(args.report_dir, range(budget + 1), table.root_row())
    else:
        driver = {
            "bicriteria": lambda: approx.bicriteria_general(
                instance, budget, parse_rational(args.alpha)),
            "kway5": lambda: approx.kway_five_approx(instance, budget),
            "binary4": lambda: approx.binary_four_approx(instance, budget),
            "binary-improved": lambda: approx.binary_improved_bicriteria(instance, budget),
        }[args.algo]
        result = driver()
        flow, schedule, makespan = result.flow, result.schedule, result.schedule.makespan
        _print_solution(args.algo, makespan, result.resource_used, result.guarantee)

    if args.emit_flow:
        save_flow(flow, args.emit_flow)
    if args.report_dir:
        from .report import write_solve_report
        write_solve_report(args.report_dir, instance, flow, schedule)
    return EXIT_OK


def _ints(text, flag) -> list:
    try:
        return [int(x) for x in text.split(",") if x.strip() != ""]
    except (ValueError, AttributeError):
        raise ParseError(f"cannot parse {flag} value {text!r}")


def _cmd_gen(args) -> int:
    if args.kind == "sat":
        if not args.formula:
            raise ParseError("gen sat needs --formula")
        gen = gen_sat_general(parse_formula(args.formula))
    elif args.kind == "sat-split":
        if not args.formula:
            raise ParseError("gen sat-split needs --formula")
        gen = gen_sat_splitting(parse_formula(args.formula), args.family)
    elif args.kind == "partition":
        if not args.values:
            raise ParseError("gen partition needs --set")
        gen = gen_partition(_ints(args.values, "--set"))
    elif args.kind == "3dm":
        if not (args.a and args.b and args.c):
            raise ParseError("gen 3dm needs --a, --b and --c")
        gen = gen_numeric_3dm(_ints(args.a, "--a"), _ints(args.b, "--b"),
                              _ints(args.c, "--c"))
    else:  # mm
        if args.n is None or args.h is None:
            raise ParseError("gen mm needs --n and --h")
        instance = gen_parallel_mm(args.n, args.h)
        gen = GeneratedInstance(
            instance, instance.budget, None,
            {"kind": "mm", "n": args.n, "h": args.h,
             "cell_time": mm_cell_time(args.n, args.h)},
            expected_achievable=None)
    save_instance(gen.instance, args.out)
    cert_path = _cert_path(args.out)
    save_certificate(gen, cert_path)
    print(f"instance: {args.out}")
    print(f"certificate: {cert_path}")
    print(f"budget: {gen.budget}")
    print(f"target: {'-' if gen.target is None else format_rational(gen.target)}")
    if gen.provenance.get("kind") == "mm":
        print(f"cell_time: {gen.provenance['cell_time']}")
    return EXIT_OK


def _cert_path(out: str) -> str:
    return out[:-5] + ".cert.json" if out.endswith(".json") else out + ".cert"


def _cmd_eval(args) -> int:
    instance = read_instance(args.file)
    if instance.form == NODE_JOBS:
        print("eval needs jobs on arcs; generate or transform an arc-jobs instance",
              file=sys.stderr)
        return EXIT_INCOMPATIBLE
    flow = read_flow(args.flow)
    report = validate_flow(instance, flow)
    if not report.ok:
        for v in report.violations:
            print(f"violation: {v}", file=sys.stderr)
        return EXIT_INFEASIBLE
    schedule = evaluate(instance, flow)
    for v in instance.topological_order():
        print(f"T {v}: {format_rational(schedule.event_time[v])}")
    print(f"makespan: {format_rational(schedule.makespan)}")
    if args.report_dir:
        from .report import write_solve_report
        write_solve_report(args.report_dir, instance, flow, schedule)
    return EXIT_OK


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "gen":
            return _cmd_gen(args)
        return _cmd_eval(args)
    except (ParseError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (IncompatibleAlgorithmError, InvalidInstanceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCOMPATIBLE
    except SizeGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except InvalidFlowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except RttError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
