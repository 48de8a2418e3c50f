"""Command-line front end.

Results go to stdout as JSON, a one-line summary goes to stderr. Exit codes:
0 ok, 2 bad input, 3 infeasible, 4 internal audit failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import List, Optional

from . import io
from .core import Instance, Ordering, validate_instance
from .errors import InputError, ParseError, SpeedScaleError
from .gantt import render_gantt
from .greedy import (
    fifo_ordering,
    kappa_delta,
    kappa_delta_c,
    naive_per_level_sweep,
    naive_two_speed_sweep,
)
from .lp import build_lp, export_lp, reconstruct, solve
from .metrics import evaluate
from .oracle import exact_optimum
from .reductions import (
    budget_to_fe,
    counterexample_instance,
    subsetsum_to_bidua,
    subsetsum_to_feidwu,
)

GREEDY = {
    "kd": kappa_delta,
    "naive2": naive_two_speed_sweep,
    "naiveK": naive_per_level_sweep,
}


def _load(path):
    loaded = io.load_instance(path)
    inst, shift = validate_instance(loaded.instance)
    if shift:
        print(f"note: releases shifted by {shift}", file=sys.stderr)
    return inst, loaded.ordering


def _ordering(text: Optional[str], inst: Instance, from_file: Optional[Ordering]) -> Ordering:
    if text is None:
        if from_file is not None:
            return from_file
        raise InputError("no ordering given; pass --ordering fifo or a permutation like 2,1,3")
    if text == "fifo":
        r = inst.releases
        return Ordering(tuple(sorted(range(inst.n), key=lambda j: (r[j], j))))
    try:
        perm = tuple(int(p) - 1 for p in text.split(","))
    except ValueError:
        raise ParseError(f"cannot parse ordering {text!r}") from None
    return Ordering(perm)


def _emit(doc, out: Optional[str]) -> None:
    text = io.dumps(doc)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _schedule_doc(schedule, inst, ordering=None, extra=None):
    m = evaluate(schedule, inst, ordering if ordering is not None and ordering.kind == "completion" else None)
    return io.schedule_to_dict(schedule, inst, m, ordering, extra), m


def cmd_solve_lp(args) -> int:
    inst, file_ord = _load(args.instance)
    ordering = _ordering(args.ordering, inst, file_ord)
    model = build_lp(inst, ordering)
    sol = solve(model)
    sched = reconstruct(sol, inst, ordering)
    extra = {"solver": {"method": "ordering-lp", "lp_objective": sol.objective,
                        "lp_flow_objective": sol.flow_objective}}
    doc, m = _schedule_doc(sched, inst, ordering, extra)
    _emit(doc, args.output)
    print(f"lp objective {sol.flow_objective} (with release offset {sol.objective})", file=sys.stderr)
    return 0


def cmd_solve_greedy(args) -> int:
    inst, file_ord = _load(args.instance)
    extra = {"solver": {"method": args.variant}}
    if args.variant == "kd-c":
        ordering = _ordering(args.ordering, inst, file_ord) if (args.ordering or file_ord) else (
            fifo_ordering(inst))
        sched, trace = kappa_delta_c(inst, ordering)
        sol = solve(build_lp(inst, ordering))
        m = evaluate(sched, inst, ordering)
        extra["solver"].update({
            "lp_flow_objective": sol.flow_objective,
            "greedy_extended_objective": m.extended_objective,
            "agrees_with_lp": m.extended_objective == sol.flow_objective,
            "capped": trace.capped,
        })
    elif args.variant == "kd" and args.strict:
        sched, trace = kappa_delta(inst, strict=True)
        ordering = trace.ordering
    else:
        sched, trace = GREEDY[args.variant](inst)
        ordering = trace.ordering
    extra["solver"]["steps"] = len(trace.steps)
    doc, m = _schedule_doc(sched, inst, ordering, extra)
    _emit(doc, args.output)
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write(trace.to_text())
    print(f"objective {m.objective}", file=sys.stderr)
    return 0


def cmd_oracle(args) -> int:
    inst, _ = _load(args.instance)
    res = exact_optimum(inst, args.max_n, prune=not args.no_prune)
    extra = {"solver": {"method": "oracle", "objective": res.objective,
                        "orderings_tried": res.orderings_tried,
                        "orderings_infeasible": res.orderings_infeasible}}
    doc, m = _schedule_doc(res.schedule, inst, res.ordering, extra)
    _emit(doc, args.output)
    order = ",".join(str(j + 1) for j in res.ordering.perm)
    print(f"optimal objective {res.objective} with ordering {order}", file=sys.stderr)
    return 0


def _rationals(text: str) -> List[Fraction]:
    try:
        return [Fraction(t.strip()) for t in text.split(",")]
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"cannot parse list {text!r}") from None


def cmd_reduce(args) -> int:
    kind = args.kind
    if kind == "budget-to-fe":
        if not args.instance:
            raise InputError("budget-to-fe needs an instance file")
        inst, _ = _load(args.instance)
        red = budget_to_fe(inst)
    elif kind in ("ss-to-feidwu", "ss-to-bidua"):
        if args.elements is None or args.target is None:
            raise InputError(f"{kind} needs --elements and --target")
        fn = subsetsum_to_feidwu if kind == "ss-to-feidwu" else subsetsum_to_bidua
        red = fn(_rationals(args.elements), Fraction(args.target))
    else:
        from .reductions import Reduction
        alpha = Fraction(args.alpha) if args.alpha is not None else Fraction(1, 4)
        red = Reduction(counterexample_instance(alpha), {"source": "counterexample", "alpha": alpha})
    _emit(io.instance_to_dict(red.instance, red.ordering, red.provenance), args.output)
    print(f"generated {red.instance.n} jobs ({len(red.instance.templates)} distinct)", file=sys.stderr)
    return 0


def cmd_verify(args) -> int:
    loaded = io.read_schedule(args.schedule)
    inst = loaded.instance
    ordering = loaded.ordering if loaded.ordering is not None and loaded.ordering.kind == "completion" else None
    m = evaluate(loaded.schedule, inst, ordering)
    fresh = io.metrics_to_dict(m)
    mismatched = sorted(k for k, v in loaded.metrics.items() if k in fresh and fresh[k] != _canon(v))
    _emit({"feasible": True, "metrics": fresh, "stored_metrics_match": not mismatched,
           "mismatched_fields": mismatched}, args.output)
    if mismatched:
        print(f"stored metrics disagree on {', '.join(mismatched)}", file=sys.stderr)
        return 2
    print(f"feasible, objective {m.objective}", file=sys.stderr)
    return 0


def _canon(v):
    if isinstance(v, list):
        return [_canon(x) for x in v]
    try:
        return str(Fraction(v))
    except (TypeError, ValueError):
        return v


def cmd_gantt(args) -> int:
    loaded = io.read_schedule(args.schedule)
    evaluate(loaded.schedule, loaded.instance)
    svg = render_gantt(loaded.schedule, loaded.instance, args.title or "")
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(svg)
    print(f"wrote {args.output}", file=sys.stderr)
    return 0


def cmd_export_lp(args) -> int:
    inst, file_ord = _load(args.instance)
    ordering = _ordering(args.ordering, inst, file_ord)
    text = export_lp(build_lp(inst, ordering), "ordering " + ",".join(str(j + 1) for j in ordering.perm))
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="speedscale", description="Exact speed-scaling schedules.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve-lp", help="optimal schedule for a fixed completion ordering")
    s.add_argument("instance")
    s.add_argument("--ordering", help="'fifo' or a 1-based permutation such as 2,1,3")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_solve_lp)

    s = sub.add_parser("solve-greedy", help="greedy speed-up for unit jobs")
    s.add_argument("instance")
    s.add_argument("--variant", choices=["kd", "naive2", "naiveK", "kd-c"], default="kd")
    s.add_argument("--strict", action="store_true", help="speed up only when strictly profitable")
    s.add_argument("--ordering", help="completion ordering for kd-c")
    s.add_argument("--trace", help="write the step trace to this file")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_solve_greedy)

    s = sub.add_parser("oracle", help="exact optimum by enumerating orderings")
    s.add_argument("instance")
    s.add_argument("--max-n", type=int, default=None)
    s.add_argument("--no-prune", action="store_true")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("reduce", help="generate a reduction instance")
    s.add_argument("kind", choices=["budget-to-fe", "ss-to-feidwu", "ss-to-bidua", "counterexample"])
    s.add_argument("instance", nargs="?")
    s.add_argument("--elements", help="comma-separated SubsetSum elements")
    s.add_argument("--target")
    s.add_argument("--alpha")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("verify", help="check a schedule file")
    s.add_argument("schedule")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("gantt", help="render a schedule file as SVG")
    s.add_argument("schedule")
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--title")
    s.set_defaults(func=cmd_gantt)

    s = sub.add_parser("export-lp", help="write the ordering LP in CPLEX LP format")
    s.add_argument("instance")
    s.add_argument("--ordering")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_export_lp)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SpeedScaleError as exc:
        err = {"error": type(exc).__name__, "message": str(exc), "exit_code": exc.exit_code}
        print(json.dumps(err), file=sys.stderr)
        return exc.exit_code
    except (OSError, ValueError, TypeError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc), "exit_code": 2}
        print(json.dumps(err), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
