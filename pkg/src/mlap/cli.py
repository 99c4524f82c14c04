"""Command-line interface.

Exit codes: 0 on success, 1 when a run trips an internal invariant
(`InvariantViolation`), 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys

import dataclasses

from . import harness, io, line as line_mod, single_phase as sp_mod
from .errors import InvariantViolation, MlapError
from .model import cost_of_schedule
from .offline import OracleLimits, brute_force_opt, kernel_by_name, lbl_schedule
from .engine import run_online


def _add_instance(p):
    p.add_argument("--instance", required=True, help="instance json path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mlap", description="aggregation on trees: online algorithms and exact baselines"
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("run", help="run an online algorithm on an instance")
    _add_instance(p)
    p.add_argument("--alg", required=True, choices=["deadline", "general", "deadline-reduced", "general-reduced"])
    p.add_argument("--ratio", type=float, default=None, help="weight-decay factor for self-checks / reductions")
    p.add_argument("--out", help="write the schedule as json")

    p = sub.add_parser("oracle", help="exact offline optimum (small instances)")
    _add_instance(p)
    p.add_argument("--out", help="write the optimal schedule as json")
    p.add_argument("--kernel", default="auto", help="auto, pure, or cython")
    p.add_argument("--max-grid", type=int, default=None)
    p.add_argument("--max-requests", type=int, default=None)
    p.add_argument("--max-states", type=int, default=None)

    p = sub.add_parser("lbl", help="level-by-level 2-approximation for deadline instances")
    _add_instance(p)
    p.add_argument("--out", help="write the schedule as json")

    p = sub.add_parser("gen", help="generate a seeded instance")
    p.add_argument("--family", required=True,
                   choices=["ldec-random", "random-tree", "path", "lb-deadline", "lb-linear"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--requests", type=int, default=6)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--max-nodes", type=int, default=10)
    p.add_argument("--ratio", type=float, default=2.0)
    p.add_argument("--kinds", default="deadline", help="comma list: deadline,linear,pwl")
    p.add_argument("--single-phase", action="store_true")
    p.add_argument("--count", type=int, default=10, help="size of the line lower-bound families")

    p = sub.add_parser("transform", help="rewrite an instance")
    p.add_argument("--op", required=True,
                   choices=["ratio-decreasing", "embed-discrete", "stretch", "encode-deadlines"])
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--ratio", type=float, default=2.0)
    p.add_argument("--gaps", default=None, help="comma list h:eps; omit for automatic gaps")

    p = sub.add_parser("sp-opt", help="single-phase optimum at a stop time")
    _add_instance(p)
    p.add_argument("--t", type=float, required=True)

    p = sub.add_parser("sp-doubling", help="doubling strategy on a single-phase instance")
    _add_instance(p)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--sweep", default=None, help="lo:hi:steps")
    p.add_argument("--out", help="write sweep rows as csv")

    p = sub.add_parser("line", help="half-line instances")
    line_sub = p.add_subparsers(dest="line_cmd", required=True)
    q = line_sub.add_parser("dline", help="doubled-reach deadline rule")
    _add_instance(q)
    q = line_sub.add_parser("oracle", help="single-delivery optimum at a stop time")
    _add_instance(q)
    q.add_argument("--theta", type=float, required=True)
    q = line_sub.add_parser("adversary", help="worst stop time against the doubled-reach rule")
    _add_instance(q)
    q = line_sub.add_parser("bidding", help="exact optimal online-bidding ratio")
    q.add_argument("--target", type=int, required=True)

    p = sub.add_parser("compare", help="diff two report csvs, ignoring timings")
    p.add_argument("a")
    p.add_argument("b")

    p = sub.add_parser("plot-data", help="project a report csv onto two columns")
    p.add_argument("--report", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--out", required=True)
    return parser


def _cmd_run(args) -> int:
    inst = io.load_instance(args.instance)
    trace = run_online(inst, harness.make_algorithm(args.alg, args.ratio))
    rep = trace.report
    print(f"alg={args.alg} total={rep.total:.9g} scost={rep.scost:.9g} "
          f"wcost={rep.wcost:.9g} services={len(trace.schedule)}")
    if args.out:
        io.save_schedule(trace.schedule, args.out)
    return 0


def _cmd_oracle(args) -> int:
    inst = io.load_instance(args.instance)
    limits = OracleLimits()
    overrides = {
        k: v
        for k, v in (
            ("max_grid", args.max_grid),
            ("max_requests", args.max_requests),
            ("max_states", args.max_states),
        )
        if v is not None
    }
    if overrides:
        limits = dataclasses.replace(limits, **overrides)
    schedule, cost = brute_force_opt(inst, limits=limits, kernel=args.kernel)
    print(f"opt={cost:.9g} services={len(schedule)} "
          f"kernel={kernel_by_name(args.kernel).KERNEL_NAME}")
    if args.out:
        io.save_schedule(schedule, args.out)
    return 0


def _cmd_lbl(args) -> int:
    inst = io.load_instance(args.instance)
    res = lbl_schedule(inst)
    report = cost_of_schedule(inst, res.schedule)
    print(f"lbl_scost={res.scost:.9g} total={report.total:.9g} services={len(res.schedule)}")
    if args.out:
        io.save_schedule(res.schedule, args.out)
    return 0


def _cmd_gen(args) -> int:
    if args.family in ("lb-deadline", "lb-linear"):
        gen = line_mod.gen_lb_mlapd if args.family == "lb-deadline" else line_mod.gen_lb_mlapl
        inst = gen(args.count)
        with open(args.out, "w") as fh:
            json.dump(line_mod.line_to_dict(inst), fh, indent=2)
            fh.write("\n")
        print(f"wrote line instance with {len(inst.requests)} requests to {args.out}")
        return 0
    inst = harness.gen_instance(
        args.family,
        args.seed,
        depth=args.depth,
        max_nodes=args.max_nodes,
        n_requests=args.requests,
        ratio=args.ratio,
        kinds=tuple(args.kinds.split(",")),
        single_phase=args.single_phase,
    )
    io.save_instance(inst, args.out)
    print(f"wrote {inst.tree.n}-node instance with {len(inst.requests)} requests to {args.out}")
    return 0


def _cmd_transform(args) -> int:
    from . import transforms

    if args.op == "embed-discrete":
        with open(args.inp) as fh:
            out = transforms.embed_discrete(json.load(fh))
    else:
        inst = io.load_instance(args.inp)
        if args.op == "ratio-decreasing":
            reduced = transforms.to_ratio_decreasing(inst.tree, args.ratio)
            out = inst.__class__(reduced.tree, inst.requests, inst.horizon)
        elif args.op == "stretch":
            gaps = None
            if args.gaps:
                gaps = tuple(
                    (float(h), float(e))
                    for h, e in (pair.split(":") for pair in args.gaps.split(","))
                )
            out = transforms.stretch(inst, gaps)
        else:
            out = transforms.encode_deadlines(inst)
    io.save_instance(out, args.out)
    print(f"wrote transformed instance to {args.out}")
    return 0


def _cmd_sp_opt(args) -> int:
    sp = sp_mod.SinglePhaseInstance.from_instance(io.load_instance(args.instance))
    cost, covered = sp_mod.opt_single_phase(sp, args.t)
    print(f"opt={cost:.9g} served={sorted(covered)}")
    return 0


def _cmd_sp_doubling(args) -> int:
    sp = sp_mod.SinglePhaseInstance.from_instance(io.load_instance(args.instance))
    if (args.theta is None) == (args.sweep is None):
        raise MlapError("pass exactly one of --theta and --sweep")
    if args.theta is not None:
        thetas = [args.theta]
    else:
        lo, hi, steps = args.sweep.split(":")
        lo, hi, steps = float(lo), float(hi), int(steps)
        thetas = [lo + (hi - lo) * i / max(1, steps - 1) for i in range(steps)]
    rows = sp_mod.doubling_sweep(sp, thetas)
    for row in rows:
        print(f"theta={row.theta:.9g} alg={row.alg_cost:.9g} "
              f"opt={row.opt_cost:.9g} ratio={row.ratio:.9g}")
    if args.out:
        import csv

        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["theta", "alg_cost", "opt_cost", "ratio"])
            for row in rows:
                w.writerow([f"{row.theta:.9g}", f"{row.alg_cost:.9g}",
                            f"{row.opt_cost:.9g}", f"{row.ratio:.9g}"])
    return 0


def _load_line(path) -> "line_mod.LineInstance":
    with open(path) as fh:
        return line_mod.line_from_dict(json.load(fh))


def _cmd_line(args) -> int:
    if args.line_cmd == "bidding":
        res = line_mod.bidding_optimal_ratio(args.target)
        print(f"target={res.target} ratio={res.ratio} (~{float(res.ratio):.6f}) "
              f"witness={list(res.witness)}")
        return 0
    inst = _load_line(args.instance)
    if args.line_cmd == "dline":
        trace = line_mod.dline_run(inst)
        plan = " ".join(f"{d.time:.9g}->{d.reach:.9g}" for d in trace.deliveries)
        print(f"cost={trace.cost:.9g} deliveries={plan}")
    elif args.line_cmd == "oracle":
        print(f"opt={line_mod.line_opt_expiring(inst, args.theta):.9g}")
    else:
        rep = line_mod.adaptive_adversary(inst)
        if rep.unbounded:
            print("ratio=unbounded (a stop time leaves the optimum at zero cost)")
        elif rep.worst is None:
            print("ratio=1 (nothing to stop on)")
        else:
            print(f"worst_theta={rep.worst.theta:.9g} alg={rep.worst.alg_cost:.9g} "
                  f"opt={rep.worst.opt_cost:.9g} ratio={rep.worst.ratio:.9g}")
    return 0


def _cmd_compare(args) -> int:
    diffs = harness.compare_reports(args.a, args.b)
    if not diffs:
        print("reports agree")
        return 0
    for d in diffs:
        print(d)
    return 1


def _cmd_plot_data(args) -> int:
    n = harness.emit_plot_data(args.report, args.x, args.y, args.out)
    print(f"wrote {n} points to {args.out}")
    return 0


_HANDLERS = {
    "run": _cmd_run,
    "oracle": _cmd_oracle,
    "lbl": _cmd_lbl,
    "gen": _cmd_gen,
    "transform": _cmd_transform,
    "sp-opt": _cmd_sp_opt,
    "sp-doubling": _cmd_sp_doubling,
    "line": _cmd_line,
    "compare": _cmd_compare,
    "plot-data": _cmd_plot_data,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.cmd](args)
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 1
    except MlapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"bad input: {exc!r}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
