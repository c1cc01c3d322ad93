"""Command line interface.

Subcommands: reformulate, solve, bounds, thresholds, experiment, gen.
Infeasibility is a result, not an error: the exit code stays 0.
Worker count for experiments comes from the LATBNB_WORKERS env var.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import bounds as bounds_mod
from . import harness
from .exactmath import Rat
from .reformulate import (
    instance_from_json,
    instance_to_json,
    nullspace,
    rangespace,
    reformulation_to_json,
)
from .solve import bnb_with_order, reverse_bnb


def _read_json_arg(arg):
    """Accept inline JSON or @path / plain path to a JSON file."""
    text = arg
    if arg.startswith("@"):
        text = open(arg[1:]).read()
    elif not arg.lstrip().startswith("{"):
        text = open(arg).read()
    return json.loads(text)


def _cmd_reformulate(args):
    inst = instance_from_json(open(args.instance).read())
    kind = {"range": rangespace, "null": nullspace}[args.kind]
    ref = kind(inst, args.reduction)
    out = reformulation_to_json(ref)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out + "\n")
    else:
        print(out)


def _cmd_solve(args):
    inst = instance_from_json(open(args.instance).read())
    t0 = time.perf_counter()
    if args.order == "reverse":
        rep = reverse_bnb(inst, count_all=args.count_all)
    else:
        rep = bnb_with_order(inst, list(range(inst.constraint.cols)),
                             count_all=args.count_all)
    payload = {
        "feasible": rep.feasible,
        "witness": rep.witness,
        "nodes_per_level": rep.nodes_per_level,
        "total_nodes": rep.total_nodes,
        "solved_at_root": rep.solved_at_root,
        "n_solutions": rep.n_solutions,
        "wall_time": time.perf_counter() - t0,
    }
    print(json.dumps(payload))


def _cmd_bounds(args):
    q = _read_json_arg(args.query)
    query = bounds_mod.ThresholdQuery(
        n=q["n"], m=q["m"], norm_sq_bound=q["norm_sq_bound"],
        epsilon=Rat(q.get("epsilon", "1/10")),
        variant=q.get("variant", "table_actual"),
        chi_exponent=q.get("chi_exponent", "inv_m"))
    out = {"query": q, "M": bounds_mod.m_threshold(query)}
    if query.variant == "table_actual":
        k = bounds_mod.ball_radius_k(query.n - query.m, query.norm_sq_bound)
        out["k"] = k
        out["ball_points"] = bounds_mod.count_ball_points(query.n, k)
        out["gamma_bound"] = str(bounds_mod.hermite_gamma(query.n - query.m))
    print(json.dumps(out))


def _cmd_thresholds(args):
    if not args.table1:
        print("nothing to do (pass --table1)", file=sys.stderr)
        return
    t0 = time.perf_counter()
    rows = bounds_mod.table1(chi_exponent=args.chi)
    print("| n | m | k | M for 90% | M for 99% |")
    print("|---|---|---|---|---|")
    for row in rows:
        print(f"| {row['n']} | {row['m']} | {row['k']} "
              f"| {row['m_90']} | {row['m_99']} |")
    print(f"elapsed: {time.perf_counter() - t0:.1f}s", file=sys.stderr)


def _cmd_experiment(args):
    spec = _read_json_arg(args.spec)
    gen = harness.GeneratorSpec(**spec["generator"])
    pipe = harness.Pipeline(**spec.get("pipeline", {}))
    records, summary = harness.run_experiment(gen, pipe)
    if args.out:
        harness.report(records, args.out)
    print(json.dumps(summary, default=float))


def _cmd_gen(args):
    spec = harness.GeneratorSpec(**_read_json_arg(args.spec))
    for g in harness.generate(spec):
        print(instance_to_json(g.instance))


def main(argv=None):
    ap = argparse.ArgumentParser(prog="latbnb")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("reformulate", help="rangespace/nullspace reformulation")
    p.add_argument("instance")
    p.add_argument("--kind", choices=("range", "null"), required=True)
    p.add_argument("--reduction", choices=("lll", "kz", "rkz"), default="lll")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_reformulate)

    p = sub.add_parser("solve", help="reverse branch-and-bound feasibility")
    p.add_argument("instance")
    p.add_argument("--order", choices=("reverse", "given"), default="reverse")
    p.add_argument("--count-all", action="store_true", dest="count_all")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("bounds", help="M-threshold for a query")
    p.add_argument("--query", required=True,
                   help="inline JSON, @file, or a path")
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("thresholds", help="reproduce the M table")
    p.add_argument("--table1", action="store_true")
    p.add_argument("--chi", choices=("inv_m", "one"), default="inv_m")
    p.set_defaults(func=_cmd_thresholds)

    p = sub.add_parser("experiment", help="run a generator/pipeline sweep")
    p.add_argument("--spec", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("gen", help="emit generated instances as JSON lines")
    p.add_argument("--spec", required=True)
    p.set_defaults(func=_cmd_gen)

    args = ap.parse_args(argv)
    args.func(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
