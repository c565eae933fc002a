"""Command line interface.

Subcommands: generate, label, graph, branching-impact, dataset,
evaluate, solve. Experiment commands persist their resolved config next
to their outputs; `solve` follows the DIMACS output convention
(s/v/c lines) plus one machine-readable json line, and exits 10 for
SAT, 20 for UNSAT, 0 otherwise.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from satbranch import harness
from satbranch.cnf import parse_dimacs
from satbranch.graphx import export_graphs, to_graph
from satbranch.labeling import LabelMethod, read_labels, write_labels
from satbranch.solver import Heuristic, Result, SolverConfig, VariableOrder, solve

METHOD_NAMES = {
    "conflict": LabelMethod.CONFLICT,
    "first": LabelMethod.FIRST_VARIABLE,
    "genetic": LabelMethod.GENETIC,
}


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--heuristic", choices=["vsids", "vmtf"], default="vsids")
    p.add_argument("--budget", type=int, default=None, help="propagation limit per solve")
    p.add_argument("--seed", type=int, default=0)


def _add_worker_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="satbranch",
        description="CDCL solver with injectable branching orders, labeling, and experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write random 3-CNF instances to a directory")
    p.add_argument("--out", required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--num-vars", type=int, required=True)
    p.add_argument("--num-vars-max", type=int, default=None, help="draw n uniformly up to this")
    p.add_argument("--ratio", type=float, default=4.3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--balanced", action="store_true", help="half SAT / half UNSAT (solves each candidate)")
    p.add_argument("--status", choices=["sat", "unsat"], default=None,
                   help="keep only instances with this outcome (solves each candidate)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("label", help="label instances from a directory of .cnf files")
    p.add_argument("instances")
    p.add_argument("--method", choices=sorted(METHOD_NAMES), required=True)
    p.add_argument("--k", type=int, default=3, help="trials per variable (first) or population (genetic)")
    p.add_argument("--m", type=int, default=6, help="generations (genetic)")
    p.add_argument("--out", required=True)
    _add_solver_flags(p)
    _add_worker_flag(p)
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("graph", help="export instances as tripartite graphs (JSONL)")
    p.add_argument("instances")
    p.add_argument("--labels", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("branching-impact", help="per-variable first-decision cost experiment")
    p.add_argument("instances")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--sampled-vars", type=int, default=50)
    p.add_argument("--runs", type=int, default=1000)
    p.add_argument("--no-figures", action="store_true")
    _add_solver_flags(p)
    _add_worker_flag(p)
    p.set_defaults(func=cmd_branching_impact)

    p = sub.add_parser("dataset", help="generate + label + graph-export a training dataset")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--from-dir", default=None, help="label existing instances instead of generating")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--num-vars-min", type=int, default=20)
    p.add_argument("--num-vars-max", type=int, default=40)
    p.add_argument("--ratio", type=float, default=4.3)
    p.add_argument("--method", choices=sorted(METHOD_NAMES), default="conflict")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--m", type=int, default=6)
    p.add_argument("--balanced", action="store_true")
    p.add_argument("--status", choices=["sat", "unsat"], default=None)
    _add_solver_flags(p)
    _add_worker_flag(p)
    p.set_defaults(func=cmd_dataset)

    p = sub.add_parser("evaluate", help="solve under provided orders and report reductions")
    p.add_argument("instances")
    p.add_argument("--orders", required=True)
    p.add_argument("--labels", default=None, help="label file for Spearman against the reference order")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--remind-factor", type=float, default=0.0)
    p.add_argument("--remind-decay", type=float, default=0.95)
    p.add_argument("--random-baseline", action="store_true")
    p.add_argument("--no-figures", action="store_true")
    _add_solver_flags(p)
    _add_worker_flag(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("solve", help="solve a single DIMACS file")
    p.add_argument("file")
    p.add_argument("--order", default=None, help="orders JSONL; matched by file stem")
    p.add_argument("--remind-factor", type=float, default=0.0)
    p.add_argument("--remind-decay", type=float, default=0.95)
    p.add_argument("--prop-limit", type=int, default=None)
    p.add_argument("--conflict-limit", type=int, default=None)
    p.add_argument("--phase", choices=["saved", "false", "true"], default="saved")
    p.add_argument("--heuristic", choices=["vsids", "vmtf"], default="vsids")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_solve)

    return parser


def cmd_generate(args) -> int:
    num_vars_max = args.num_vars_max if args.num_vars_max is not None else args.num_vars
    entries = harness.generate_instances(
        args.count, args.num_vars, num_vars_max, args.ratio, args.seed, args.balanced, args.status
    )
    harness.write_instances(entries, args.out)
    payload = {
        "kind": "generate",
        "count": args.count,
        "num_vars_min": args.num_vars,
        "num_vars_max": num_vars_max,
        "ratio": args.ratio,
        "seed": args.seed,
        "balanced": args.balanced,
        "status": args.status,
    }
    (Path(args.out) / "config.json").write_text(
        json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    print(f"wrote {len(entries)} instances to {args.out}")
    return 0


def _dataset_config(args, count=0, num_vars_min=1, num_vars_max=1, ratio=4.3, balanced=False, status=None):
    return harness.BuildDatasetConfig(
        count=count,
        num_vars_min=num_vars_min,
        num_vars_max=num_vars_max,
        clause_ratio=ratio,
        seed=args.seed,
        method=METHOD_NAMES[args.method],
        trials_per_variable=args.k,
        population=args.k,
        generations=args.m,
        propagation_limit=args.budget,
        balanced=balanced,
        status=status,
        heuristic=Heuristic(args.heuristic),
        workers=args.workers,
    )


def cmd_label(args) -> int:
    instances = harness.load_instances(args.instances)
    config = _dataset_config(args)
    labels = harness.label_instances(instances, config)
    write_labels(labels, args.out)
    harness.persist_config(config, Path(args.out).parent, Path(args.out).name + ".config.json")
    print(f"labeled {len(labels)} instances -> {args.out}")
    return 0


def cmd_graph(args) -> int:
    instances = harness.load_instances(args.instances)
    graphs = [(instance_id, to_graph(f)) for instance_id, f in instances]
    labels = None
    if args.labels:
        labels = {r.instance_id: r for r in read_labels(args.labels)}
    export_graphs(graphs, args.out, labels=labels)
    print(f"exported {len(graphs)} graphs -> {args.out}")
    return 0


def cmd_branching_impact(args) -> int:
    instances = harness.load_instances(args.instances)
    config = harness.BranchingImpactConfig(
        sampled_variables=args.sampled_vars,
        runs_per_variable=args.runs,
        seed=args.seed,
        heuristic=Heuristic(args.heuristic),
        propagation_limit=args.budget,
        workers=args.workers,
        figures=not args.no_figures,
    )
    _, summaries = harness.run_branching_impact(instances, config, args.out_dir)
    for s in summaries:
        best = f"{s.best_speedup_pct:.1f}%" if s.best_speedup_pct is not None else "n/a"
        top10 = f"{s.top10_speedup_pct:.1f}%" if s.top10_speedup_pct is not None else "n/a"
        print(
            f"{s.instance_id}: median {s.median_propagations:.1f} props, "
            f"best speedup {best}, top-10% speedup {top10}"
        )
    return 0


def cmd_dataset(args) -> int:
    config = _dataset_config(
        args, args.count, args.num_vars_min, args.num_vars_max, args.ratio, args.balanced, args.status
    )
    labels = harness.run_build_dataset(config, args.out_dir, source_dir=args.from_dir)
    print(f"dataset with {len(labels)} labeled instances -> {args.out_dir}")
    return 0


def cmd_evaluate(args) -> int:
    instances = harness.load_instances(args.instances)
    orders = harness.read_orders(args.orders)
    labels = None
    if args.labels:
        labels = {r.instance_id: r for r in read_labels(args.labels)}
    config = harness.EvaluateConfig(
        seed=args.seed,
        heuristic=Heuristic(args.heuristic),
        propagation_limit=args.budget,
        remind_factor=args.remind_factor,
        remind_decay=args.remind_decay,
        random_baseline=args.random_baseline,
        workers=args.workers,
        figures=not args.no_figures,
    )
    _, _, summaries = harness.run_evaluate(instances, orders, config, args.out_dir, labels=labels)
    for name, s in summaries:
        ci = (
            f" CI [{s.reduction_ci[0]:.4f}, {s.reduction_ci[1]:.4f}]"
            if s.reduction_ci
            else ""
        )
        rho = f", mean spearman {s.mean_spearman:.4f}" if s.mean_spearman is not None else ""
        print(f"{name}: n={s.count}, mean reduction {s.mean_reduction:.4f}{ci}{rho}")
    return 0


def cmd_solve(args) -> int:
    path = Path(args.file)
    formula = parse_dimacs(path.read_text(encoding="utf-8"), source_name=path.name)
    order = None
    if args.order:
        entries = harness.read_orders(args.order)
        if path.stem in entries:
            order = entries[path.stem].order
        elif len(entries) == 1:
            order = next(iter(entries.values())).order
        else:
            print(f"error: no order for instance {path.stem!r} in {args.order}", file=sys.stderr)
            return 2
    config = SolverConfig(
        heuristic=Heuristic(args.heuristic),
        injected_order=order,
        remind_factor=args.remind_factor,
        remind_decay=args.remind_decay,
        seed=args.seed,
        phase_default=args.phase,
        propagation_limit=args.prop_limit,
        conflict_limit=args.conflict_limit,
    )
    stats = solve(formula, config)

    print(f"c file {path.name}")
    print(f"c vars {formula.num_vars} clauses {formula.num_clauses}")
    print(f"c heuristic {args.heuristic} order {'injected' if order else 'default'}")
    if stats.result is Result.SAT:
        print("s SATISFIABLE")
        lits = [v if stats.model[v] else -v for v in sorted(stats.model)]
        print("v " + " ".join(str(l) for l in lits) + " 0")
    elif stats.result is Result.UNSAT:
        print("s UNSATISFIABLE")
    else:
        print("s UNKNOWN")
    print(
        f"c propagations {stats.propagations} conflicts {stats.conflicts} "
        f"decisions {stats.decisions} restarts {stats.restarts}"
    )
    print(f"c wall_time_s {stats.wall_time:.6f}")
    machine = {
        "result": stats.result.value,
        "propagations": stats.propagations,
        "conflicts": stats.conflicts,
        "decisions": stats.decisions,
        "restarts": stats.restarts,
        "first_decision_var": stats.first_decision_var,
        "wall_time_s": round(stats.wall_time, 6),
    }
    print("json " + json.dumps(machine, sort_keys=True, separators=(",", ":")))
    if stats.result is Result.SAT:
        return 10
    if stats.result is Result.UNSAT:
        return 20
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
