"""Experiment orchestration over flat, replayable artifacts.

Dataset builds, labeling campaigns, the branching-impact experiment, and
order evaluation. Every run persists its resolved config next to its
outputs. All derived numbers come from seeded sub-streams, so re-running
with the same config and seeds reproduces the result files byte for byte
regardless of worker count; measured wall time is the one exception and
is quarantined in *_timing.csv sidecars.
"""

from __future__ import annotations

import csv
import hashlib
import json
import random
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from satbranch.cnf import (
    Formula,
    GeneratorConfig,
    emit_dimacs,
    generate_3cnf,
    parse_dimacs,
)
from satbranch.graphx import export_graphs, to_graph
from satbranch.labeling import (
    GeneticConfig,
    LabelMethod,
    LabelRecord,
    conflict_label,
    first_variable_label,
    genetic_label,
    read_labels,
    write_labels,
)
from satbranch.ranking import EvalRow, aggregate, mean_ci, reduction, spearman
from satbranch.solver import Heuristic, Result, SolverConfig, VariableOrder, solve


def derive_seed(master: int, tag: str) -> int:
    """Stable 64-bit sub-seed for a named task."""
    digest = hashlib.sha256(f"{master}:{tag}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


# ----------------------------------------------------------------------
# instance files


def load_instances(directory: str | Path) -> list[tuple[str, Formula]]:
    paths = sorted(Path(directory).glob("*.cnf"))
    if not paths:
        raise FileNotFoundError(f"no .cnf files in {directory}")
    return [
        (p.stem, parse_dimacs(p.read_text(encoding="utf-8"), source_name=p.name))
        for p in paths
    ]


def write_instances(entries: Sequence[tuple[str, Formula]], directory: str | Path) -> None:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    for instance_id, formula in entries:
        (out / f"{instance_id}.cnf").write_text(emit_dimacs(formula), encoding="utf-8")


def generate_instances(
    count: int,
    num_vars_min: int,
    num_vars_max: int,
    clause_ratio: float = 4.3,
    seed: int = 0,
    balanced: bool = False,
    status: str | None = None,
) -> list[tuple[str, Formula]]:
    """Random 3-CNF instances; with balanced=True, half SAT / half UNSAT.

    status="sat" or "unsat" instead keeps only instances with that outcome,
    the shape benchmark suites like SATLIB's uf50/uuf50 pairs come in.
    Both filters solve each candidate (no budget) and rejection-sample, so
    they are meant for the small instance sizes used as training data.
    """
    if num_vars_min > num_vars_max or num_vars_min < 1:
        raise ValueError("bad variable range")
    if status not in (None, "sat", "unsat"):
        raise ValueError(f"unknown status filter: {status!r}")
    if balanced and status is not None:
        raise ValueError("balanced and status are mutually exclusive")
    entries: list[tuple[str, Formula]] = []
    if not balanced and status is None:
        for i in range(count):
            rng = random.Random(f"{seed}:n:{i}")
            n = rng.randint(num_vars_min, num_vars_max)
            f = generate_3cnf(
                GeneratorConfig(n, clause_ratio, derive_seed(seed, f"gen:{i}"))
            )
            entries.append((f"{i:05d}-n{n}", f))
        return entries

    if balanced:
        want_sat = (count + 1) // 2
        want_unsat = count - want_sat
    else:
        want_sat = count if status == "sat" else 0
        want_unsat = count - want_sat
    candidate = 0
    while len(entries) < count:
        rng = random.Random(f"{seed}:n:{candidate}")
        n = rng.randint(num_vars_min, num_vars_max)
        f = generate_3cnf(
            GeneratorConfig(n, clause_ratio, derive_seed(seed, f"gen:{candidate}"))
        )
        candidate += 1
        sat = solve(f).result is Result.SAT
        if sat and want_sat > 0:
            want_sat -= 1
        elif not sat and want_unsat > 0:
            want_unsat -= 1
        else:
            continue
        entries.append((f"{len(entries):05d}-n{n}", f))
    return entries


# ----------------------------------------------------------------------
# orders file: the contract between trainer output and evaluation


@dataclass(frozen=True)
class OrderEntry:
    instance_id: str
    order: VariableOrder
    scores: tuple[float, ...] | None = None
    inference_time_ms: float | None = None


def write_orders(entries: Iterable[OrderEntry], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for e in entries:
            record: dict = {"instance_id": e.instance_id, "order": list(e.order.permutation)}
            if e.scores is not None:
                record["scores"] = list(e.scores)
            if e.inference_time_ms is not None:
                record["inference_time_ms"] = e.inference_time_ms
            fh.write(json.dumps(record, sort_keys=True, separators=(",", ":")))
            fh.write("\n")


def read_orders(path: str | Path) -> dict[str, OrderEntry]:
    entries: dict[str, OrderEntry] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            record = json.loads(line)
            entry = OrderEntry(
                instance_id=record["instance_id"],
                order=VariableOrder(tuple(record["order"])),
                scores=tuple(record["scores"]) if "scores" in record else None,
                inference_time_ms=record.get("inference_time_ms"),
            )
            entries[entry.instance_id] = entry
    return entries


# ----------------------------------------------------------------------
# shared plumbing


def _map_tasks(fn, tasks: Sequence, workers: int) -> list:
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    chunk = max(1, len(tasks) // (workers * 4))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=chunk))


def _write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(["" if v is None else v for v in row])


def _jsonable(value):
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "__dataclass_fields__"):
        return {k: _jsonable(getattr(value, k)) for k in value.__dataclass_fields__}
    return value


# execution details that cannot affect result bytes stay out of the
# persisted config, so a re-run with more workers leaves it untouched
_EXECUTION_ONLY_FIELDS = ("workers", "figures")


def persist_config(config, out_dir: str | Path, name: str = "config.json") -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    payload = {"kind": type(config).__name__, **_jsonable(config)}
    for key in _EXECUTION_ONLY_FIELDS:
        payload.pop(key, None)
    (out / name).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _trial_cost(stats, budget: int | None) -> tuple[int, bool]:
    censored = stats.result is Result.BUDGET_EXCEEDED
    if censored and budget is not None:
        return budget, True
    return stats.propagations, censored


# ----------------------------------------------------------------------
# branching impact (the first-variable-matters experiment)


@dataclass(frozen=True)
class BranchingImpactConfig:
    sampled_variables: int = 50
    runs_per_variable: int = 1000
    seed: int = 0
    heuristic: Heuristic = Heuristic.VSIDS
    propagation_limit: int | None = None
    workers: int = 1
    figures: bool = True

    def __post_init__(self):
        if self.sampled_variables < 1 or self.runs_per_variable < 1:
            raise ValueError("sampled_variables and runs_per_variable must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass(frozen=True)
class VariableImpact:
    instance_id: str
    variable: int
    runs: int
    censored_runs: int
    mean_propagations: float
    ci: tuple[float, float] | None
    mean_wall_time: float


@dataclass(frozen=True)
class InstanceImpactSummary:
    instance_id: str
    sampled_variables: int
    median_propagations: float
    best_propagations: float
    best_speedup_pct: float | None
    p10_propagations: float
    top10_speedup_pct: float | None


def _bi_task(args) -> VariableImpact:
    formula, instance_id, variable, runs, seed, heuristic_value, budget = args
    base = SolverConfig(heuristic=Heuristic(heuristic_value), propagation_limit=budget)
    rest = [u for u in range(1, formula.num_vars + 1) if u != variable]
    costs: list[float] = []
    censored = 0
    wall = 0.0
    for r in range(runs):
        rng = random.Random(f"{seed}:bi:{instance_id}:{variable}:{r}")
        tail = rest[:]
        rng.shuffle(tail)
        cfg = replace(base, injected_order=VariableOrder((variable, *tail)))
        stats = solve(formula, cfg)
        cost, was_censored = _trial_cost(stats, budget)
        costs.append(float(cost))
        censored += was_censored
        wall += stats.wall_time
    mean, ci = mean_ci(costs)
    return VariableImpact(instance_id, variable, runs, censored, mean, ci, wall / runs)


def _nearest_rank(sorted_values: Sequence[float], p: float) -> float:
    import math

    return sorted_values[max(math.ceil(p * len(sorted_values)) - 1, 0)]


def run_branching_impact(
    instances: Sequence[tuple[str, Formula]],
    config: BranchingImpactConfig,
    out_dir: str | Path,
) -> tuple[list[VariableImpact], list[InstanceImpactSummary]]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    tasks = []
    for instance_id, formula in instances:
        rng = random.Random(f"{config.seed}:bi:sample:{instance_id}")
        k = min(config.sampled_variables, formula.num_vars)
        sampled = sorted(rng.sample(range(1, formula.num_vars + 1), k))
        for v in sampled:
            tasks.append(
                (
                    formula,
                    instance_id,
                    v,
                    config.runs_per_variable,
                    config.seed,
                    config.heuristic.value,
                    config.propagation_limit,
                )
            )
    results: list[VariableImpact] = _map_tasks(_bi_task, tasks, config.workers)

    by_instance: dict[str, list[VariableImpact]] = {}
    for r in results:
        by_instance.setdefault(r.instance_id, []).append(r)

    kept: list[VariableImpact] = []
    summaries: list[InstanceImpactSummary] = []
    for instance_id, _ in instances:
        rows = by_instance.get(instance_id, [])
        if not rows:
            continue
        if all(r.censored_runs == r.runs for r in rows):
            print(
                f"notice: {instance_id} exceeded the budget on every run; skipped",
                file=sys.stderr,
            )
            continue
        kept.extend(rows)
        means = sorted(r.mean_propagations for r in rows)
        median = float(statistics.median(means))
        best = means[0]
        p10 = _nearest_rank(means, 0.10)
        best_speedup = (median - best) / best * 100.0 if best > 0 else None
        top10_speedup = (median - p10) / p10 * 100.0 if p10 > 0 else None
        summaries.append(
            InstanceImpactSummary(
                instance_id, len(rows), median, best, best_speedup, p10, top10_speedup
            )
        )

    _write_csv(
        out / "branching_impact_vars.csv",
        ["instance_id", "variable", "runs", "censored_runs", "mean_propagations", "ci_low", "ci_high"],
        [
            (
                r.instance_id,
                r.variable,
                r.runs,
                r.censored_runs,
                r.mean_propagations,
                r.ci[0] if r.ci else None,
                r.ci[1] if r.ci else None,
            )
            for r in kept
        ],
    )
    _write_csv(
        out / "branching_impact_summary.csv",
        [
            "instance_id",
            "sampled_variables",
            "median_mean_propagations",
            "best_mean_propagations",
            "best_speedup_pct",
            "p10_mean_propagations",
            "top10_speedup_pct",
        ],
        [
            (
                s.instance_id,
                s.sampled_variables,
                s.median_propagations,
                s.best_propagations,
                s.best_speedup_pct,
                s.p10_propagations,
                s.top10_speedup_pct,
            )
            for s in summaries
        ],
    )
    _write_csv(
        out / "branching_impact_timing.csv",
        ["instance_id", "variable", "mean_wall_time_s"],
        [(r.instance_id, r.variable, r.mean_wall_time) for r in kept],
    )
    if config.figures:
        from satbranch.plots import save_branching_impact_figure

        per_instance = {}
        for r in kept:
            per_instance.setdefault(r.instance_id, []).append(r.mean_propagations)
        save_branching_impact_figure(per_instance, out / "branching_impact.png")
    persist_config(config, out)
    return kept, summaries


# ----------------------------------------------------------------------
# dataset build (labels + graphs)


@dataclass(frozen=True)
class BuildDatasetConfig:
    count: int = 100
    num_vars_min: int = 20
    num_vars_max: int = 40
    clause_ratio: float = 4.3
    seed: int = 0
    method: LabelMethod = LabelMethod.CONFLICT
    trials_per_variable: int = 3
    population: int = 8
    generations: int = 6
    propagation_limit: int | None = None
    balanced: bool = False
    status: str | None = None
    heuristic: Heuristic = Heuristic.VSIDS
    workers: int = 1


def _label_task(args) -> LabelRecord:
    formula, instance_id, method_value, seed, k, population, generations, heuristic_value, budget = args
    base = SolverConfig(heuristic=Heuristic(heuristic_value), propagation_limit=budget)
    method = LabelMethod(method_value)
    if method is LabelMethod.CONFLICT:
        return conflict_label(formula, base, instance_id=instance_id, seed=seed)
    if method is LabelMethod.FIRST_VARIABLE:
        return first_variable_label(formula, k, base, seed=seed, instance_id=instance_id)
    return genetic_label(
        formula,
        GeneticConfig(population=population, generations=generations, seed=seed),
        base,
        instance_id=instance_id,
    )


def label_instances(
    instances: Sequence[tuple[str, Formula]],
    config: BuildDatasetConfig,
    existing: Mapping[str, LabelRecord] | None = None,
) -> list[LabelRecord]:
    existing = existing or {}
    tasks = []
    for instance_id, formula in instances:
        if instance_id in existing:
            continue
        tasks.append(
            (
                formula,
                instance_id,
                config.method.value,
                derive_seed(config.seed, f"label:{instance_id}"),
                config.trials_per_variable,
                config.population,
                config.generations,
                config.heuristic.value,
                config.propagation_limit,
            )
        )
    fresh = {r.instance_id: r for r in _map_tasks(_label_task, tasks, config.workers)}
    return [
        existing[instance_id] if instance_id in existing else fresh[instance_id]
        for instance_id, _ in instances
    ]


def run_build_dataset(
    config: BuildDatasetConfig,
    out_dir: str | Path,
    source_dir: str | Path | None = None,
) -> list[LabelRecord]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if source_dir is not None:
        instances = load_instances(source_dir)
    else:
        instances = generate_instances(
            config.count,
            config.num_vars_min,
            config.num_vars_max,
            config.clause_ratio,
            config.seed,
            config.balanced,
            config.status,
        )
        write_instances(instances, out / "instances")

    labels_path = out / "labels.jsonl"
    existing: dict[str, LabelRecord] = {}
    if labels_path.exists():
        ids = {instance_id for instance_id, _ in instances}
        existing = {r.instance_id: r for r in read_labels(labels_path) if r.instance_id in ids}

    labels = label_instances(instances, config, existing)
    write_labels(labels, labels_path)
    graphs = [(instance_id, to_graph(f)) for instance_id, f in instances]
    export_graphs(graphs, out / "graphs.jsonl", labels={r.instance_id: r for r in labels})
    persist_config(config, out)
    return labels


# ----------------------------------------------------------------------
# order evaluation


@dataclass(frozen=True)
class EvaluateConfig:
    seed: int = 0
    heuristic: Heuristic = Heuristic.VSIDS
    propagation_limit: int | None = None
    remind_factor: float = 0.0
    remind_decay: float = 0.95
    random_baseline: bool = False
    workers: int = 1
    figures: bool = True


def _eval_task(args):
    formula, instance_id, perm, heuristic_value, budget, remind_factor, remind_decay = args
    heuristic = Heuristic(heuristic_value)
    n = formula.num_vars
    default_cfg = SolverConfig(
        heuristic=heuristic,
        propagation_limit=budget,
        injected_order=VariableOrder.identity(n),
    )
    st_default = solve(formula, default_cfg)
    cost_default, _ = _trial_cost(st_default, budget)
    if perm is None:
        return (instance_id, cost_default, None, st_default.wall_time, None)
    tested_cfg = SolverConfig(
        heuristic=heuristic,
        propagation_limit=budget,
        injected_order=VariableOrder(tuple(perm)),
        remind_factor=remind_factor,
        remind_decay=remind_decay,
    )
    st_tested = solve(formula, tested_cfg)
    cost_tested, _ = _trial_cost(st_tested, budget)
    return (instance_id, cost_default, cost_tested, st_default.wall_time, st_tested.wall_time)


def _rows_from_eval(
    instances: Sequence[tuple[str, Formula]],
    perms: Mapping[str, tuple[int, ...] | None],
    config: EvaluateConfig,
    labels: Mapping[str, LabelRecord] | None,
    inference_ms: Mapping[str, float | None],
) -> tuple[list[EvalRow], list[tuple]]:
    tasks = [
        (
            formula,
            instance_id,
            perms.get(instance_id),
            config.heuristic.value,
            config.propagation_limit,
            config.remind_factor,
            config.remind_decay,
        )
        for instance_id, formula in instances
    ]
    raw = _map_tasks(_eval_task, tasks, config.workers)
    rows: list[EvalRow] = []
    timing: list[tuple] = []
    for (instance_id, formula), (_, cost_default, cost_tested, wall_d, wall_t) in zip(
        instances, raw
    ):
        red = None
        rho = None
        if cost_tested is not None and cost_default > 0:
            red = reduction(cost_default, cost_tested)
        perm = perms.get(instance_id)
        if (
            perm is not None
            and labels
            and instance_id in labels
            and formula.num_vars >= 2
        ):
            rho = spearman(VariableOrder(tuple(perm)), labels[instance_id].order)
        rows.append(
            EvalRow(
                instance_id=instance_id,
                propagations_default=cost_default,
                propagations_tested=cost_tested,
                reduction=red,
                spearman=rho,
                inference_time_ms=inference_ms.get(instance_id),
                solve_time=wall_t,
            )
        )
        timing.append((instance_id, wall_d, wall_t))
    return rows, timing


def run_evaluate(
    instances: Sequence[tuple[str, Formula]],
    orders: Mapping[str, OrderEntry],
    config: EvaluateConfig,
    out_dir: str | Path,
    labels: Mapping[str, LabelRecord] | None = None,
):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    perms: dict[str, tuple[int, ...] | None] = {}
    inference_ms: dict[str, float | None] = {}
    for instance_id, _ in instances:
        entry = orders.get(instance_id)
        perms[instance_id] = entry.order.permutation if entry else None
        inference_ms[instance_id] = entry.inference_time_ms if entry else None

    rows, timing = _rows_from_eval(instances, perms, config, labels, inference_ms)

    random_rows: list[EvalRow] = []
    if config.random_baseline:
        rnd_perms = {}
        for instance_id, formula in instances:
            rng = random.Random(f"{config.seed}:eval:random:{instance_id}")
            perm = list(range(1, formula.num_vars + 1))
            rng.shuffle(perm)
            rnd_perms[instance_id] = tuple(perm)
        random_rows, _ = _rows_from_eval(
            instances, rnd_perms, config, labels, {i: None for i, _ in instances}
        )

    def eval_csv_rows(eval_rows):
        return [
            (
                r.instance_id,
                r.propagations_default,
                r.propagations_tested,
                r.reduction,
                r.spearman,
                r.inference_time_ms,
            )
            for r in eval_rows
        ]

    header = [
        "instance_id",
        "propagations_default",
        "propagations_tested",
        "reduction",
        "spearman",
        "inference_time_ms",
    ]
    _write_csv(out / "results.csv", header, eval_csv_rows(rows))
    _write_csv(
        out / "results_timing.csv",
        ["instance_id", "solve_time_default_s", "solve_time_tested_s"],
        timing,
    )
    if random_rows:
        _write_csv(out / "results_random.csv", header, eval_csv_rows(random_rows))

    groups = [("tested", rows)] + ([("random", random_rows)] if random_rows else [])
    summary_rows = []
    summaries = []
    for name, group_rows in groups:
        evaluable = [r for r in group_rows if r.propagations_tested is not None]
        if not evaluable:
            continue
        summary = aggregate(evaluable)[0]
        summaries.append((name, summary))
        summary_rows.append(
            (
                name,
                summary.count,
                summary.mean_reduction,
                summary.reduction_ci[0] if summary.reduction_ci else None,
                summary.reduction_ci[1] if summary.reduction_ci else None,
                summary.mean_spearman,
                summary.spearman_ci[0] if summary.spearman_ci else None,
                summary.spearman_ci[1] if summary.spearman_ci else None,
            )
        )
    _write_csv(
        out / "summary.csv",
        [
            "group",
            "count",
            "mean_reduction",
            "reduction_ci_low",
            "reduction_ci_high",
            "mean_spearman",
            "spearman_ci_low",
            "spearman_ci_high",
        ],
        summary_rows,
    )

    if config.figures:
        from satbranch.plots import save_evaluation_figure

        reductions = [r.reduction for r in rows if r.reduction is not None]
        spearmans = [r.spearman for r in rows if r.spearman is not None]
        save_evaluation_figure(reductions, spearmans, out / "evaluation.png")
    persist_config(config, out)
    return rows, random_rows, summaries
