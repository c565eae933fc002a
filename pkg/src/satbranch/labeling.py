"""Labeling methods that turn a formula into a reference variable order.

Each method scores every variable and derives the order by sorting under
the method's direction (ties broken by ascending variable index). The
scoring signal is always the propagation count, never wall time, so
labels are machine independent. All methods are deterministic given
(formula, seed, configs); per-trial sub-seeds are derived from the
master seed, so trials can run in any schedule without changing output.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Iterable

from satbranch.cnf import Formula
from satbranch.solver import Result, SolverConfig, VariableOrder, solve


class LabelMethod(Enum):
    CONFLICT = "conflict"
    FIRST_VARIABLE = "first_variable"
    GENETIC = "genetic"


# True: higher score branches first. Conflict counts rank conflict-prone
# variables first; mean propagations rank cheap variables first; genetic
# scores are -(rank), so descending reproduces the found permutation.
SORT_DESCENDING = {
    LabelMethod.CONFLICT: True,
    LabelMethod.FIRST_VARIABLE: False,
    LabelMethod.GENETIC: True,
}


@dataclass(frozen=True)
class GeneticConfig:
    population: int = 8
    generations: int = 6
    seed: int = 0

    def __post_init__(self):
        if self.population < 1:
            raise ValueError("population must be >= 1")
        if self.generations < 0:
            raise ValueError("generations must be >= 0")


@dataclass(frozen=True)
class LabelRecord:
    instance_id: str
    method: LabelMethod
    seed: int
    scores: dict[int, float]
    order: VariableOrder
    trials_used: int
    total_propagations_spent: int
    censored_trials: int = 0
    partial: bool = False
    # genetic only: best cost after the initial round and each generation
    best_trace: tuple[int, ...] = ()

    def __post_init__(self):
        expected = order_from_scores(self.scores, self.method)
        if expected.permutation != self.order.permutation:
            raise ValueError("order does not match scores under the method's sort")


def order_from_scores(scores: dict[int, float], method: LabelMethod) -> VariableOrder:
    """Sort variables under the method's direction, ties by ascending index."""
    if SORT_DESCENDING[method]:
        ordered = sorted(scores, key=lambda v: (-scores[v], v))
    else:
        ordered = sorted(scores, key=lambda v: (scores[v], v))
    return VariableOrder(tuple(ordered))


def _base_config(solver_config: SolverConfig | None) -> SolverConfig:
    return solver_config if solver_config is not None else SolverConfig()


def _trial_cost(stats, config: SolverConfig) -> tuple[int, bool]:
    """Propagation cost of one solve; censored trials cost the budget."""
    if stats.result is Result.BUDGET_EXCEEDED and config.propagation_limit is not None:
        return config.propagation_limit, True
    return stats.propagations, stats.result is Result.BUDGET_EXCEEDED


def _instance_id(formula: Formula, instance_id: str | None) -> str:
    if instance_id is not None:
        return instance_id
    return formula.source_name or ""


def conflict_label(
    formula: Formula,
    solver_config: SolverConfig | None = None,
    instance_id: str | None = None,
    seed: int = 0,
) -> LabelRecord:
    """Score variables by conflict participation in a single default solve."""
    cfg = replace(_base_config(solver_config), injected_order=None, remind_factor=0.0)
    stats = solve(formula, cfg)
    scores = {
        v: float(stats.per_var_conflicts.get(v, 0))
        for v in range(1, formula.num_vars + 1)
    }
    return LabelRecord(
        instance_id=_instance_id(formula, instance_id),
        method=LabelMethod.CONFLICT,
        seed=seed,
        scores=scores,
        order=order_from_scores(scores, LabelMethod.CONFLICT),
        trials_used=1,
        total_propagations_spent=stats.propagations,
        censored_trials=int(stats.result is Result.BUDGET_EXCEEDED),
        partial=stats.result is Result.BUDGET_EXCEEDED,
    )


def first_variable_label(
    formula: Formula,
    k: int,
    solver_config: SolverConfig | None = None,
    seed: int = 0,
    instance_id: str | None = None,
) -> LabelRecord:
    """Score each variable by mean propagations over k runs branching it first.

    Each trial injects the order (v, then a fresh uniform shuffle of the
    rest); budget-exceeded trials contribute the propagation limit.
    Issues exactly k * num_vars solves.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    base = _base_config(solver_config)
    n = formula.num_vars
    variables = list(range(1, n + 1))
    scores: dict[int, float] = {}
    total_spent = 0
    censored = 0
    for v in variables:
        rest = [u for u in variables if u != v]
        acc = 0
        for trial in range(k):
            rng = random.Random(f"{seed}:fv:{v}:{trial}")
            tail = rest[:]
            rng.shuffle(tail)
            cfg = replace(base, injected_order=VariableOrder((v, *tail)))
            stats = solve(formula, cfg)
            cost, was_censored = _trial_cost(stats, cfg)
            acc += cost
            censored += was_censored
            total_spent += stats.propagations
        scores[v] = acc / k
    return LabelRecord(
        instance_id=_instance_id(formula, instance_id),
        method=LabelMethod.FIRST_VARIABLE,
        seed=seed,
        scores=scores,
        order=order_from_scores(scores, LabelMethod.FIRST_VARIABLE),
        trials_used=k * n,
        total_propagations_spent=total_spent,
        censored_trials=censored,
    )


def swap_length_schedule(num_vars: int, generations: int) -> tuple[int, ...]:
    """Max swap distance per generation: n // 2, floor-halved, never below 1."""
    lengths = []
    length = max(num_vars // 2, 1)
    for _ in range(generations):
        lengths.append(length)
        length = max(length // 2, 1)
    return tuple(lengths)


def genetic_label(
    formula: Formula,
    config: GeneticConfig,
    solver_config: SolverConfig | None = None,
    instance_id: str | None = None,
) -> LabelRecord:
    """Hill-climb over whole permutations by bounded random swaps.

    Round 0 samples k uniform permutations and keeps the cheapest. Each of
    the m generations mutates the incumbent into k candidates with
    |perm| random swaps of bounded length (the bound starts at n // 2 and
    floor-halves per generation, never below 1); the incumbent is replaced
    only on strict improvement. Issues exactly k * (m + 1) solves.
    """
    base = _base_config(solver_config)
    n = formula.num_vars
    k = config.population
    m = config.generations
    seed = config.seed

    def cost_of(perm: list[int]) -> int:
        nonlocal total_spent, censored
        cfg = replace(base, injected_order=VariableOrder(tuple(perm)))
        stats = solve(formula, cfg)
        cost, was_censored = _trial_cost(stats, cfg)
        censored += was_censored
        total_spent += stats.propagations
        return cost

    total_spent = 0
    censored = 0
    best: list[int] | None = None
    best_cost = 0
    for i in range(k):
        rng = random.Random(f"{seed}:genetic:init:{i}")
        perm = list(range(1, n + 1))
        rng.shuffle(perm)
        c = cost_of(perm)
        if best is None or c < best_cost:
            best, best_cost = perm, c
    assert best is not None
    trace = [best_cost]

    for gen, swap_limit in enumerate(swap_length_schedule(n, m)):
        gen_best: list[int] | None = None
        gen_cost = 0
        for i in range(k):
            rng = random.Random(f"{seed}:genetic:g{gen}:c{i}")
            cand = best[:]
            if n >= 2:
                for _ in range(n):
                    a = rng.randrange(n)
                    lo = max(0, a - swap_limit)
                    hi = min(n - 1, a + swap_limit)
                    # draw the partner from the window minus position a
                    b = lo + rng.randrange(hi - lo)
                    if b >= a:
                        b += 1
                    cand[a], cand[b] = cand[b], cand[a]
            c = cost_of(cand)
            if gen_best is None or c < gen_cost:
                gen_best, gen_cost = cand, c
        if gen_best is not None and gen_cost < best_cost:
            best, best_cost = gen_best, gen_cost
        trace.append(best_cost)

    order = VariableOrder(tuple(best))
    scores = {v: float(-order.rank(v)) for v in best}
    return LabelRecord(
        instance_id=_instance_id(formula, instance_id),
        method=LabelMethod.GENETIC,
        seed=seed,
        scores=scores,
        order=order,
        trials_used=k * (m + 1),
        total_propagations_spent=total_spent,
        censored_trials=censored,
        best_trace=tuple(trace),
    )


# ----------------------------------------------------------------------
# label file: one JSON object per instance, scores in variable-index order


def label_to_record(label: LabelRecord) -> dict:
    n = len(label.scores)
    return {
        "instance_id": label.instance_id,
        "method": label.method.value,
        "seed": label.seed,
        "scores": [label.scores[v] for v in range(1, n + 1)],
        "order": list(label.order.permutation),
        "trials_used": label.trials_used,
        "total_propagations_spent": label.total_propagations_spent,
        "censored_trials": label.censored_trials,
        "partial": label.partial,
    }


def record_to_label(record: dict) -> LabelRecord:
    scores = {i + 1: float(s) for i, s in enumerate(record["scores"])}
    return LabelRecord(
        instance_id=record["instance_id"],
        method=LabelMethod(record["method"]),
        seed=record["seed"],
        scores=scores,
        order=VariableOrder(tuple(record["order"])),
        trials_used=record["trials_used"],
        total_propagations_spent=record["total_propagations_spent"],
        censored_trials=record.get("censored_trials", 0),
        partial=record.get("partial", False),
    )


def write_labels(labels: Iterable[LabelRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for label in labels:
            fh.write(json.dumps(label_to_record(label), sort_keys=True, separators=(",", ":")))
            fh.write("\n")


def read_labels(path: str | Path) -> list[LabelRecord]:
    with open(path, encoding="utf-8") as fh:
        return [record_to_label(json.loads(line)) for line in fh if line.strip()]
