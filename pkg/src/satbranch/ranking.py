"""Ranking-quality and solver-performance metrics.

Relevance gain for rank positions, Spearman correlation between variable
orders, propagation-reduction rows, and normal-approximation confidence
intervals. Everything here is a pure function of its inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Sequence

from satbranch.solver import VariableOrder


def relevance(rank: int) -> float:
    """Gain of rank r: 1/log2(r+1), shifted so rank 1 is finite (= 1.0)."""
    if rank < 1:
        raise ValueError("rank must be >= 1")
    return 1.0 / math.log2(rank + 1)


def spearman(order_a: VariableOrder, order_b: VariableOrder) -> float:
    """Spearman correlation of two permutations over the same variables.

    Permutations have no ties, so 1 - 6*sum(d^2)/(n(n^2-1)) is exact.
    """
    n = order_a.num_vars
    if n < 2:
        raise ValueError("spearman needs at least 2 variables")
    ranks_a = order_a.ranks
    ranks_b = order_b.ranks
    if ranks_a.keys() != ranks_b.keys():
        raise ValueError("orders cover different variable sets")
    d2 = 0
    for v, ra in ranks_a.items():
        d = ra - ranks_b[v]
        d2 += d * d
    return 1.0 - (6.0 * d2) / (n * (n * n - 1))


@dataclass(frozen=True)
class EvalRow:
    instance_id: str
    propagations_default: int
    propagations_tested: int | None
    reduction: float | None
    spearman: float | None = None
    inference_time_ms: float | None = None
    solve_time: float | None = None  # wall seconds of the tested-order solve


def reduction(propagations_default: int, propagations_tested: int) -> float:
    """(default - tested) / default; the default order against itself is 0."""
    if propagations_default <= 0:
        raise ValueError("reduction undefined for propagations_default <= 0")
    return (propagations_default - propagations_tested) / propagations_default


def mean_ci(values: Sequence[float]) -> tuple[float, tuple[float, float] | None]:
    """Mean and 95% CI of the mean (normal approximation, sample sd).

    A single value has no sd; its CI is reported as None.
    """
    n = len(values)
    if n == 0:
        raise ValueError("empty group")
    mean = sum(values) / n
    if n == 1:
        return mean, None
    var = sum((x - mean) ** 2 for x in values) / (n - 1)
    half = 1.96 * math.sqrt(var) / math.sqrt(n)
    return mean, (mean - half, mean + half)


@dataclass(frozen=True)
class GroupSummary:
    group: Hashable
    count: int
    mean_reduction: float | None
    reduction_ci: tuple[float, float] | None
    mean_spearman: float | None
    spearman_ci: tuple[float, float] | None


def aggregate(
    rows: Iterable[EvalRow],
    group_key: Callable[[EvalRow], Hashable] | None = None,
) -> list[GroupSummary]:
    """Per-group mean reduction / Spearman with 95% CIs.

    Rows with missing values are excluded from the corresponding metric.
    Groups are emitted in sorted key order.
    """
    rows = list(rows)
    if not rows:
        raise ValueError("empty group")
    if group_key is None:
        group_key = lambda row: "all"
    groups: dict[Hashable, list[EvalRow]] = {}
    for row in rows:
        groups.setdefault(group_key(row), []).append(row)

    summaries = []
    for key in sorted(groups, key=str):
        members = groups[key]
        reductions = [r.reduction for r in members if r.reduction is not None]
        spearmans = [r.spearman for r in members if r.spearman is not None]
        mr, rci = mean_ci(reductions) if reductions else (None, None)
        ms, sci = mean_ci(spearmans) if spearmans else (None, None)
        summaries.append(GroupSummary(key, len(members), mr, rci, ms, sci))
    return summaries
