"""Metric functions checked against hand values and numpy."""

import math
import random

import numpy as np
import pytest

from satbranch.ranking import EvalRow, aggregate, mean_ci, reduction, relevance, spearman
from satbranch.solver import VariableOrder


def test_relevance_anchor_values():
    assert relevance(1) == 1.0
    assert relevance(3) == 0.5
    assert relevance(2) == pytest.approx(1.0 / math.log2(3))


def test_relevance_strictly_decreasing():
    values = [relevance(r) for r in range(1, 50)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_relevance_rejects_bad_rank():
    with pytest.raises(ValueError):
        relevance(0)
    with pytest.raises(ValueError):
        relevance(-2)


def test_spearman_hand_case():
    a = VariableOrder((1, 2, 3, 4))
    b = VariableOrder((2, 1, 4, 3))
    # d^2 per variable is 1, sum 4: 1 - 24/60
    assert spearman(a, b) == pytest.approx(0.6, abs=1e-12)


def test_spearman_extremes_exact():
    a = VariableOrder((3, 1, 4, 2, 5))
    assert spearman(a, a) == 1.0
    reversed_a = VariableOrder(tuple(reversed(a.permutation)))
    assert spearman(a, reversed_a) == -1.0


def test_spearman_is_symmetric():
    rng = random.Random(0)
    for _ in range(20):
        perm = list(range(1, 11))
        rng.shuffle(perm)
        other = list(range(1, 11))
        rng.shuffle(other)
        a, b = VariableOrder(tuple(perm)), VariableOrder(tuple(other))
        assert spearman(a, b) == pytest.approx(spearman(b, a))


def test_spearman_matches_numpy_rank_correlation():
    rng = random.Random(1)
    for _ in range(30):
        n = rng.randrange(2, 25)
        perm = list(range(1, n + 1))
        other = list(perm)
        rng.shuffle(perm)
        rng.shuffle(other)
        a, b = VariableOrder(tuple(perm)), VariableOrder(tuple(other))
        ranks_a = [a.rank(v) for v in range(1, n + 1)]
        ranks_b = [b.rank(v) for v in range(1, n + 1)]
        expected = np.corrcoef(ranks_a, ranks_b)[0, 1]
        assert spearman(a, b) == pytest.approx(expected, abs=1e-12)


def test_spearman_input_validation():
    with pytest.raises(ValueError):
        spearman(VariableOrder((1,)), VariableOrder((1,)))
    with pytest.raises(ValueError):
        spearman(VariableOrder((1, 2)), VariableOrder((2, 3)))


def test_reduction_values():
    assert reduction(100, 100) == 0.0
    assert reduction(100, 50) == 0.5
    assert reduction(100, 150) == -0.5
    with pytest.raises(ValueError):
        reduction(0, 10)


def test_mean_ci_hand_case():
    mean, ci = mean_ci([0.1, 0.2, 0.3])
    assert mean == pytest.approx(0.2)
    half = 1.96 * 0.1 / math.sqrt(3)
    assert ci == (pytest.approx(0.2 - half), pytest.approx(0.2 + half))


def test_mean_ci_degenerate_cases():
    assert mean_ci([0.7]) == (0.7, None)
    mean, ci = mean_ci([0.4, 0.4, 0.4, 0.4])
    assert mean == 0.4
    assert ci == (0.4, 0.4)
    with pytest.raises(ValueError):
        mean_ci([])


def _row(instance_id, red, sp=None):
    return EvalRow(instance_id, 100, 50, red, spearman=sp)


def test_aggregate_single_group():
    rows = [_row("a", 0.1, 0.9), _row("b", 0.3, None), _row("c", 0.2, 0.7)]
    (summary,) = aggregate(rows)
    assert summary.group == "all"
    assert summary.count == 3
    assert summary.mean_reduction == pytest.approx(0.2)
    assert summary.mean_spearman == pytest.approx(0.8)  # None row excluded
    assert summary.reduction_ci is not None
    assert summary.spearman_ci is not None


def test_aggregate_grouped_and_sorted():
    rows = [
        EvalRow("a", 100, 90, 0.1),
        EvalRow("b", 100, 80, 0.2),
        EvalRow("c", 100, 70, 0.3),
    ]
    keys = {"a": "z", "b": "m", "c": "m"}
    summaries = aggregate(rows, group_key=lambda r: keys[r.instance_id])
    assert [s.group for s in summaries] == ["m", "z"]
    assert summaries[0].count == 2
    assert summaries[1].mean_reduction == pytest.approx(0.1)
    assert summaries[1].reduction_ci is None  # single row


def test_aggregate_all_missing_metric():
    rows = [EvalRow("a", 100, None, None), EvalRow("b", 100, None, None)]
    (summary,) = aggregate(rows)
    assert summary.mean_reduction is None
    assert summary.reduction_ci is None
    with pytest.raises(ValueError):
        aggregate([])
