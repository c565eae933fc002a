"""Tripartite graph encoding of CNF formulas, plus the JSONL export.

Variables, clauses, and one meta node; an edge per literal occurrence
signed by polarity (+1/-1) and a weight-0 edge from the meta node to
every clause. Node features are a kind one-hot followed by a one-hot of
the degree quartile within the node's own kind. The exported JSONL file
is the contract consumed by the order trainer.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Mapping, Sequence

from satbranch.cnf import Formula
from satbranch.labeling import LabelRecord

NUM_FEATURES = 7  # 3 kind dims + 4 quartile dims


class NodeKind(Enum):
    VARIABLE = "variable"
    CLAUSE = "clause"
    META = "meta"


_KIND_INDEX = {NodeKind.VARIABLE: 0, NodeKind.CLAUSE: 1, NodeKind.META: 2}


@dataclass(frozen=True)
class Node:
    id: int
    kind: NodeKind
    features: tuple[float, ...]
    var_index: int | None = None  # 1-based, variable nodes only


@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    weight: int


@dataclass(frozen=True)
class GraphInstance:
    num_vars: int
    num_clauses: int
    nodes: tuple[Node, ...]
    edges: tuple[Edge, ...]


def _quartile_boundaries(degrees: Sequence[int]) -> tuple[int, int, int]:
    """Nearest-rank 25/50/75th percentiles of a kind's degree list."""
    ranked = sorted(degrees)
    c = len(ranked)

    def pct(p: float) -> int:
        return ranked[max(math.ceil(p * c) - 1, 0)]

    return pct(0.25), pct(0.5), pct(0.75)


def _bucket(degree: int, boundaries: tuple[int, int, int]) -> int:
    # ties land in the lower bucket: count boundaries strictly below
    return sum(1 for b in boundaries if b < degree)


def _features(kind: NodeKind, bucket: int) -> tuple[float, ...]:
    vec = [0.0] * NUM_FEATURES
    vec[_KIND_INDEX[kind]] = 1.0
    vec[3 + bucket] = 1.0
    return tuple(vec)


def to_graph(formula: Formula) -> GraphInstance:
    """Encode a formula; node ids are variables 0..n-1, clauses n..n+m-1, meta last."""
    n = formula.num_vars
    m = formula.num_clauses
    meta = n + m

    edges: list[Edge] = []
    var_deg = [0] * n
    clause_deg = [0] * m
    for ci, clause in enumerate(formula.signed_clauses):
        for lit in clause:
            v = lit if lit > 0 else -lit
            edges.append(Edge(v - 1, n + ci, 1 if lit > 0 else -1))
            var_deg[v - 1] += 1
            clause_deg[ci] += 1
    for ci in range(m):
        edges.append(Edge(meta, n + ci, 0))
        clause_deg[ci] += 1  # the meta edge counts toward clause degree

    nodes: list[Node] = []
    if n:
        vb = _quartile_boundaries(var_deg)
        for i in range(n):
            nodes.append(
                Node(i, NodeKind.VARIABLE, _features(NodeKind.VARIABLE, _bucket(var_deg[i], vb)), i + 1)
            )
    if m:
        cb = _quartile_boundaries(clause_deg)
        for ci in range(m):
            nodes.append(
                Node(n + ci, NodeKind.CLAUSE, _features(NodeKind.CLAUSE, _bucket(clause_deg[ci], cb)))
            )
    # the meta node touches every clause, so its degree is maximal by
    # construction; it gets the top quartile by convention
    nodes.append(Node(meta, NodeKind.META, _features(NodeKind.META, 3)))

    return GraphInstance(n, m, tuple(nodes), tuple(edges))


# ----------------------------------------------------------------------
# JSONL export / reload


def graph_to_record(
    instance_id: str, graph: GraphInstance, label: LabelRecord | None = None
) -> dict:
    record = {
        "instance_id": instance_id,
        "num_vars": graph.num_vars,
        "num_clauses": graph.num_clauses,
        "node_kinds": [node.kind.value for node in graph.nodes],
        "features": [list(node.features) for node in graph.nodes],
        "edge_list": [[e.src, e.dst, e.weight] for e in graph.edges],
    }
    if label is not None:
        record["label_order"] = list(label.order.permutation)
        record["label_scores"] = [
            label.scores[v] for v in range(1, graph.num_vars + 1)
        ]
    return record


def record_to_graph(record: Mapping) -> GraphInstance:
    n = record["num_vars"]
    nodes = []
    for i, (kind_name, feats) in enumerate(zip(record["node_kinds"], record["features"])):
        kind = NodeKind(kind_name)
        var_index = i + 1 if kind is NodeKind.VARIABLE else None
        nodes.append(Node(i, kind, tuple(feats), var_index))
    edges = tuple(Edge(s, d, w) for s, d, w in record["edge_list"])
    return GraphInstance(n, record["num_clauses"], tuple(nodes), edges)


def export_graphs(
    entries: Sequence[tuple[str, GraphInstance]],
    path: str | Path,
    labels: Mapping[str, LabelRecord] | None = None,
) -> None:
    """Write one self-contained JSON record per line; byte-deterministic.

    When labels are given they must match the instance ids exactly.
    """
    if labels is not None:
        entry_ids = {instance_id for instance_id, _ in entries}
        missing = entry_ids - labels.keys()
        extra = labels.keys() - entry_ids
        if missing or extra:
            raise ValueError(
                f"label/instance id mismatch: {sorted(missing)} unlabeled, {sorted(extra)} orphaned"
            )
    with open(path, "w", encoding="utf-8") as fh:
        for instance_id, graph in entries:
            label = labels[instance_id] if labels is not None else None
            record = graph_to_record(instance_id, graph, label)
            fh.write(json.dumps(record, sort_keys=True, separators=(",", ":")))
            fh.write("\n")


def load_graph_records(path: str | Path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]
