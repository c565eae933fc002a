"""Graph encoding: structure, features, and the JSONL export contract."""

import hashlib

import pytest

from satbranch.cnf import Formula, GeneratorConfig, generate_3cnf
from satbranch.graphx import (
    NUM_FEATURES,
    Edge,
    NodeKind,
    export_graphs,
    graph_to_record,
    load_graph_records,
    record_to_graph,
    to_graph,
)
from satbranch.labeling import conflict_label


def test_two_clause_example_exact_structure():
    # (x1 v -x2) ^ (x2 v x3): ids 0..2 vars, 3..4 clauses, 5 meta
    f = Formula.from_ints(3, [[1, -2], [2, 3]])
    g = to_graph(f)
    assert g.num_vars == 3
    assert g.num_clauses == 2
    kinds = [node.kind for node in g.nodes]
    assert kinds == [NodeKind.VARIABLE] * 3 + [NodeKind.CLAUSE] * 2 + [NodeKind.META]
    assert [node.id for node in g.nodes] == [0, 1, 2, 3, 4, 5]
    assert [node.var_index for node in g.nodes[:3]] == [1, 2, 3]

    expected = {
        Edge(0, 3, 1),
        Edge(1, 3, -1),
        Edge(1, 4, 1),
        Edge(2, 4, 1),
        Edge(5, 3, 0),
        Edge(5, 4, 0),
    }
    assert set(g.edges) == expected
    assert len(g.edges) == len(expected)


def test_empty_formula_graph_is_meta_only():
    g = to_graph(Formula.from_ints(0, []))
    assert len(g.nodes) == 1
    assert g.nodes[0].kind is NodeKind.META
    assert g.edges == ()


def test_edge_count_conservation():
    for seed in range(10):
        f = generate_3cnf(GeneratorConfig(num_vars=20, clause_ratio=4.3, seed=seed))
        g = to_graph(f)
        literal_edges = sum(len(c) for c in f.signed_clauses)
        assert len(g.edges) == literal_edges + f.num_clauses
        assert sum(1 for e in g.edges if e.weight == 0) == f.num_clauses
        signed = [e for e in g.edges if e.weight != 0]
        assert all(e.weight in (1, -1) for e in signed)
        # every signed edge connects a variable node to a clause node
        for e in signed:
            assert 0 <= e.src < f.num_vars
            assert f.num_vars <= e.dst < f.num_vars + f.num_clauses


def test_uniform_clause_degrees_share_one_bucket():
    f = generate_3cnf(GeneratorConfig(num_vars=20, clause_ratio=4.3, seed=3))
    g = to_graph(f)
    clause_feats = {node.features for node in g.nodes if node.kind is NodeKind.CLAUSE}
    assert len(clause_feats) == 1  # all 3-literal clauses, same degree 4


def test_features_are_two_hot():
    f = generate_3cnf(GeneratorConfig(num_vars=15, clause_ratio=4.3, seed=4))
    g = to_graph(f)
    for node in g.nodes:
        assert len(node.features) == NUM_FEATURES
        assert sum(node.features[:3]) == 1.0
        assert sum(node.features[3:]) == 1.0
        assert all(x in (0.0, 1.0) for x in node.features)


def test_meta_node_lands_in_top_quartile():
    f = generate_3cnf(GeneratorConfig(num_vars=15, clause_ratio=4.3, seed=5))
    g = to_graph(f)
    meta = g.nodes[-1]
    assert meta.kind is NodeKind.META
    assert meta.features == (0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0)


def test_quartile_buckets_tie_to_lower():
    # var degrees x1=2, x2=2, x3=2, x4=3 -> nearest-rank boundaries 2,2,2.
    # Ties count strictly-below, so the three deg-2 vars all land in
    # bucket 0 and the deg-3 var clears every boundary into bucket 3.
    f = Formula.from_ints(4, [[1, 2, 4], [2, 3, 4], [-3, -4, 1]])
    g = to_graph(f)
    buckets = {}
    for node in g.nodes:
        if node.kind is NodeKind.VARIABLE:
            buckets[node.var_index] = node.features[3:].index(1.0)
    assert buckets == {1: 0, 2: 0, 3: 0, 4: 3}


def test_round_trip_preserves_structure():
    for seed in range(5):
        f = generate_3cnf(GeneratorConfig(num_vars=12, clause_ratio=4.3, seed=seed))
        g = to_graph(f)
        rebuilt = record_to_graph(graph_to_record("x", g))
        assert rebuilt == g


def test_labeled_record_carries_order_and_scores():
    f = generate_3cnf(GeneratorConfig(num_vars=10, clause_ratio=4.3, seed=6))
    label = conflict_label(f, instance_id="inst")
    record = graph_to_record("inst", to_graph(f), label)
    assert record["label_order"] == list(label.order.permutation)
    assert len(record["label_order"]) == 10
    assert record["label_scores"] == [label.scores[v] for v in range(1, 11)]


def test_export_rejects_id_mismatch(tmp_path):
    f = generate_3cnf(GeneratorConfig(num_vars=8, clause_ratio=4.3, seed=7))
    g = to_graph(f)
    label = conflict_label(f, instance_id="other")
    with pytest.raises(ValueError, match="mismatch"):
        export_graphs([("inst", g)], tmp_path / "g.jsonl", labels={"other": label})
    with pytest.raises(ValueError, match="mismatch"):
        export_graphs([("inst", g)], tmp_path / "g.jsonl", labels={})


def test_export_file_shape_and_determinism(tmp_path):
    entries = []
    labels = {}
    for i in range(100):
        f = generate_3cnf(GeneratorConfig(num_vars=10, clause_ratio=4.3, seed=i))
        instance_id = f"i{i:03d}"
        entries.append((instance_id, to_graph(f)))
        labels[instance_id] = conflict_label(f, instance_id=instance_id)

    path_a = tmp_path / "a.jsonl"
    path_b = tmp_path / "b.jsonl"
    export_graphs(entries, path_a, labels)
    export_graphs(entries, path_b, labels)
    assert hashlib.sha256(path_a.read_bytes()).digest() == hashlib.sha256(path_b.read_bytes()).digest()

    records = load_graph_records(path_a)
    assert len(records) == 100
    for record, (instance_id, g) in zip(records, entries):
        assert record["instance_id"] == instance_id
        assert record["num_vars"] == 10
        assert len(record["node_kinds"]) == len(g.nodes)
        assert len(record["features"]) == len(g.nodes)
        assert len(record["edge_list"]) == len(g.edges)
        assert len(record["label_order"]) == 10
