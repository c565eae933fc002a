"""Formula construction, DIMACS parsing/emission, and the generator."""

import pytest

from satbranch.cnf import (
    DimacsError,
    Formula,
    GeneratorConfig,
    Literal,
    emit_dimacs,
    generate_3cnf,
    parse_dimacs,
)


def test_parse_small_formula():
    f = parse_dimacs("p cnf 3 2\n1 -2 0\n2 3 0\n")
    assert f.num_vars == 3
    assert f.num_clauses == 2
    assert f.signed_clauses == ((1, -2), (2, 3))


def test_parse_comments_and_blank_lines():
    text = "c a comment\n\nc another\np cnf 2 1\nc inline comment\n1 2 0\n"
    f = parse_dimacs(text)
    assert f.signed_clauses == ((1, 2),)


def test_parse_satlib_percent_terminator():
    text = "p cnf 2 2\n1 2 0\n-1 -2 0\n%\n0\n\n"
    f = parse_dimacs(text)
    assert f.num_clauses == 2


def test_parse_clause_spanning_lines():
    f = parse_dimacs("p cnf 3 1\n1\n2 3 0\n")
    assert f.signed_clauses == ((1, 2, 3),)


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("1 2 0\n", "line 1"),  # clause before header
        ("p cnf x 2\n", "line 1"),
        ("p cnf 2 1\n1 3 0\n", "line 2"),  # literal out of range
        ("p cnf 2 1\n1 0 extra", "line 2"),
        ("p cnf 2 2\n1 2 0\n", "declares 2 clauses"),
        ("p cnf 2 1\n1 2\n", "unterminated"),
    ],
)
def test_parse_errors_name_the_line(text, fragment):
    with pytest.raises(DimacsError) as err:
        parse_dimacs(text)
    assert fragment in str(err.value)


def test_emit_parse_emit_is_identity():
    for seed in range(100):
        f = generate_3cnf(GeneratorConfig(num_vars=12, clause_ratio=4.3, seed=seed))
        text = emit_dimacs(f)
        assert emit_dimacs(parse_dimacs(text)) == text


def test_emit_small_formula_exact():
    f = Formula.from_ints(3, [[1, -2], [2, 3]])
    assert emit_dimacs(f) == "p cnf 3 2\n1 -2 0\n2 3 0\n"


def test_generator_clause_counts_round_half_up():
    assert GeneratorConfig(100, 4.3, 0).num_clauses == 430
    assert GeneratorConfig(20, 4.3, 0).num_clauses == 86
    assert GeneratorConfig(50, 4.3, 0).num_clauses == 215
    assert GeneratorConfig(10, 4.25, 0).num_clauses == 43  # 42.5 rounds up


def test_generator_is_deterministic():
    a = generate_3cnf(GeneratorConfig(30, 4.3, 17))
    b = generate_3cnf(GeneratorConfig(30, 4.3, 17))
    assert a == b
    c = generate_3cnf(GeneratorConfig(30, 4.3, 18))
    assert a.signed_clauses != c.signed_clauses


def test_generator_seeds_do_not_collide():
    seen = {generate_3cnf(GeneratorConfig(20, 4.3, s)).signed_clauses for s in range(100)}
    assert len(seen) == 100


def test_generator_clauses_use_three_distinct_variables():
    f = generate_3cnf(GeneratorConfig(25, 4.3, 5))
    for clause in f.signed_clauses:
        assert len(clause) == 3
        assert len({abs(l) for l in clause}) == 3


def test_generator_duplicate_clause_rejection():
    cfg = GeneratorConfig(5, 8.0, 3, forbid_duplicate_clauses=True)
    f = generate_3cnf(cfg)
    assert len(set(f.signed_clauses)) == f.num_clauses


def test_literal_validation_and_sign_round_trip():
    with pytest.raises(ValueError):
        Literal(0, True)
    lit = Literal.from_signed(-4)
    assert lit.variable == 4 and not lit.polarity
    assert lit.signed == -4
    assert lit.negated().signed == 4


def test_formula_from_ints_validates_range():
    with pytest.raises(ValueError):
        Formula.from_ints(2, [[1, 3]])
    with pytest.raises(ValueError):
        Formula.from_ints(2, [[0]])


def test_formula_variables():
    f = Formula.from_ints(4, [[1, -3]])
    assert list(f.variables()) == [1, 2, 3, 4]
