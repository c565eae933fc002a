"""CDCL SAT solving with injectable branching orders.

Layout: `cnf` (formulas, DIMACS, random 3-CNF), `solver` (the CDCL core
with order injection and reminding), `labeling` (conflict, first-variable
and genetic reference orders), `graphx` (tripartite graph export),
`ranking` (relevance, Spearman, confidence intervals), `harness`
(experiments and file formats), `cli` (the satbranch command).
"""

from satbranch.cnf import (
    DimacsError,
    Formula,
    GeneratorConfig,
    Literal,
    emit_dimacs,
    generate_3cnf,
    parse_dimacs,
)
from satbranch.labeling import (
    GeneticConfig,
    LabelMethod,
    LabelRecord,
    conflict_label,
    first_variable_label,
    genetic_label,
    order_from_scores,
)
from satbranch.ranking import EvalRow, aggregate, mean_ci, relevance, spearman
from satbranch.solver import (
    Heuristic,
    Result,
    SolveStats,
    Solver,
    SolverConfig,
    VariableOrder,
    solve,
    verify_model,
)

__all__ = [
    "DimacsError",
    "EvalRow",
    "Formula",
    "GeneratorConfig",
    "GeneticConfig",
    "Heuristic",
    "LabelMethod",
    "LabelRecord",
    "Literal",
    "Result",
    "SolveStats",
    "Solver",
    "SolverConfig",
    "VariableOrder",
    "aggregate",
    "conflict_label",
    "emit_dimacs",
    "first_variable_label",
    "generate_3cnf",
    "genetic_label",
    "mean_ci",
    "order_from_scores",
    "parse_dimacs",
    "relevance",
    "solve",
    "spearman",
    "verify_model",
]
