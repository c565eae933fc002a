"""CNF data model, DIMACS parsing/serialization, and random 3-CNF generation."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

# Identifier for the generator PRNG, recorded in generated formula names so
# experiments remain replayable across versions.
GENERATOR_ALGORITHM = "mt19937"


class DimacsError(ValueError):
    """Malformed DIMACS input. Carries the 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True, order=True)
class Literal:
    """A signed occurrence of a variable. Variables are 1-based (DIMACS)."""

    variable: int
    polarity: bool

    def __post_init__(self):
        if self.variable < 1:
            raise ValueError(f"variable index must be >= 1, got {self.variable}")

    @classmethod
    def from_signed(cls, lit: int) -> "Literal":
        if lit == 0:
            raise ValueError("0 is not a literal")
        return cls(abs(lit), lit > 0)

    @property
    def signed(self) -> int:
        return self.variable if self.polarity else -self.variable

    def negated(self) -> "Literal":
        return Literal(self.variable, not self.polarity)

    def __str__(self) -> str:
        return str(self.signed)


@dataclass(frozen=True)
class Formula:
    """An immutable CNF instance. Clause and literal order is significant."""

    num_vars: int
    clauses: tuple[tuple[Literal, ...], ...]
    source_name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.num_vars < 0:
            raise ValueError("num_vars must be non-negative")
        for clause in self.clauses:
            for lit in clause:
                if lit.variable > self.num_vars:
                    raise ValueError(
                        f"literal {lit.signed} exceeds declared {self.num_vars} variables"
                    )

    @classmethod
    def from_ints(
        cls,
        num_vars: int,
        clauses: Iterable[Iterable[int]],
        source_name: str | None = None,
    ) -> "Formula":
        """Build a Formula from clauses of signed integer literals."""
        return cls(
            num_vars,
            tuple(tuple(Literal.from_signed(l) for l in c) for c in clauses),
            source_name,
        )

    @cached_property
    def signed_clauses(self) -> tuple[tuple[int, ...], ...]:
        """Clauses as signed integers; cached since solvers consume this form."""
        return tuple(tuple(l.signed for l in c) for c in self.clauses)

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def variables(self) -> range:
        return range(1, self.num_vars + 1)


@dataclass(frozen=True)
class GeneratorConfig:
    """Parameters for uniform random 3-CNF generation."""

    num_vars: int
    clause_ratio: float = 4.3
    seed: int = 0
    forbid_duplicate_literals: bool = True
    forbid_duplicate_clauses: bool = False

    def __post_init__(self):
        if self.num_vars < 3:
            raise ValueError("3-CNF generation needs at least 3 variables")
        if self.clause_ratio <= 0:
            raise ValueError("clause_ratio must be positive")

    @property
    def num_clauses(self) -> int:
        return int(self.clause_ratio * self.num_vars + 0.5)


def parse_dimacs(text: str | bytes, source_name: str | None = None) -> Formula:
    """Parse DIMACS CNF text into a Formula.

    Accepts comment lines (``c``), the ``p cnf`` header, and zero-terminated
    clauses possibly spanning lines. A line starting with ``%`` ends the input
    (SATLIB convention). Raises DimacsError with a line number on malformed
    input, literals out of range, or a clause-count mismatch.
    """
    if isinstance(text, bytes):
        text = text.decode("ascii", errors="replace")

    num_vars: int | None = None
    declared_clauses: int | None = None
    clauses: list[tuple[Literal, ...]] = []
    current: list[Literal] = []
    header_line = 0

    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("c"):
            continue
        if stripped.startswith("%"):
            break
        if stripped.startswith("p"):
            if num_vars is not None:
                raise DimacsError("duplicate header", lineno)
            parts = stripped.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"malformed header {stripped!r}", lineno)
            try:
                num_vars = int(parts[2])
                declared_clauses = int(parts[3])
            except ValueError:
                raise DimacsError(f"malformed header {stripped!r}", lineno) from None
            if num_vars < 0 or declared_clauses < 0:
                raise DimacsError("negative counts in header", lineno)
            header_line = lineno
            continue
        if num_vars is None:
            raise DimacsError("clause before 'p cnf' header", lineno)
        for token in stripped.split():
            try:
                value = int(token)
            except ValueError:
                raise DimacsError(f"non-integer token {token!r}", lineno) from None
            if value == 0:
                clauses.append(tuple(current))
                current = []
                continue
            if abs(value) > num_vars:
                raise DimacsError(
                    f"variable {abs(value)} exceeds declared {num_vars}", lineno
                )
            current.append(Literal.from_signed(value))

    if num_vars is None:
        raise DimacsError("missing 'p cnf' header", 1)
    if current:
        raise DimacsError("unterminated clause at end of input", lineno)
    if len(clauses) != declared_clauses:
        raise DimacsError(
            f"header declares {declared_clauses} clauses, found {len(clauses)}",
            header_line,
        )
    return Formula(num_vars, tuple(clauses), source_name)


def emit_dimacs(formula: Formula) -> str:
    """Serialize a Formula as DIMACS CNF text. Round-trip stable with parse_dimacs."""
    lines = [f"p cnf {formula.num_vars} {formula.num_clauses}"]
    for clause in formula.signed_clauses:
        lines.append(" ".join(str(l) for l in clause) + " 0")
    return "\n".join(lines) + "\n"


def generate_3cnf(config: GeneratorConfig) -> Formula:
    """Generate a uniform random 3-CNF formula, fully determined by the seed.

    Each clause draws 3 distinct variables (unless forbid_duplicate_literals
    is off) and uniform polarities. Duplicate clauses are allowed by default,
    matching the uniform random model.
    """
    rng = random.Random(config.seed)
    n = config.num_vars
    target = config.num_clauses
    clauses: list[tuple[int, int, int]] = []
    seen: set[frozenset[int]] = set()

    while len(clauses) < target:
        if config.forbid_duplicate_literals:
            vs = rng.sample(range(1, n + 1), 3)
        else:
            vs = [rng.randint(1, n) for _ in range(3)]
        clause = tuple(v if rng.getrandbits(1) else -v for v in vs)
        if config.forbid_duplicate_clauses:
            key = frozenset(clause)
            if key in seen:
                continue
            seen.add(key)
        clauses.append(clause)

    name = (
        f"3cnf-n{n}-r{config.clause_ratio:g}-s{config.seed}-{GENERATOR_ALGORITHM}"
    )
    return Formula.from_ints(n, clauses, source_name=name)
