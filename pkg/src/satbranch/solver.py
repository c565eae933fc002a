"""CDCL SAT solver with an injectable initial branching order.

Two-watched-literal propagation, first-UIP clause learning,
non-chronological backjumping, Luby restarts, phase saving, and VSIDS or
VMTF decision heuristics. A suggested variable order can be injected
before search (seeding the VSIDS activities or the VMTF queue) and
re-applied at every restart ("reminding"). All counters needed for
order labeling and evaluation are recorded in SolveStats.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from heapq import heapify, heappop, heappush

from satbranch.cnf import Formula

ACTIVITY_RESCALE_LIMIT = 1e100
INJECTED_ACTIVITY_MAX = 1.0


class Result(Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    BUDGET_EXCEEDED = "BUDGET_EXCEEDED"


class Heuristic(Enum):
    VSIDS = "vsids"
    VMTF = "vmtf"


@dataclass(frozen=True)
class VariableOrder:
    """A permutation of 1..n; position 0 is branched first (rank 1)."""

    permutation: tuple[int, ...]

    def __post_init__(self):
        n = len(self.permutation)
        if sorted(self.permutation) != list(range(1, n + 1)):
            raise ValueError("permutation must cover 1..n exactly once")

    @cached_property
    def ranks(self) -> dict[int, int]:
        """Variable -> 1-based rank (rank 1 = branch first)."""
        return {v: i + 1 for i, v in enumerate(self.permutation)}

    def rank(self, variable: int) -> int:
        return self.ranks[variable]

    @property
    def num_vars(self) -> int:
        return len(self.permutation)

    @classmethod
    def identity(cls, num_vars: int) -> "VariableOrder":
        return cls(tuple(range(1, num_vars + 1)))


@dataclass(frozen=True)
class SolverConfig:
    heuristic: Heuristic = Heuristic.VSIDS
    var_decay: float = 0.95
    restart_base: int = 100
    injected_order: VariableOrder | None = None
    remind_factor: float = 0.0
    remind_decay: float = 0.95
    # Appendix-style literal exponent decay**(-rank) boosts the worst rank
    # most; the default decay**(rank-1) boosts rank 1 most.
    remind_literal_exponent: bool = False
    seed: int = 0
    phase_default: str = "saved"  # "false" | "true" | "saved"
    conflict_limit: int | None = None
    propagation_limit: int | None = None
    learned_clause_limit: int | None = None

    def __post_init__(self):
        if not 0.0 < self.var_decay < 1.0:
            raise ValueError("var_decay must be in (0, 1)")
        if not 0.0 < self.remind_decay < 1.0:
            raise ValueError("remind_decay must be in (0, 1)")
        if self.remind_factor < 0.0:
            raise ValueError("remind_factor must be non-negative")
        if self.restart_base < 1:
            raise ValueError("restart_base must be >= 1")
        if self.phase_default not in ("false", "true", "saved"):
            raise ValueError("phase_default must be 'false', 'true', or 'saved'")
        if self.remind_factor > 0.0 and self.heuristic is Heuristic.VMTF:
            raise ValueError("reminding updates VSIDS activities; use heuristic=VSIDS")
        if self.remind_factor > 0.0 and self.injected_order is None:
            raise ValueError("remind_factor > 0 requires an injected order")


@dataclass(frozen=True)
class SolveStats:
    result: Result
    model: dict[int, bool] | None
    propagations: int
    conflicts: int
    decisions: int
    restarts: int
    per_var_conflicts: dict[int, int]
    wall_time: float
    first_decision_var: int | None = None
    conflicts_at_restarts: tuple[int, ...] = ()


def luby(i: int) -> int:
    """i-th element (1-based) of the Luby sequence 1,1,2,1,1,2,4,..."""
    if i < 1:
        raise ValueError("luby index is 1-based")
    while True:
        if (i + 1) & i == 0:  # i == 2^k - 1
            return (i + 1) >> 1
        i = i - (1 << (i.bit_length() - 1)) + 1


class Solver:
    """Single-use CDCL solver instance for one formula.

    Instances are not shareable during search; run independent instances
    for concurrency. The search itself is deterministic for a given
    (formula, config).
    """

    def __init__(self, formula: Formula, config: SolverConfig | None = None):
        self.formula = formula
        self.config = config or SolverConfig()
        n = formula.num_vars
        order = self.config.injected_order
        if order is not None and order.num_vars != n:
            raise ValueError(
                f"injected order covers {order.num_vars} variables, formula has {n}"
            )

        self._n = n
        size = 2 * n + 1
        # _val is indexed by signed literal (negative literals use Python
        # negative indexing): 1 true, -1 false, 0 unassigned.
        self._val: list[int] = [0] * size
        self._watches: list[list[list[int]]] = [[] for _ in range(size)]
        self._clauses: list[list[int]] = []
        self._level = [0] * (n + 1)
        self._reason = [-1] * (n + 1)
        self._trail: list[int] = []
        self._trail_lim: list[int] = []
        self._qhead = 0
        self._phase = [False] * (n + 1)
        self._seen = bytearray(n + 1)

        # _score holds VSIDS activities or VMTF queue stamps, depending on
        # the heuristic; the decision heap is lazy over (-score, var).
        vsids = self.config.heuristic is Heuristic.VSIDS
        if vsids:
            self._score: list[float] = [0.0] * (n + 1)
        else:
            self._score = [float(n - v) for v in range(n + 1)]
        self._next_stamp = float(n)
        self._var_inc = 1.0
        self._heap: list[tuple[float, int]] = []

        self._propagations = 0
        self._conflicts = 0
        self._decisions = 0
        self._restarts = 0
        self._per_var_conflicts: Counter[int] = Counter()
        self._first_decision_var: int | None = None
        self._conflicts_at_restarts: list[int] = []
        self._num_original = 0
        self._ok = True
        self._done = False

        for clause in formula.signed_clauses:
            self._attach_input_clause(list(clause))
        self._num_original = len(self._clauses)

        if order is not None:
            self.inject_order(order)
        else:
            self._rebuild_heap()

    # ------------------------------------------------------------------
    # order injection and reminding

    def inject_order(self, order: VariableOrder) -> None:
        """Seed the decision structures so rank 1 is branched first.

        VSIDS: activity(v) = A_max * var_decay**(rank(v)-1), a geometric
        ladder whose adjacent gaps are overcome by roughly one conflict
        bump. VMTF: the queue is initialized to the permutation.
        """
        if self._done or self._decisions or self._conflicts:
            raise RuntimeError("inject_order must be called before search starts")
        if order.num_vars != self._n:
            raise ValueError(
                f"order covers {order.num_vars} variables, formula has {self._n}"
            )
        n = self._n
        score = self._score
        if self.config.heuristic is Heuristic.VSIDS:
            g = self.config.var_decay
            for v, r in order.ranks.items():
                score[v] = INJECTED_ACTIVITY_MAX * g ** (r - 1)
        else:
            for v, r in order.ranks.items():
                score[v] = float(n - r)
            self._next_stamp = float(n)
        self._rebuild_heap()

    def remind(
        self,
        order: VariableOrder | None = None,
        remind_factor: float | None = None,
        remind_decay: float | None = None,
    ) -> None:
        """Add the suggested order back into the VSIDS activities.

        activity(v) += remind_factor * max(activity) * remind_decay**(rank(v)-1),
        so rank 1 receives the largest boost. With remind_literal_exponent
        the exponent is -rank(v) instead. A factor of 0 leaves activities
        bit-identical.
        """
        if self.config.heuristic is not Heuristic.VSIDS:
            raise ValueError("reminding requires the VSIDS heuristic")
        order = order if order is not None else self.config.injected_order
        factor = remind_factor if remind_factor is not None else self.config.remind_factor
        decay = remind_decay if remind_decay is not None else self.config.remind_decay
        if factor < 0.0:
            raise ValueError("remind_factor must be non-negative")
        if factor == 0.0:
            return
        if order is None:
            raise ValueError("no order to remind of")
        score = self._score
        max_act = max(score[1:]) if self._n else 0.0
        literal_exp = self.config.remind_literal_exponent
        for v, r in order.ranks.items():
            exponent = -r if literal_exp else r - 1
            score[v] += factor * max_act * decay**exponent
        if max(score[1:], default=0.0) > ACTIVITY_RESCALE_LIMIT:
            self._rescale_activities()
        self._rebuild_heap()

    @property
    def activities(self) -> dict[int, float]:
        """Current VSIDS activity per variable."""
        if self.config.heuristic is not Heuristic.VSIDS:
            raise ValueError("activities are only defined for VSIDS")
        return {v: self._score[v] for v in range(1, self._n + 1)}

    def queue_order(self) -> list[int]:
        """Current VMTF queue from head (next to branch) to tail."""
        if self.config.heuristic is not Heuristic.VMTF:
            raise ValueError("queue_order is only defined for VMTF")
        return sorted(range(1, self._n + 1), key=lambda v: (-self._score[v], v))

    # ------------------------------------------------------------------
    # search

    def solve(self) -> SolveStats:
        if self._done:
            raise RuntimeError("solver instances are single-use")
        self._done = True
        start = time.perf_counter()
        result, model = self._search()
        wall = time.perf_counter() - start
        if model is not None and not verify_model(self.formula, model):
            raise RuntimeError("internal error: SAT model failed verification")
        return SolveStats(
            result=result,
            model=model,
            propagations=self._propagations,
            conflicts=self._conflicts,
            decisions=self._decisions,
            restarts=self._restarts,
            per_var_conflicts=dict(self._per_var_conflicts),
            wall_time=wall,
            first_decision_var=self._first_decision_var,
            conflicts_at_restarts=tuple(self._conflicts_at_restarts),
        )

    def _search(self) -> tuple[Result, dict[int, bool] | None]:
        if not self._ok:
            return Result.UNSAT, None
        cfg = self.config
        n = self._n
        conflict_limit = cfg.conflict_limit
        prop_limit = cfg.propagation_limit
        vsids = cfg.heuristic is Heuristic.VSIDS
        restart_threshold = cfg.restart_base * luby(1)
        conflicts_since_restart = 0

        while True:
            confl = self._propagate()
            if confl >= 0:
                if not self._trail_lim:
                    return Result.UNSAT, None
                self._conflicts += 1
                conflicts_since_restart += 1
                learnt, bt_level, involved = self._analyze(confl)
                self._per_var_conflicts.update(involved)
                if vsids:
                    self._bump_vsids(involved)
                else:
                    self._bump_vmtf(learnt)
                self._backtrack(bt_level)
                self._assert_learnt(learnt)
                if conflict_limit is not None and self._conflicts >= conflict_limit:
                    return Result.BUDGET_EXCEEDED, None
                if prop_limit is not None and self._propagations >= prop_limit:
                    return Result.BUDGET_EXCEEDED, None
                continue

            if prop_limit is not None and self._propagations >= prop_limit:
                return Result.BUDGET_EXCEEDED, None
            if conflicts_since_restart >= restart_threshold:
                self._restarts += 1
                self._conflicts_at_restarts.append(conflicts_since_restart)
                conflicts_since_restart = 0
                self._backtrack(0)
                if cfg.remind_factor > 0.0:
                    self.remind()
                limit = cfg.learned_clause_limit
                if limit is not None and len(self._clauses) - self._num_original > limit:
                    self._reduce_db(limit)
                restart_threshold = cfg.restart_base * luby(self._restarts + 1)
                continue
            if len(self._trail) == n:
                val = self._val
                return Result.SAT, {v: val[v] > 0 for v in range(1, n + 1)}
            self._decide()

    def _attach_input_clause(self, clause: list[int]) -> None:
        if not self._ok:
            return
        if not clause:
            self._ok = False
            return
        if len(clause) == 1:
            lit = clause[0]
            v = self._val[lit]
            if v < 0:
                self._ok = False
            elif v == 0:
                self._enqueue(lit, -1)
            return
        ci = len(self._clauses)
        self._clauses.append(clause)
        self._watches[clause[0]].append([ci, clause[1]])
        self._watches[clause[1]].append([ci, clause[0]])

    def _enqueue(self, lit: int, reason: int) -> None:
        """Record an implied assignment (counts as a propagation)."""
        val = self._val
        val[lit] = 1
        val[-lit] = -1
        v = lit if lit > 0 else -lit
        self._level[v] = len(self._trail_lim)
        self._reason[v] = reason
        self._trail.append(lit)
        self._propagations += 1

    def _propagate(self) -> int:
        """Unit propagation to fixpoint. Returns conflict clause index or -1."""
        val = self._val
        watches = self._watches
        clauses = self._clauses
        level = self._level
        reason = self._reason
        trail = self._trail
        dl = len(self._trail_lim)
        qhead = self._qhead
        confl = -1
        props = 0

        while qhead < len(trail):
            p = trail[qhead]
            qhead += 1
            fl = -p
            ws = watches[fl]
            i = j = 0
            nw = len(ws)
            while i < nw:
                w = ws[i]
                i += 1
                if val[w[1]] > 0:
                    ws[j] = w
                    j += 1
                    continue
                ci = w[0]
                c = clauses[ci]
                if c[0] == fl:
                    c[0] = c[1]
                    c[1] = fl
                first = c[0]
                if val[first] > 0:
                    w[1] = first
                    ws[j] = w
                    j += 1
                    continue
                for k in range(2, len(c)):
                    lk = c[k]
                    if val[lk] >= 0:
                        c[1] = lk
                        c[k] = fl
                        w[1] = first
                        watches[lk].append(w)
                        break
                else:
                    ws[j] = w
                    j += 1
                    if val[first] < 0:
                        confl = ci
                        while i < nw:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        break
                    val[first] = 1
                    val[-first] = -1
                    v = first if first > 0 else -first
                    level[v] = dl
                    reason[v] = ci
                    trail.append(first)
                    props += 1
            del ws[j:]
            if confl >= 0:
                qhead = len(trail)
                break

        self._qhead = qhead
        self._propagations += props
        return confl

    def _analyze(self, confl: int) -> tuple[list[int], int, list[int]]:
        """First-UIP analysis. Returns (learnt clause, backjump level, vars seen)."""
        clauses = self._clauses
        level = self._level
        reason = self._reason
        trail = self._trail
        seen = self._seen
        dl = len(self._trail_lim)
        learnt = [0]
        involved: list[int] = []
        counter = 0
        p = 0
        index = len(trail) - 1

        while True:
            c = clauses[confl]
            for q in c[1:] if p else c:
                v = q if q > 0 else -q
                if not seen[v] and level[v] > 0:
                    seen[v] = 1
                    involved.append(v)
                    if level[v] >= dl:
                        counter += 1
                    else:
                        learnt.append(q)
            while True:
                p = trail[index]
                index -= 1
                pv = p if p > 0 else -p
                if seen[pv]:
                    break
            counter -= 1
            if counter == 0:
                break
            seen[pv] = 0
            confl = reason[pv]

        learnt[0] = -p
        for v in involved:
            seen[v] = 0

        if len(learnt) == 1:
            return learnt, 0, involved
        max_i = 1
        max_level = level[abs(learnt[1])]
        for k in range(2, len(learnt)):
            lv = level[abs(learnt[k])]
            if lv > max_level:
                max_level = lv
                max_i = k
        learnt[1], learnt[max_i] = learnt[max_i], learnt[1]
        return learnt, max_level, involved

    def _assert_learnt(self, learnt: list[int]) -> None:
        if len(learnt) == 1:
            self._enqueue(learnt[0], -1)
            return
        ci = len(self._clauses)
        self._clauses.append(learnt)
        self._watches[learnt[0]].append([ci, learnt[1]])
        self._watches[learnt[1]].append([ci, learnt[0]])
        self._enqueue(learnt[0], ci)

    def _bump_vsids(self, involved: list[int]) -> None:
        score = self._score
        heap = self._heap
        inc = self._var_inc
        rescale = False
        for v in involved:
            a = score[v] + inc
            score[v] = a
            if a > ACTIVITY_RESCALE_LIMIT:
                rescale = True
            heappush(heap, (-a, v))
        self._var_inc = inc / self.config.var_decay
        if rescale:
            self._rescale_activities()
            self._rebuild_heap()
        elif len(heap) > 2000 + 4 * self._n:
            self._rebuild_heap()

    def _bump_vmtf(self, learnt: list[int]) -> None:
        score = self._score
        heap = self._heap
        ns = self._next_stamp
        for lit in learnt:
            v = lit if lit > 0 else -lit
            ns += 1.0
            score[v] = ns
            heappush(heap, (-ns, v))
        self._next_stamp = ns
        if len(heap) > 2000 + 4 * self._n:
            self._rebuild_heap()

    def _rescale_activities(self) -> None:
        score = self._score
        for v in range(1, self._n + 1):
            score[v] *= 1e-100
        self._var_inc *= 1e-100

    def _rebuild_heap(self) -> None:
        val = self._val
        score = self._score
        self._heap = [(-score[v], v) for v in range(1, self._n + 1) if val[v] == 0]
        heapify(self._heap)

    def _backtrack(self, target_level: int) -> None:
        lim = self._trail_lim
        if len(lim) <= target_level:
            return
        trail = self._trail
        val = self._val
        phase = self._phase
        score = self._score
        heap = self._heap
        reason = self._reason
        target = lim[target_level]
        for k in range(len(trail) - 1, target - 1, -1):
            lit = trail[k]
            v = lit if lit > 0 else -lit
            phase[v] = lit > 0
            val[lit] = 0
            val[-lit] = 0
            reason[v] = -1
            heappush(heap, (-score[v], v))
        del trail[target:]
        del lim[target_level:]
        self._qhead = target

    def _decide(self) -> None:
        val = self._val
        score = self._score
        heap = self._heap
        while True:
            neg_score, v = heappop(heap)
            if val[v] == 0 and score[v] == -neg_score:
                break
        mode = self.config.phase_default
        if mode == "saved":
            pol = self._phase[v]
        else:
            pol = mode == "true"
        lit = v if pol else -v
        self._trail_lim.append(len(self._trail))
        val[lit] = 1
        val[-lit] = -1
        self._level[v] = len(self._trail_lim)
        self._reason[v] = -1
        self._trail.append(lit)
        self._decisions += 1
        if self._first_decision_var is None:
            self._first_decision_var = v

    def _reduce_db(self, limit: int) -> None:
        """Drop the longest learned clauses down to limit//2; level-0 only.

        Satisfied learned clauses are dropped as well, and every surviving
        clause is re-watched on two non-false literals (or a true literal),
        which is valid because level 0 is propagated to fixpoint here.
        """
        assert not self._trail_lim
        val = self._val
        learned = self._clauses[self._num_original:]
        keep_n = max(limit // 2, 0)
        ranked = sorted(range(len(learned)), key=lambda i: (len(learned[i]), i))
        kept_idx = sorted(ranked[:keep_n])
        kept = [learned[i] for i in kept_idx]

        self._clauses = self._clauses[: self._num_original] + kept
        size = 2 * self._n + 1
        self._watches = [[] for _ in range(size)]
        for ci, c in enumerate(self._clauses):
            nonfalse = [k for k, l in enumerate(c) if val[l] >= 0]
            if len(nonfalse) >= 2:
                a, b = nonfalse[0], nonfalse[1]
            else:
                true_pos = next(k for k, l in enumerate(c) if val[l] > 0)
                a, b = true_pos, (0 if true_pos != 0 else 1)
            c[0], c[a] = c[a], c[0]
            if b == 0:
                b = a
            c[1], c[b] = c[b], c[1]
            self._watches[c[0]].append([ci, c[1]])
            self._watches[c[1]].append([ci, c[0]])
        for v in range(1, self._n + 1):
            self._reason[v] = -1


def solve(formula: Formula, config: SolverConfig | None = None) -> SolveStats:
    """Solve a formula; sound and complete within the configured budgets."""
    return Solver(formula, config).solve()


def verify_model(formula: Formula, model: dict[int, bool]) -> bool:
    """True iff the (complete) assignment satisfies every clause."""
    for v in formula.variables():
        if v not in model:
            raise ValueError(f"model does not assign variable {v}")
    for clause in formula.signed_clauses:
        for lit in clause:
            if model[lit if lit > 0 else -lit] == (lit > 0):
                break
        else:
            return False
    return True
