"""Fixture plumbing: a proof-emitting solver, a splitter, and instance generation.

The solver is a small conflict-driven search with first-UIP clause
learning. Every learned clause passes the plain propagation check
against the clauses known when it was learned, so the emitted proof
needs no deletions and no resolution checks. It exists to produce
correct fixtures deterministically, not to be fast.
"""

import random
from dataclasses import dataclass
from itertools import product
from typing import Optional

from .core import ADD, Clause, EMPTY_CLAUSE, Formula, ProofStep, Refutation
from .formats import Cube


class ResourceLimitError(Exception):
    """Conflict budget exhausted; satisfiability unknown."""


class DepthTooLargeError(Exception):
    """Asked to split on more variables than the formula has."""


class GiveUpError(Exception):
    """Random generation did not find a qualifying instance in budget."""


@dataclass(frozen=True)
class SolveOutcome:
    sat: bool
    assignment: Optional[dict] = None  # variable -> bool, total on sat
    refutation: Optional[Refutation] = None  # addition-only proof on unsat


def solve_drup(formula: Formula, seed: int = 0, max_conflicts: int = 100000) -> SolveOutcome:
    """Decide the formula, emitting an addition-only refutation when unsat.

    Deterministic for a given (formula, seed). Raises ResourceLimitError
    when the conflict budget runs out.
    """
    return _Solver(formula, seed, max_conflicts).run()


class _Solver:
    def __init__(self, formula, seed, max_conflicts):
        self.rng = random.Random(seed)
        self.max_conflicts = max_conflicts
        self.clauses = []  # literal lists; inputs first, then learned
        self.occ = {}  # literal -> clause indices containing it
        self.empty_input = False
        for c in formula.distinct():
            if len(c) == 0:
                self.empty_input = True
            self._attach(list(c.literals))
        self.vars = sorted({abs(l) for c in formula.distinct() for l in c.literals})
        self.assign = {}  # var -> bool
        self.level = {}
        self.reason = {}  # var -> clause index | None for decisions
        self.trail = []
        self.qhead = 0
        self.proof = []  # learned clauses in emission order

    def _attach(self, lits):
        idx = len(self.clauses)
        self.clauses.append(lits)
        for l in lits:
            self.occ.setdefault(l, []).append(idx)
        return idx

    def _value(self, lit):
        v = self.assign.get(abs(lit))
        if v is None:
            return None
        return v == (lit > 0)

    def _enqueue(self, lit, reason_idx, level):
        var = abs(lit)
        self.assign[var] = lit > 0
        self.level[var] = level
        self.reason[var] = reason_idx
        self.trail.append(lit)

    def _propagate(self, level):
        while self.qhead < len(self.trail):
            lit = self.trail[self.qhead]
            self.qhead += 1
            for ci in self.occ.get(-lit, ()):
                lits = self.clauses[ci]
                unassigned = None
                skip = False
                for m in lits:
                    v = self._value(m)
                    if v is True:
                        skip = True
                        break
                    if v is None:
                        if unassigned is None:
                            unassigned = m
                        else:
                            skip = True
                            break
                if skip:
                    continue
                if unassigned is None:
                    return ci
                self._enqueue(unassigned, ci, level)
        return None

    def _analyze(self, conflict_ci, level):
        """First-UIP conflict clause, pivot first, plus the backjump level."""
        seen = set()
        rest = []  # literals from lower decision levels
        counter = 0
        lits = self.clauses[conflict_ci]
        idx = len(self.trail) - 1
        p = None
        while True:
            for q in lits:
                if p is not None and q == p:
                    continue
                var = abs(q)
                if var in seen:
                    continue
                lv = self.level[var]
                if lv == 0:
                    continue  # root-implied, rederivable by propagation
                seen.add(var)
                if lv == level:
                    counter += 1
                else:
                    rest.append(q)
            while abs(self.trail[idx]) not in seen:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            counter -= 1
            if counter == 0:
                break
            lits = self.clauses[self.reason[abs(p)]]
        learned = [-p] + rest
        backjump = max((self.level[abs(q)] for q in rest), default=0)
        return learned, backjump

    def _backjump(self, target):
        while self.trail and self.level[abs(self.trail[-1])] > target:
            lit = self.trail.pop()
            var = abs(lit)
            del self.assign[var]
            del self.level[var]
            del self.reason[var]
        self.qhead = len(self.trail)

    def _refutation(self):
        steps = [ProofStep(ADD, Clause(lits)) for lits in self.proof]
        steps.append(ProofStep(ADD, EMPTY_CLAUSE))
        return SolveOutcome(False, refutation=Refutation(steps))

    def run(self):
        if self.empty_input:
            return self._refutation()
        for ci, lits in enumerate(self.clauses):
            if len(lits) == 1:
                v = self._value(lits[0])
                if v is False:
                    return self._refutation()
                if v is None:
                    self._enqueue(lits[0], ci, 0)
        conflicts = 0
        level = 0
        while True:
            conflict_ci = self._propagate(level)
            if conflict_ci is not None:
                conflicts += 1
                if conflicts > self.max_conflicts:
                    raise ResourceLimitError("no verdict within %d conflicts" % self.max_conflicts)
                if level == 0:
                    return self._refutation()
                learned, backjump = self._analyze(conflict_ci, level)
                self.proof.append(learned)
                self._backjump(backjump)
                ci = self._attach(learned)
                self._enqueue(learned[0], ci, backjump)
                level = backjump
                continue
            if len(self.assign) == len(self.vars):
                return SolveOutcome(True, assignment=dict(self.assign))
            free = [v for v in self.vars if v not in self.assign]
            var = self.rng.choice(free)
            lit = var if self.rng.random() < 0.5 else -var
            level += 1
            self._enqueue(lit, None, level)


def split(formula: Formula, depth: int) -> tuple:
    """All 2^depth cubes over the most frequent variables.

    Frequency counts literal occurrences over clause instances; ties go
    to the smaller variable. Cube order enumerates the positive branch
    first at every position.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    counts = {}
    for clause, k in formula.counts():
        for lit in clause.literals:
            var = abs(lit)
            counts[var] = counts.get(var, 0) + k
    if depth > len(counts):
        raise DepthTooLargeError(
            "cannot split %d-variable formula at depth %d" % (len(counts), depth)
        )
    chosen = sorted(counts, key=lambda v: (-counts[v], v))[:depth]
    cubes = []
    for signs in product((1, -1), repeat=depth):
        cubes.append(Cube(tuple(s * v for s, v in zip(signs, chosen))))
    return tuple(cubes)


def gen_random_unsat(
    num_vars: int,
    clause_ratio: float,
    seed: int = 0,
    max_attempts: int = 500,
) -> Formula:
    """Rejection-sample a random 3-CNF until one is unsatisfiable.

    Deterministic for the given arguments. num_vars is capped so results
    stay small enough to cross-check exhaustively.
    """
    if not 1 <= num_vars <= 24:
        raise ValueError("num_vars must be between 1 and 24")
    num_clauses = max(1, round(clause_ratio * num_vars))
    width = min(3, num_vars)
    for attempt in range(max_attempts):
        rng = random.Random(seed * 1000003 + attempt)
        clauses = []
        for _ in range(num_clauses):
            chosen = rng.sample(range(1, num_vars + 1), width)
            clauses.append(Clause(v if rng.random() < 0.5 else -v for v in chosen))
        formula = Formula(clauses)
        try:
            outcome = solve_drup(formula, seed=0)
        except ResourceLimitError:
            continue
        if not outcome.sat:
            return formula
    raise GiveUpError("no unsatisfiable sample within %d attempts" % max_attempts)
