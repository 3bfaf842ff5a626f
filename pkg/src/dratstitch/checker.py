"""Unit propagation, redundancy checks, and proof replay.

The replay engine keeps the clause database in an occurrence index and
maintains the root unit-propagation closure incrementally: clause
additions extend it, deletions rebuild it only when they can actually
shrink it (the deleted clause was empty, a unit, or a propagation
reason). Redundancy checks push assumption literals on top of the root
closure and undo them afterwards, so one check costs propagation work
proportional to what it derives, not to the database size.
"""

import logging
import random
import time
from collections import Counter
from dataclasses import dataclass
from typing import Optional

from .core import ADD, DELETE, Clause, Formula, Refutation

log = logging.getLogger(__name__)

STRICT = "strict"
PERMISSIVE = "permissive"

NOT_AT = "not-at"
NOT_RAT = "not-rat"
MISSING_EMPTY_CLAUSE = "missing-empty-clause"
DELETION_ABSENT = "deletion-absent"

KIND_AT = "at"
KIND_RAT = "rat"
KIND_DELETE = "delete"


class PivotNotInClauseError(Exception):
    """The requested resolution pivot does not occur in the clause."""


class NotUnitError(Exception):
    """No clause enables a single propagation step on the given literal."""


@dataclass(frozen=True)
class PropagationOutcome:
    """Result of running unit propagation to its fixpoint."""

    conflict: bool
    formula: Optional[Formula] = None  # fixpoint formula; None iff conflict


@dataclass(frozen=True)
class CheckReport:
    valid: bool
    failing_step: Optional[int] = None  # 1-based index of the failing step
    reason: Optional[str] = None
    steps_checked: int = 0
    propagations: int = 0
    wall_time: float = 0.0


@dataclass(frozen=True)
class StepVerdict:
    """Replay annotation for one proof step (consumed by the trimmer)."""

    index: int  # 1-based position in the refutation
    op: str
    clause: Clause
    kind: str  # "at" | "rat" | "delete"
    applied: bool  # deletions only: whether a clause instance was removed
    used: tuple  # clause values consumed by the conflict derivations
    rat_neighbors: tuple  # alive values containing the negated pivot


def propagate_step(formula: Formula, lit: int) -> Formula:
    """Apply one unit-propagation step on lit.

    Requires some clause {lit, m1, ..., mk} whose other literals are all
    contradicted by unit clauses {-mi} of the formula; otherwise raises
    NotUnitError. Clauses containing lit are dropped, -lit is struck from
    the rest, and the unit {lit} is put in with multiplicity one.
    """
    if lit == 0:
        raise ValueError("0 is not a literal")
    units = {c.literals[0] for c in formula.distinct() if len(c) == 1}
    enabled = any(
        lit in c and all(-m in units for m in c.literals if m != lit)
        for c in formula.distinct()
    )
    if not enabled:
        raise NotUnitError("no clause unit-propagates on %d" % lit)
    out = Counter()
    for c, k in formula.counts():
        if lit in c:
            continue
        out[c.without(-lit)] += k
    out[Clause((lit,))] += 1
    return Formula.from_counts(out.items())


def propagate_fixpoint(formula: Formula, order_seed: Optional[int] = None) -> PropagationOutcome:
    """Run unit propagation to its fixpoint.

    The outcome does not depend on propagation order; order_seed shuffles
    the processing order so tests can exercise exactly that.
    """
    values = list(formula.distinct())
    rng = random.Random(order_seed) if order_seed is not None else None
    if rng is not None:
        rng.shuffle(values)

    occ = {}
    pending = []
    for c in values:
        if len(c) == 0:
            return PropagationOutcome(True)
        if len(c) == 1:
            pending.append(c.literals[0])
        for l in c.literals:
            occ.setdefault(l, []).append(c)
    if rng is not None:
        rng.shuffle(pending)

    true = set()
    qi = 0
    while qi < len(pending):
        lit = pending[qi]
        qi += 1
        if lit in true:
            continue
        if -lit in true:
            return PropagationOutcome(True)
        true.add(lit)
        for clause in occ.get(-lit, ()):
            unassigned = None
            skip = False
            for m in clause.literals:
                if m in true:
                    skip = True
                    break
                if -m in true:
                    continue
                if unassigned is None:
                    unassigned = m
                else:
                    skip = True
                    break
            if skip:
                continue
            if unassigned is None:
                return PropagationOutcome(True)
            pending.append(unassigned)

    out = Counter()
    for c, k in formula.counts():
        if any(l in true for l in c.literals):
            continue
        stripped = Clause(l for l in c.literals if -l not in true)
        # a survivor with <2 open literals would have propagated or conflicted
        assert len(stripped) >= 2
        out[stripped] += k
    for lit in true:
        out[Clause((lit,))] += 1
    return PropagationOutcome(False, Formula.from_counts(out.items()))


class _ClauseDb:
    """Occurrence-indexed clause multiset with an incremental root closure."""

    def __init__(self, formula: Formula, record: bool = False):
        self.record = record
        self.mult = dict(formula.counts())
        self.occ = {}  # literal -> {Clause: None}, an ordered set
        self.true_lits = {}  # true literal -> None, ordered
        self.reason = {}  # true literal -> Clause | None (None: assumption)
        self.trail = []
        self.reason_refs = {}  # Clause -> number of root literals it justifies
        self.root_len = 0
        self.root_conflict = False
        self.root_used = ()
        self.propagations = 0
        for clause in self.mult:
            self._index(clause)
        self._rebuild_closure()

    def _index(self, clause):
        for l in clause.literals:
            self.occ.setdefault(l, {})[clause] = None

    def _unindex(self, clause):
        for l in clause.literals:
            del self.occ[l][clause]

    def _rebuild_closure(self):
        self.true_lits.clear()
        self.reason.clear()
        self.trail.clear()
        self.reason_refs.clear()
        self.root_conflict = False
        self.root_used = ()
        empty = None
        pending = []
        for clause in self.mult:
            n = len(clause)
            if n == 0 and empty is None:
                empty = clause
            elif n == 1:
                pending.append((clause.literals[0], clause))
        if empty is not None:
            self.root_conflict = True
            self.root_used = (empty,)
        else:
            conflict, used = self._propagate(pending)
            if conflict:
                self.root_conflict = True
                self.root_used = tuple(used or ())
        self.root_len = len(self.trail)

    def _propagate(self, pending):
        """Assign the pending (literal, reason) pairs and their consequences.

        Returns (conflict, used) where used lists the clause values behind
        the conflict when recording is on.
        """
        queue = list(pending)
        qi = 0
        tl = self.true_lits
        while qi < len(queue):
            lit, reason = queue[qi]
            qi += 1
            if lit in tl:
                continue
            if -lit in tl:
                if not self.record:
                    return True, None
                if reason is not None:
                    return True, self._explain(reason, reason.literals)
                return True, self._explain(None, (lit,))
            tl[lit] = None
            self.reason[lit] = reason
            self.trail.append(lit)
            self.propagations += 1
            if reason is not None:
                self.reason_refs[reason] = self.reason_refs.get(reason, 0) + 1
            watchers = self.occ.get(-lit)
            if not watchers:
                continue
            for clause in list(watchers):
                unassigned = None
                skip = False
                for m in clause.literals:
                    if m in tl:
                        skip = True
                        break
                    if -m in tl:
                        continue
                    if unassigned is None:
                        unassigned = m
                    else:
                        skip = True
                        break
                if skip:
                    continue
                if unassigned is None:
                    if not self.record:
                        return True, None
                    return True, self._explain(clause, clause.literals)
                queue.append((unassigned, clause))
        return False, None

    def _explain(self, falsified, seed_lits):
        """Walk reasons backwards from false literals, collecting used clauses."""
        used = {}
        if falsified is not None:
            used[falsified] = None
        stack = list(seed_lits)
        seen = set(stack)
        while stack:
            m = stack.pop()  # m is false, so -m is on the trail
            r = self.reason.get(-m)
            if r is None or r in used:
                continue
            used[r] = None
            for q in r.literals:
                if q != -m and q not in seen:
                    seen.add(q)
                    stack.append(q)
        return list(used)

    def _undo_to(self, mark):
        while len(self.trail) > mark:
            lit = self.trail.pop()
            del self.true_lits[lit]
            r = self.reason.pop(lit)
            if r is not None:
                left = self.reason_refs[r] - 1
                if left:
                    self.reason_refs[r] = left
                else:
                    del self.reason_refs[r]

    def at_check(self, clause):
        """Does propagating the negated clause literals yield a conflict?"""
        if self.root_conflict:
            return True, (list(self.root_used) if self.record else None)
        conflict, used = self._propagate([(-l, None) for l in clause.literals])
        self._undo_to(self.root_len)
        return conflict, used

    def rat_check(self, clause, pivot):
        """Check every resolvent with alive clauses containing -pivot.

        Callers run the plain at_check fast path first. Returns
        (ok, used, neighbors).
        """
        neighbors = tuple(self.occ.get(-pivot, ()))
        used_all = {} if self.record else None
        for other in neighbors:
            assumptions = {}
            for l in clause.literals:
                assumptions[-l] = None
            for m in other.literals:
                if m != -pivot:
                    assumptions[-m] = None
            conflict, used = self._propagate([(a, None) for a in assumptions])
            self._undo_to(self.root_len)
            if not conflict:
                return False, None, ()
            if self.record:
                for u in used:
                    used_all[u] = None
        return True, (list(used_all) if self.record else None), neighbors

    def add(self, clause):
        count = self.mult.get(clause, 0)
        self.mult[clause] = count + 1
        if count:
            return
        self._index(clause)
        if self.root_conflict:
            return
        if len(clause) == 0:
            self.root_conflict = True
            self.root_used = (clause,)
            return
        unassigned = None
        extra = False
        for m in clause.literals:
            if m in self.true_lits:
                return  # satisfied at root, nothing propagates
            if -m in self.true_lits:
                continue
            if unassigned is None:
                unassigned = m
            else:
                extra = True
                break
        if extra:
            return
        if unassigned is None:
            self.root_conflict = True
            if self.record:
                self.root_used = tuple(self._explain(clause, clause.literals))
            return
        conflict, used = self._propagate([(unassigned, clause)])
        if conflict:
            self.root_conflict = True
            self.root_used = tuple(used or ())
        self.root_len = len(self.trail)

    def remove(self, clause):
        """Drop one instance; returns False when no instance is present."""
        count = self.mult.get(clause, 0)
        if count == 0:
            return False
        if count > 1:
            self.mult[clause] = count - 1
            return True
        del self.mult[clause]
        self._unindex(clause)
        # only these removals can invalidate the root closure
        if self.root_conflict or len(clause) <= 1 or clause in self.reason_refs:
            self._rebuild_closure()
        return True


def has_at(formula: Formula, clause: Clause) -> bool:
    """Is the clause an asymmetric tautology with respect to the formula?"""
    ok, _ = _ClauseDb(formula).at_check(clause)
    return ok


def has_rat(formula: Formula, clause: Clause, pivot: int) -> bool:
    """Is the clause a resolution asymmetric tautology on the given pivot?"""
    if pivot not in clause:
        raise PivotNotInClauseError("pivot %d not in %r" % (pivot, clause))
    db = _ClauseDb(formula)
    ok, _ = db.at_check(clause)
    if ok:
        return True
    ok, _, _ = db.rat_check(clause, pivot)
    return ok


def is_preserving(refutation: Refutation) -> bool:
    """No clause is deleted more often than it is added, over the whole proof."""
    added = Counter()
    deleted = Counter()
    for step in refutation:
        if step.is_add:
            added[step.clause] += 1
        else:
            deleted[step.clause] += 1
    return all(deleted[c] <= added[c] for c in deleted)


def _replay(formula, refutation, mode, record):
    if mode not in (STRICT, PERMISSIVE):
        raise ValueError("mode must be %r or %r" % (STRICT, PERMISSIVE))
    start = time.perf_counter()
    db = _ClauseDb(formula, record=record)
    annotations = [] if record else None

    def report(valid, step=None, reason=None, checked=0):
        return CheckReport(
            valid,
            failing_step=step,
            reason=reason,
            steps_checked=checked,
            propagations=db.propagations,
            wall_time=time.perf_counter() - start,
        )

    total = len(refutation)
    for i, step in enumerate(refutation, 1):
        clause = step.clause
        if step.is_add:
            ok, used = db.at_check(clause)
            kind = KIND_AT
            neighbors = ()
            if not ok and len(clause) > 0:
                kind = KIND_RAT
                ok, used, neighbors = db.rat_check(clause, clause.pivot)
            if record:
                annotations.append(
                    StepVerdict(i, ADD, clause, kind, True, tuple(used or ()), neighbors)
                )
            if not ok:
                rep = report(False, i, NOT_AT if len(clause) == 0 else NOT_RAT, i)
                return rep, annotations
            if len(clause) == 0:
                if i < total:
                    log.warning("empty clause at step %d; ignoring %d trailing steps", i, total - i)
                return report(True, checked=i), annotations
            db.add(clause)
        else:
            applied = db.remove(clause)
            if record:
                annotations.append(StepVerdict(i, DELETE, clause, KIND_DELETE, applied, (), ()))
            if not applied:
                if mode == STRICT:
                    return report(False, i, DELETION_ABSENT, i), annotations
                log.warning("step %d: deletion of absent clause %r skipped", i, clause)
    return report(False, None, MISSING_EMPTY_CLAUSE, total), annotations


def check_refutation(formula: Formula, refutation: Refutation, mode: str = PERMISSIVE) -> CheckReport:
    """Replay a proof against the formula and judge it.

    Every addition must be an asymmetric tautology or, failing that, a
    resolution asymmetric tautology on its first literal. The proof is
    valid once an empty clause passes; anything after it is ignored.
    Deleting an absent clause fails in strict mode and is skipped with a
    warning in permissive mode.
    """
    rep, _ = _replay(formula, refutation, mode, record=False)
    return rep


def annotate_refutation(formula: Formula, refutation: Refutation, mode: str = PERMISSIVE):
    """Like check_refutation, but also return per-step replay annotations."""
    rep, annotations = _replay(formula, refutation, mode, record=True)
    return rep, tuple(annotations)
