"""
How the proof checker decides a step is allowed
===============================================

Unit propagation, asymmetric tautologies, and the resolution-based
fallback that makes blocked clauses admissible.
"""

from dratstitch import (
    STRICT,
    Clause,
    Formula,
    check_refutation,
    has_at,
    has_rat,
    parse_drat,
    propagate_fixpoint,
)

# Propagation rewrites the formula one forced literal at a time: the
# clause {1} forces 1, which shortens {-1, 2} to {2}, and so on.
chain = Formula((Clause((1,)), Clause((-1, 2)), Clause((-2, 3))))
outcome = propagate_fixpoint(chain)
print("conflict:", outcome.conflict)
print("fixpoint:", sorted(str(c) for c in outcome.formula))

# Adding the negation of a forced literal exposes a conflict instead.
blocked_off = chain.add(Clause((-3,)))
print("with -3:", propagate_fixpoint(blocked_off).conflict)

# A clause has AT when assuming all its literals false propagates to a
# conflict. That is exactly the propagation above.
print("has_at {3}:", has_at(chain, Clause((3,))))
print("has_at {2,3}:", has_at(chain, Clause((2, 3))))

# AT is sound but not complete. These four clauses entail the empty
# clause, yet no unit ever appears, so propagation finds nothing.
square = Formula((Clause((2, 3)), Clause((2, -3)), Clause((-2, 3)), Clause((-2, -3))))
print("square has_at {}:", has_at(square, Clause(())))

# RAT fills part of that gap: a clause is RAT on its first literal when
# every resolvent on that literal has AT. Blocked clauses qualify
# because their resolvents are tautologies.
f = Formula((Clause((-1, -2)), Clause((-2, 5))))
c = Clause((1, 2))
print("RAT on pivot 1:", has_rat(f, c, 1))
print("RAT on pivot 2:", has_rat(f, c, 2))

# A refutation is a sequence of such steps ending in the empty clause.
# The report localizes the first step that fails.
formula = Formula((Clause((1, 2)), Clause((1, -2)), Clause((-1, 2)), Clause((-1, -2))))
good = parse_drat(b"1 0\n0\n")
bad = parse_drat(b"0\n")
print("good:", check_refutation(formula, good, mode=STRICT).valid)
report = check_refutation(formula, bad, mode=STRICT)
print("bad: valid=%s step=%s reason=%s" % (report.valid, report.failing_step, report.reason))
