"""Shared oracles and generators for the test suite.

Everything here is deliberately naive. Truth tables enumerate every
assignment, and the propagation oracle rewrites clause multisets one
unit step at a time, picking the next step at random. The point is to
have slow, obviously-correct references that the fast library code can
be compared against.
"""

import itertools
from collections import Counter

from dratstitch import (
    BundleEntry,
    Clause,
    Formula,
    ProofBundle,
    build_cube_tree,
    combine_all,
    gen_random_unsat,
    solve_drup,
    split,
)


def all_assignments(variables):
    """Yield every total assignment over the given variables as a dict."""
    ordered = sorted(variables)
    for bits in itertools.product((False, True), repeat=len(ordered)):
        yield dict(zip(ordered, bits))


def literal_true(lit, assignment):
    value = assignment[abs(lit)]
    return value if lit > 0 else not value


def satisfies(assignment, formula):
    return all(
        any(literal_true(lit, assignment) for lit in clause.literals)
        for clause in formula.distinct()
    )


def truth_table_unsat(formula):
    """Brute-force unsatisfiability over the formula's own variables."""
    return not any(
        satisfies(assignment, formula)
        for assignment in all_assignments(formula.variables())
    )


def truth_table_entails(formula, clause):
    """Whether every model of the formula satisfies the clause."""
    variables = set(formula.variables()) | {abs(lit) for lit in clause.literals}
    for assignment in all_assignments(variables):
        if satisfies(assignment, formula) and not any(
            literal_true(lit, assignment) for lit in clause.literals
        ):
            return False
    return True


def clause_counts(formula):
    """The formula as a Counter of frozensets, the shape the oracle rewrites."""
    return Counter({frozenset(c.literals): n for c, n in formula.counts()})


def _oracle_step(counts, lit):
    # Drop clauses containing lit, strip -lit from the rest, add the unit.
    after = Counter()
    for clause, n in counts.items():
        if lit in clause:
            continue
        after[clause - {-lit}] += n
    after[frozenset((lit,))] += 1
    return after


def _enabled_literals(counts):
    # lit is enabled when some clause holds it alongside literals whose
    # negations are all present as unit clauses.
    found = set()
    for clause in counts:
        for lit in clause:
            if all(frozenset((-m,)) in counts for m in clause if m != lit):
                found.add(lit)
    return found


def oracle_fixpoint(counts, rng=None):
    """Apply unit steps until none changes the multiset.

    Returns (conflict, final_counts). With an rng the next step is picked
    at random, so repeated runs exercise confluence instead of assuming it.
    Each productive step strictly shrinks the total literal count, which
    bounds the loop.
    """
    counts = Counter(counts)
    while True:
        if frozenset() in counts:
            return True, counts
        productive = []
        for lit in sorted(_enabled_literals(counts)):
            after = _oracle_step(counts, lit)
            if after != counts:
                productive.append(after)
        if not productive:
            return False, counts
        pick = 0 if rng is None else rng.randrange(len(productive))
        counts = productive[pick]


def random_clause(rng, num_vars, width):
    chosen = rng.sample(range(1, num_vars + 1), min(width, num_vars))
    return Clause(v if rng.random() < 0.5 else -v for v in chosen)


def random_formula(rng, num_vars, num_clauses, max_width=3):
    clauses = []
    for _ in range(num_clauses):
        width = rng.randint(1, max_width)
        clauses.append(random_clause(rng, num_vars, width))
    return Formula(clauses)


def bundle_for(formula, depth, seed=0):
    """Split the formula and refute every cube with the bundled solver."""
    entries = []
    for cube in split(formula, depth):
        sub = formula
        for lit in cube.literals:
            sub = sub.add(Clause((lit,)))
        outcome = solve_drup(sub, seed=seed)
        assert not outcome.sat, "cube %r left a satisfiable sub-problem" % (cube,)
        entries.append(BundleEntry(cube, outcome.refutation, cube.filename()))
    return ProofBundle(formula, tuple(entries))


def stitched_instance(seed, num_vars=10, depth=2, cl_avg=-1, ratio=5.0):
    """Generate an unsat instance, refute its cubes, and combine them."""
    formula = gen_random_unsat(num_vars, ratio, seed=seed)
    bundle = bundle_for(formula, depth, seed=seed)
    tree = build_cube_tree(bundle)
    return formula, combine_all(formula, tree, cl_avg=cl_avg)
