"""
From per-cube proofs to one refutation
======================================

Split an unsatisfiable instance into cubes, refute each cube on its
own, then merge the pieces back into a single checkable proof.
"""

from dratstitch import (
    STRICT,
    BundleEntry,
    Clause,
    ProofBundle,
    build_cube_tree,
    check_refutation,
    combine_all,
    gen_random_unsat,
    is_preserving,
    solve_drup,
    split,
    write_drat,
)

formula = gen_random_unsat(12, 5.0, seed=7)
print("instance: %d clauses over %d vars" % (len(formula), len(formula.variables())))

# Depth 2 picks the two most frequent variables and enumerates all four
# sign combinations.
cubes = split(formula, 2)
print("cubes:", [tuple(c) for c in cubes])

# Each cube plus the instance is a smaller problem. The bundled solver
# emits an addition-only proof for every one of them.
entries = []
for i, cube in enumerate(cubes):
    sub = formula
    for lit in cube:
        sub = sub.add(Clause((lit,)))
    outcome = solve_drup(sub, seed=i)
    assert not outcome.sat
    print("  %s: %d steps" % (cube.filename(), len(outcome.refutation)))
    entries.append(BundleEntry(cube, outcome.refutation, cube.filename()))

# The merge walks the cube tree bottom-up. Each join appends the
# negated decision literal to one side, the literal itself to the
# other, and closes with the empty clause.
bundle = ProofBundle(formula, tuple(entries))
tree = build_cube_tree(bundle)
records = []
combined = combine_all(formula, tree, on_record=records.append)
for r in records:
    print("join at depth %d on var %d: %d steps" % (r.depth, r.var, r.steps_after))

print("combined: %d steps" % len(combined))
print(write_drat(combined), end="")

# The result stands on its own: strict validation against the original
# instance, no sub-problem trust required.
report = check_refutation(formula, combined, mode=STRICT)
print("valid:", report.valid)
print("preserving:", is_preserving(combined))
