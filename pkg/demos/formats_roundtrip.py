"""
Reading and writing the two file formats
========================================

DIMACS CNF on the input side, DRAT proofs on the output side, plus the
cube naming scheme that ties a proof file back to its sub-problem.
"""

from dratstitch import Cube, cube_from_filename, parse_dimacs, parse_drat, write_dimacs, write_drat

# A CNF file is a header plus one zero-terminated clause per line.
# Comments and blank lines are allowed anywhere.
text = """\
c the four binary clauses over x1, x2
p cnf 2 4
1 2 0
1 -2 0
-1 2 0
-1 -2 0
"""

doc = parse_dimacs(text.encode())
print("declared vars:", doc.declared_vars)
print("clauses:", len(doc.formula))
for clause in doc.formula:
    print(" ", clause)

# write_dimacs regenerates a header from the clauses themselves
print(write_dimacs(doc.formula))

# A DRAT proof is the same clause syntax, with "d" marking deletions.
# The literal order inside each line is kept verbatim: the first
# literal of an addition is its pivot.
proof = parse_drat(b"1 0\nd 1 2 0\n0\n")
for step in proof:
    tag = "add" if step.is_add else "delete"
    print(tag, step.clause)

# Serialization is stable: parse(write(p)) gives the same steps back.
assert parse_drat(write_drat(proof).encode()) == proof

# Sub-problem proofs are named after their cube, one literal per
# underscore-separated field.
cube = Cube((1, -2, 3))
print("cube file:", cube.filename())
assert cube_from_filename(cube.filename()) == cube
