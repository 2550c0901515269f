"""The four path-space operators on a small graded block.

Annihilation contracts a like-tag pair through a triangle; creation is
its adjoint.  Cup closes a mixed-tag return; cap is its adjoint.  The
demo prints the matrices on the 2-dimensional space of double-sigma
paths 3 -> 8 and checks the loop identities numerically.
"""

import numpy as np

from su3paths import (
    PathGrading,
    annihilation,
    creation,
    cup,
    cap_oriented,
    EdgeTag,
    enumerate_paths,
    get_graph,
    parse_word,
    shipped_cells,
    spectral_data,
    tl_u,
)

g = get_graph("a2")
cells = shipped_cells(g)
sd = spectral_data(g)

grading = PathGrading("3", "8", parse_word("ss"))
print("basis of", grading, "->", [str(p) for p in enumerate_paths(g, grading)])

ann = annihilation(g, cells, grading, 1)
cre = creation(g, cells, ann.codomain, 1)
print("\nannihilation C_1 ->", ann.codomain)
print(np.round(ann.matrix.real, 6))
print("creation is the conjugate transpose:",
      np.allclose(cre.matrix, ann.matrix.conj().T))

u = tl_u(g, cells, grading, 1)
print("\nU_1 = C+_1 C_1:")
print(np.round(u.matrix.real, 6))
print("U^2 = [2] U:", np.allclose(u.matrix @ u.matrix, sd.delta * u.matrix))

g0 = PathGrading("3", "3", ())
cap_op = cap_oriented(g, cells, g0, 1, EdgeTag.SIGMA)
cup_op = cup(g, cells, cap_op.codomain, 1)
loop = (cup_op.matrix @ cap_op.matrix)[0, 0]
print(f"\ncup . cap on the empty path at 3: {loop.real:.12f}  (beta = {sd.beta:.12f})")
