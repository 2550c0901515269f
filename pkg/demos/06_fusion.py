"""Fusion products and module actions from the adjacency recursion.

On a graph whose vertices are the level-k weights the recursion gives
the full truncated multiplication table; on the exceptional module
graph the same matrices predict where essential paths live instead.
"""

import numpy as np

from su3paths import admissible_triangles, fusion_matrix, fusion_table, get_graph

a2 = get_graph("a2")
table = fusion_table(a2)
ids = a2.vertex_ids()

width = max(len(v) for v in ids) + 1
print("a2 multiplication table:")
header = " ".join(f"{v:>6s}" for v in ids)
print(f"{'':>4s} {header}")
for x in ids:
    row = []
    for y in ids:
        prod = "+".join(z if m == 1 else f"{m}{z}" for z, m in table[(x, y)].items())
        row.append(f"{prod:>6s}")
    print(f"{x:>4s} " + " ".join(row))

e5 = get_graph("e5")
f11 = fusion_matrix(e5, (1, 1))
print("\ne5 module action of type (1,1) (row sums):")
sums = f11.matrix.sum(axis=1)
for v, s in zip(e5.vertex_ids(), sums):
    print(f"  {v}: {int(s)}")
print("nonzero admissible triangles of type (2,0):",
      len(admissible_triangles(e5, (2, 0))))
print("F_(0,2) is the transpose of F_(2,0):",
      np.array_equal(fusion_matrix(e5, (0, 2)).matrix,
                     fusion_matrix(e5, (2, 0)).matrix.T))
