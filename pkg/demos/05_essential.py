"""Essential paths: joint kernels of the lowering operators, counted
against the module-action matrices.

An essential path is a combination annihilated by every contraction
and cup; per word class, the essential dimensions between each vertex
pair must reproduce the integer matrix F_(a,b).  The demo prints the
counts and then one explicit kernel vector per flavor.
"""

from su3paths import (
    PathGrading,
    enumerate_paths,
    essential_basis,
    essential_dims,
    get_graph,
    parse_word,
    shipped_cells,
)


def show_vector(g, cells, start, end, word):
    grading = PathGrading(start, end, parse_word(word))
    eb = essential_basis(g, cells, grading)
    basis = enumerate_paths(g, grading)
    print(f"  {grading}: dim {eb.dim}")
    for v in eb.vectors:
        terms = " ".join(
            f"{c.real:+.6f} {basis[k]}" for c, k in v.support()
        )
        print(f"    {terms}")


for name in ("a2", "e5"):
    g = get_graph(name)
    cells = shipped_cells(g)
    print(f"{name}: essential dimensions per type (summed over vertex pairs)")
    for tp in [(0, 0), (1, 0), (0, 1), (2, 0), (0, 2), (1, 1)]:
        if tp[0] + tp[1] > g.level:
            continue
        rep = essential_dims(g, cells, tp)
        status = "matches" if rep.matches_fusion else "MISMATCH"
        print(f"  type {tp}: total {int(rep.total.sum()):4d}  [{status}]")
    print()

a2 = get_graph("a2")
cells = shipped_cells(a2)
print("a2 kernel vectors:")
show_vector(a2, cells, "3", "8", "ss")
show_vector(a2, cells, "3", "3", "bs")
show_vector(a2, cells, "3", "3", "sb")

e5 = get_graph("e5")
print("\ne5 kernel vector with the two-triangle interference:")
show_vector(e5, shipped_cells(e5), "2_0", "2_0", "bs")
