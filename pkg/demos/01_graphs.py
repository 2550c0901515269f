"""Tour of the built-in graphs: vertices, arrows, spectral constants.

Each graph carries a distinguished orientation (sigma arrows); the
Perron-Frobenius eigenvector, normalized so its smallest entry is 1,
assigns every vertex its quantum dimension.
"""

from su3paths import get_graph, graph_names, q_number, spectral_data

for name in graph_names():
    g = get_graph(name)
    sd = spectral_data(g)
    print(f"{name}: kappa={g.kappa} level={g.level} "
          f"{len(g.vertex_ids())} vertices, {len(g.sigma_edges)} arrows")
    print(f"  beta  = {sd.beta:.12f}")
    print(f"  [2]   = {sd.delta:.12f}  (loop parameter)")
    mu = ", ".join(f"{v}={sd.mu[v]:.6f}" for v in g.vertex_ids())
    print(f"  mu    : {mu}")

print()
g = get_graph("a2")
print("a2 arrows:", "  ".join(f"{a}->{b}" for a, b in g.sigma_edges))
print("a2 q-numbers [1..4]:", [round(q_number(n, g.kappa), 6) for n in range(1, 5)])
