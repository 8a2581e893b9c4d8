"""diam R(K_{2,q}) and diam R(SPK_{2,q}) by orbit-reduced BFS, with the twin-deletion bound.

    python3 demos/bipartite_diameters.py [max_q]     (max_q = 8 takes a few minutes)
"""

from __future__ import annotations

import sys

from rotgraph.graphs import complete_bipartite, complete_split
from rotgraph.metrics import diameter, kpq_lower_bound, orbit_reduce, spk_diameter_formula, twin_class_generators
from rotgraph.rotation import build_rotation_graph


def diam(G):
    RG = build_rotation_graph(G, edge_labels=False, cross_check=False)
    orb = orbit_reduce(G, RG, twin_class_generators(G))
    res = diameter(RG, orb)
    return len(RG), orb.count, res


max_q = int(sys.argv[1]) if len(sys.argv) > 1 else 6
print(" q   |R(K2q)|  orbits  diam  lower | diam SPK  formula  bound")
for q in range(2, max_q + 1):
    N, k, r = diam(complete_bipartite(2, q))
    _, _, s = diam(complete_split(2, q))
    bound = "tight" if s.value - 1 == r.value else "slack"
    print(f"{q:2d} {N:10d} {k:7d} {r.value:5d} {kpq_lower_bound(2, q):6d} | {s.value:8d} {spk_diameter_formula(2, q):8d}  {bound}")
