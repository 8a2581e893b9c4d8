"""R(K_n) is the permutohedron and 2-colorable; any induced P_3 forces a 5-cycle.

    python3 demos/permutohedron_and_pentagon.py
"""

from __future__ import annotations

from rotgraph.coloring import chromatic_number_exact, five_cycle_witness, is_proper, sign_coloring
from rotgraph.graphs import complete, path
from rotgraph.rotation import build_rotation_graph

for n in range(2, 6):
    RG = build_rotation_graph(complete(n))
    c = sign_coloring(RG)
    print(f"R(K_{n}): {len(RG)} trees, {RG.n_edges} edges, sign coloring proper: {is_proper(RG, c)}")

RG = build_rotation_graph(path(3))
print("\nR(P_3) trees:", [RG.label(i) for i in range(len(RG))])
cycle = five_cycle_witness(RG)
print("5-cycle:", " - ".join(RG.label(i) for i in cycle))
print("chi(R(P_3)) =", chromatic_number_exact(RG).value)
