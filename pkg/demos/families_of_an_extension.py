"""Adding a true twin v' of v splits R(G_v) into one path per tree of R(G).

    python3 demos/families_of_an_extension.py
"""

from __future__ import annotations

from rotgraph.graphs import path
from rotgraph.rotation import build_rotation_graph
from rotgraph.structure import all_families, make_extension, verify_families
from rotgraph.trees import tree_str

G = path(3)
ext = make_extension("true_twin", G, 1)
small, big = build_rotation_graph(G), build_rotation_graph(ext.big)
print(f"{ext.describe()}: |R(G)| = {len(small)}, |R(G_v)| = {len(big)}")

for T, fam in zip(small.trees(), all_families(ext, small)):
    print(f"  {tree_str(T, G):>10}  ->  " + " , ".join(tree_str(S, ext.big) for S in fam))

for rep in verify_families(ext, small, big, "P_3"):
    print(rep, {k: v for k, v in rep.details.items() if k in ("families", "inter_edges", "inter_edges_by_case")})
