"""Deleting the edges among true twins W contracts the W-special edges of R(G).

    python3 demos/twin_quotient.py
"""

from __future__ import annotations

from rotgraph.graphs import complete, complete_split, delete_twin_edges
from rotgraph.metrics import quotient_distance_check
from rotgraph.rotation import build_rotation_graph
from rotgraph.structure import build_quotient

for name, G, W in [("K_4", complete(4), (2, 3)), ("SPK_{2,3}", complete_split(2, 3), (0, 1)), ("SPK_{3,3}", complete_split(3, 3), (0, 1, 2))]:
    H = delete_twin_edges(G, W)
    Q = build_quotient(build_rotation_graph(G), W, build_rotation_graph(H), name)
    print(f"{name} -> G-S: {len(Q.source)} -> {len(Q.target)} trees, {len(Q.special_edges)} special edges")
    print("  fiber sizes (size: count):", dict(sorted(Q.fiber_sizes().items())))
    print(" ", Q.report)
    if len(W) == 2:
        rep = quotient_distance_check(Q, instance=name)
        print(f"  distance dichotomy over {rep.details['pairs']} pairs: drop by one {rep.details['drop']}, equal {rep.details['equal']}:", rep.passed)
