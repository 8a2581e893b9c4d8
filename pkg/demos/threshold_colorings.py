"""3-colorings of rotation graphs of threshold graphs, lifted step by step from R(P_3).

    python3 demos/threshold_colorings.py [max_n]
"""

from __future__ import annotations

import sys

from rotgraph.coloring import ColoringError, chromatic_number_exact, threshold_coloring, threshold_words
from rotgraph.graphs import threshold
from rotgraph.rotation import build_rotation_graph

max_n = int(sys.argv[1]) if len(sys.argv) > 1 else 5
for word in threshold_words(max_n):
    G = threshold(word)
    chi = chromatic_number_exact(build_rotation_graph(G, edge_labels=False)).value
    try:
        lc = threshold_coloring(word)
        how = f"lifted via {' '.join(s.kind for s in lc.steps) or 'nothing'}: proper={all(r.passed for r in lc.reports)}"
    except ColoringError:
        how = "not reachable from P_3 by pendant/twin-of-universal steps"
    print(f"{word:>6}  n={G.n}  |R|={len(build_rotation_graph(G, edge_labels=False)):>5}  chi={chi}  {how}")
