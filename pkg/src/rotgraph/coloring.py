"""Colorings of rotation graphs: parity, lifts along graph operations, exact χ."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .graphs import Graph, GraphError, _bits, add_simplicial, add_true_twin, threshold, universal_vertices
from .reports import Report
from .rotation import RotationGraph, build_rotation_graph
from .structure import (
    FALSE_TWIN,
    SIMPLICIAL,
    TRUE_TWIN,
    FamilyIndex,
    build_family_index,
    simplicial_extension,
    true_twin_extension,
)
from .trees import tree_from_order

log = logging.getLogger(__name__)


class ColoringError(ValueError):
    """Hypotheses of a coloring construction are not met."""


@dataclass
class Coloring:
    k: int
    assign: np.ndarray

    def __post_init__(self) -> None:
        self.assign = np.asarray(self.assign, dtype=np.int64)
        if self.assign.size and (self.assign.min() < 0 or self.assign.max() >= self.k):
            raise ColoringError(f"colors must lie in 0..{self.k - 1}")

    @property
    def used(self) -> int:
        return int(np.unique(self.assign).size)

    def permuted(self, perm) -> Coloring:
        return Coloring(self.k, np.asarray(perm, dtype=np.int64)[self.assign])

    def to_json(self) -> dict:
        return {"k": self.k, "colors": self.assign.tolist()}


def is_proper(RG: RotationGraph, c: Coloring) -> bool:
    edges = RG.edge_array()
    return bool(np.all(c.assign[edges[:, 0]] != c.assign[edges[:, 1]]))


def properness_report(RG: RotationGraph, c: Coloring, instance: str = "") -> Report:
    rep = Report("proper_coloring", instance)
    if c.assign.size != len(RG):
        rep.fail({"size_mismatch": [int(c.assign.size), len(RG)]})
        return rep
    edges = RG.edge_array()
    bad = edges[c.assign[edges[:, 0]] == c.assign[edges[:, 1]]]
    for a, b in bad[:5].tolist():
        rep.fail({"monochromatic_edge": [a, b], "color": int(c.assign[a])})
    rep.details.update({"k": c.k, "colors_used": c.used, "edges_scanned": int(edges.shape[0])})
    return rep


# permutohedra --------------------------------------------------------------------


def permutation_sign(seq) -> int:
    seq = list(seq)
    sign, seen = 1, [False] * len(seq)
    pos = {v: i for i, v in enumerate(sorted(seq))}
    perm = [pos[v] for v in seq]
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def sign_coloring(RG: RotationGraph) -> Coloring:
    """Color 0 for even elimination orders, 1 for odd ones."""
    if not RG.graph.is_complete():
        raise ColoringError("sign coloring needs a complete base graph")
    colors = [0 if permutation_sign(RG.tree(i).path_order()) == 1 else 1 for i in range(len(RG))]
    return Coloring(2, colors)


def five_cycle_witness(RG: RotationGraph) -> list[int] | None:
    """Five trees forming a 5-cycle via the induced path ``a-b-c``, or ``None`` for complete graphs."""
    G = RG.graph
    for b in range(G.n):
        for a, c in combinations(G.neighbors(b), 2):
            if G.has_edge(a, c):
                continue
            rest = [v for v in range(G.n) if v not in (a, b, c)]
            orders = [(a, b, c), (a, c, b), (c, a, b), (c, b, a), (b, c, a)]
            cyc = [RG.ordinal(tree_from_order(G, rest + list(o))) for o in orders]
            if len(set(cyc)) != 5 or not all(RG.has_edge(cyc[i], cyc[(i + 1) % 5]) for i in range(5)):
                raise AssertionError(f"recipe failed on path {a}-{b}-{c}")
            return cyc
    return None


def find_five_cycle(RG: RotationGraph, limit: int = 200_000) -> list[int] | None:
    """Exhaustive search for a 5-cycle (small graphs)."""
    if len(RG) > limit:
        raise ValueError("graph too large for the exhaustive 5-cycle scan")
    nbr = [set(RG.neighbors(i).tolist()) for i in range(len(RG))]
    for s in range(len(RG)):
        ns = sorted(x for x in nbr[s] if x > s)
        for a, d in combinations(ns, 2):
            for b in nbr[a]:
                if b <= s or b == d:
                    continue
                for c in nbr[d]:
                    if c <= s or c == a or c == b:
                        continue
                    if c in nbr[b]:
                        return [s, a, b, c, d]
    return None


def is_bipartite(RG: RotationGraph) -> bool:
    side = np.full(len(RG), -1, dtype=np.int8)
    for s in range(len(RG)):
        if side[s] >= 0:
            continue
        side[s] = 0
        stack = [s]
        while stack:
            x = stack.pop()
            for y in RG.neighbors(x).tolist():
                if side[y] < 0:
                    side[y] = 1 - side[x]
                    stack.append(y)
                elif side[y] == side[x]:
                    return False
    return True


# lifts ---------------------------------------------------------------------------


def _check_lift_input(fi: FamilyIndex, c: Coloring, kind: str) -> None:
    if fi.ext.kind != kind:
        raise ColoringError(f"family index is for {fi.ext.kind}, not {kind}")
    if c.assign.size != len(fi.small):
        raise ColoringError("coloring does not match the base rotation graph")
    if fi.ext.base.is_complete():
        raise ColoringError("base graph must not be complete")
    if c.k < 3:
        raise ColoringError("lifts need at least 3 colors")


def lift_coloring_simplicial(c: Coloring, fi: FamilyIndex) -> Coloring:
    """``T(i) -> c(T) + (i odd)``, tip ``T(λ+1) -> c(T) + 2``, all mod ``k``."""
    _check_lift_input(fi, c, SIMPLICIAL)
    G = fi.ext.base
    if any(G.closed_mask(a) != G.full_mask for a in fi.ext.anchor):
        raise ColoringError("every vertex of K must be universal")
    k = c.k
    out = np.full(len(fi.big), -1, dtype=np.int64)
    for t, members in enumerate(fi.members):
        ct = int(c.assign[t])
        last = len(members) - 1
        for i, b in enumerate(members):
            out[b] = (ct + 2) % k if i == last else (ct + (i % 2)) % k
    return Coloring(k, out)


def _twin_color(ct: int, i: int, j: int, k: int) -> int:
    odd = i % 2
    shift = odd if j == 1 else 1 - odd
    return (ct + shift) % k


def lift_coloring_true_twin(c: Coloring, fi: FamilyIndex) -> Coloring:
    """``T(i,j)``: ``c(T)`` when ``i`` is even for ``j=1`` (odd for ``j=2``), else ``c(T)+1``, mod ``c.k``."""
    _check_lift_input(fi, c, TRUE_TWIN)
    G = fi.ext.base
    if G.closed_mask(fi.ext.v) != G.full_mask:
        raise ColoringError("v must be universal")
    out = np.full(len(fi.big), -1, dtype=np.int64)
    for t, members in enumerate(fi.members):
        ct = int(c.assign[t])
        for b, (i, j) in zip(members, fi.tags[t]):
            out[b] = _twin_color(ct, i, j, c.k)
    return Coloring(c.k, out)


def false_twin_sides(G: Graph, v: int) -> tuple[list[int], list[int]]:
    """``(V1, V2)`` with ``V2 = N(v)``, ``V1`` the rest; raises unless ``N(u) = V2`` on ``V1``."""
    v2 = G.adj[v]
    v1 = G.full_mask & ~v2
    for u in _bits(v1):
        if G.adj[u] != v2:
            raise ColoringError(f"vertex {u} outside N(v) has a different neighbourhood")
    return _bits(v1), _bits(v2)


def lift_coloring_false_twin(c: Coloring, fi: FamilyIndex) -> Coloring:
    """True-twin formula on ``T(i,j)`` with ``T_∧ -> c(T) + 2`` mod ``k``."""
    _check_lift_input(fi, c, FALSE_TWIN)
    false_twin_sides(fi.ext.base, fi.ext.v)
    k = c.k
    out = np.full(len(fi.big), -1, dtype=np.int64)
    for t, members in enumerate(fi.members):
        ct = int(c.assign[t])
        for b, (i, j) in zip(members, fi.tags[t]):
            out[b] = (ct + 2) % k if j == 0 else _twin_color(ct, i, j, k)
    return Coloring(k, out)


LIFTS = {
    SIMPLICIAL: lift_coloring_simplicial,
    TRUE_TWIN: lift_coloring_true_twin,
    FALSE_TWIN: lift_coloring_false_twin,
}


# exact chromatic number ---------------------------------------------------------------


@dataclass
class ChromaticResult:
    value: int | None
    lower: int
    upper: int
    exact: bool
    coloring: Coloring
    nodes: int = 0

    def to_json(self) -> dict:
        return {"value": self.value, "lower": self.lower, "upper": self.upper, "exact": self.exact, "nodes": self.nodes}


def _adjacency(graph) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(graph, RotationGraph):
        return graph.indptr, graph.indices
    indptr, indices = graph
    return np.asarray(indptr), np.asarray(indices)


def dsatur(indptr: np.ndarray, indices: np.ndarray) -> tuple[list[int], list[int]]:
    """Greedy DSATUR coloring; returns ``(colors, order)``."""
    import heapq

    N = len(indptr) - 1
    nbrs = [indices[indptr[i] : indptr[i + 1]].tolist() for i in range(N)]
    color = [-1] * N
    seen = [0] * N  # bitmask of neighbour colours
    sat = [0] * N
    heap = [(0, -len(nbrs[i]), i) for i in range(N)]
    heapq.heapify(heap)
    order = []
    while heap:
        s, _, v = heapq.heappop(heap)
        if color[v] >= 0 or -s != sat[v]:
            continue
        free = ~seen[v]
        col = (free & -free).bit_length() - 1
        color[v] = col
        order.append(v)
        for u in nbrs[v]:
            if color[u] < 0 and not seen[u] >> col & 1:
                seen[u] |= 1 << col
                sat[u] += 1
                heapq.heappush(heap, (-sat[u], -len(nbrs[u]), u))
    return color, order


def _has_odd_cycle(indptr, indices) -> bool:
    N = len(indptr) - 1
    side = [-1] * N
    for s in range(N):
        if side[s] >= 0:
            continue
        side[s] = 0
        stack = [s]
        while stack:
            x = stack.pop()
            for y in indices[indptr[x] : indptr[x + 1]].tolist():
                if side[y] < 0:
                    side[y] = 1 - side[x]
                    stack.append(y)
                elif side[y] == side[x]:
                    return True
    return False


def _clique_lower_bound(indptr, indices, cap: int = 4) -> int:
    """Largest clique size up to ``cap`` found by scanning edge neighbourhoods."""
    N = len(indptr) - 1
    nb = [set(indices[indptr[i] : indptr[i + 1]].tolist()) for i in range(N)]
    best = 2 if any(nb) else 1
    for v in range(N):
        for u in nb[v]:
            if u <= v:
                continue
            common = nb[v] & nb[u]
            if common:
                best = max(best, 3)
                if cap >= 4:
                    for w in common:
                        if common & nb[w]:
                            return 4
    return best


def k_color(indptr, indices, k: int, budget: int, seed: int | None = None) -> tuple[list[int] | None, int, bool]:
    """Backtracking ``k``-coloring, smallest domain first, with forward checking.

    Returns ``(colors or None, nodes, finished)``; ``finished`` is False when
    the node budget ran out before a decision.
    """
    N = len(indptr) - 1
    nbrs = [indices[indptr[i] : indptr[i + 1]].tolist() for i in range(N)]
    full = (1 << k) - 1
    pc = [bin(m).count("1") for m in range(full + 1)]
    dom = [full] * N
    color = [-1] * N
    # dicts keep insertion order: the most recently constrained vertex is tried first
    buckets: list[dict[int, None]] = [{} for _ in range(k + 1)]
    start = list(range(N))
    if seed is not None:
        np.random.default_rng(seed).shuffle(start)
    buckets[k] = dict.fromkeys(start)
    trail: list[tuple[int, int]] = []  # (u, old domain) or (~v, 0) for a colouring

    def pick() -> int:
        for size in range(1, k + 1):
            if buckets[size]:
                return next(reversed(buckets[size]))
        return -1

    def undo(mark: int) -> None:
        while len(trail) > mark:
            u, old = trail.pop()
            if u < 0:
                v = ~u
                color[v] = -1
                buckets[pc[dom[v]]][v] = None
            else:
                buckets[pc[dom[u]]].pop(u, None)
                dom[u] = old
                buckets[pc[old]][u] = None

    frames: list[tuple[int, int, int, int]] = []
    nodes, max_used = 0, -1
    v, tried = pick(), 0
    if v < 0:
        return color, 0, True
    while True:
        allowed = dom[v] & ~tried & ((1 << min(k, max_used + 2)) - 1)
        if allowed:
            col = (allowed & -allowed).bit_length() - 1
            bit = 1 << col
            tried |= bit
            nodes += 1
            if nodes > budget:
                return None, nodes, False
            mark = len(trail)
            buckets[pc[dom[v]]].pop(v, None)
            color[v] = col
            trail.append((~v, 0))
            ok = True
            for u in nbrs[v]:
                if color[u] < 0 and dom[u] & bit:
                    old = dom[u]
                    trail.append((u, old))
                    buckets[pc[old]].pop(u, None)
                    dom[u] = old & ~bit
                    buckets[pc[dom[u]]][u] = None
                    if not dom[u]:
                        ok = False
                        break
            if not ok:
                undo(mark)
                continue
            frames.append((v, tried, mark, max_used))
            max_used = max(max_used, col)
            v, tried = pick(), 0
            if v < 0:
                return color, nodes, True
            continue
        if not frames:
            return None, nodes, True
        v, tried, mark, max_used = frames.pop()
        undo(mark)


def search_k_coloring(indptr, indices, k: int, budget: int, seed: int = 0) -> tuple[list[int] | None, int, bool]:
    """Restarted :func:`k_color`: growing per-run budgets, run ``r`` shuffles with ``seed + r``.

    A single run that finishes without a coloring proves infeasibility.
    """
    nodes, run, per_run = 0, 0, 1_000
    while nodes < budget:
        allow = min(per_run, budget - nodes)
        found, used, finished = k_color(indptr, indices, k, allow, None if run == 0 else seed + run)
        nodes += used
        if found is not None or finished:
            return found, nodes, True
        run += 1
        per_run = int(per_run * 1.5)
    return None, nodes, False


def chromatic_number_exact(graph, ub: int | None = None, budget: int = 2_000_000, seed: int = 0) -> ChromaticResult:
    """χ with certificate: DSATUR upper bound, odd-cycle/clique lower bound, restarted backtracking between.

    ``ub`` is a known upper bound; a ``ub``-coloring is searched for first.
    """
    indptr, indices = _adjacency(graph)
    N = len(indptr) - 1
    if N == 0:
        return ChromaticResult(0, 0, 0, True, Coloring(1, []))
    colors, _ = dsatur(indptr, indices)
    upper = max(colors) + 1
    best = colors
    nodes = 0
    if ub is not None and ub < upper:
        found, nodes, _ = search_k_coloring(indptr, indices, ub, budget, seed)
        if found is not None:
            best, upper = found, ub
    lower = 1 if indices.size == 0 else 2
    if lower < upper and _has_odd_cycle(indptr, indices):
        lower = 3
    if lower < upper and N <= 300_000:
        lower = max(lower, _clique_lower_bound(indptr, indices))
    k = lower
    while k < upper and nodes < budget:
        found, used, finished = search_k_coloring(indptr, indices, k, budget - nodes, seed)
        nodes += used
        if found is not None:
            best, upper = found, k
            break
        if not finished:
            break
        lower = k + 1
        k += 1
    exact = lower == upper
    return ChromaticResult(upper if exact else None, lower, upper, exact, Coloring(upper, best), nodes)


# threshold constructions -------------------------------------------------------------


@dataclass
class Step:
    """Pendant at a universal vertex (``simplicial``) or twin of one (``true_twin``).

    All universal vertices of a graph are true twins of each other, so the
    choice among them does not change the result up to isomorphism; the
    smallest id is used.
    """

    kind: str


def _peel(G: Graph, memo: dict) -> list[Step] | None:
    """Steps building ``G`` from P_3; ``None`` if impossible.  Works on an unlabeled degree signature."""
    sig = (G.n, G.adj)
    if sig in memo:
        return memo[sig]
    result = None
    if G.n == 3:
        result = [] if G.edge_count == 2 else None
        memo[sig] = result
        return result
    if G.n < 3:
        memo[sig] = None
        return None
    from .graphs import induced_subgraph

    # candidate last vertices: try each vertex in the role of the newest one
    for x in range(G.n - 1, -1, -1):
        rest = [v for v in range(G.n) if v != x]
        H = induced_subgraph(G, rest)
        if H.is_complete() or not H.is_connected():
            continue
        nbrs = G.neighbors(x)
        step = None
        if len(nbrs) == 1 and G.closed_mask(nbrs[0]) == G.full_mask:
            step = Step(SIMPLICIAL)
        elif G.closed_mask(x) == G.full_mask:
            if any(G.closed_mask(u) == G.full_mask for u in nbrs):
                step = Step(TRUE_TWIN)
        if step is None:
            continue
        prefix = _peel(H.with_labels(None), memo)
        if prefix is not None:
            result = prefix + [step]
            break
    memo[sig] = result
    return result


def threshold_construction(G: Graph) -> list[Step]:
    """Pendant-at-universal / twin-of-universal steps from P_3 (ids ``0-1-2``, centre 1)."""
    G = G.with_labels(None)
    steps = _peel(G, {})
    if steps is None:
        raise ColoringError("graph is not reachable from P_3 by pendant-at-universal and twin-of-universal steps")
    return steps


@dataclass
class LiftedColoring:
    graph: Graph
    rotation_graph: RotationGraph
    coloring: Coloring
    steps: list[Step]
    reports: list[Report]


def build_by_steps(steps: list[Step]) -> list[Graph]:
    base = Graph.from_edges(3, [(0, 1), (1, 2)])
    out = [base]
    for st in steps:
        G = out[-1]
        u = universal_vertices(G)[0]
        out.append(add_simplicial(G, [u]) if st.kind == SIMPLICIAL else add_true_twin(G, u))
    return out


def lift_along(steps: list[Step], cap: int = 2_000_000) -> LiftedColoring:
    """3-color R(P_3) and lift through each step, checking properness after every lift."""
    graphs = build_by_steps(steps)
    RG = build_rotation_graph(graphs[0], cross_check=False)
    res = chromatic_number_exact(RG)
    c = res.coloring
    reports = [properness_report(RG, c, "P3")]
    for st in steps:
        G = RG.graph
        u = universal_vertices(G)[0]
        ext = simplicial_extension(G, [u]) if st.kind == SIMPLICIAL else true_twin_extension(G, u)
        big = build_rotation_graph(ext.big, cap=cap, cross_check=False)
        fi = build_family_index(ext, RG, big)
        c = LIFTS[ext.kind](c, fi)
        reports.append(properness_report(big, c, ext.describe()))
        RG = big
    return LiftedColoring(RG.graph, RG, c, steps, reports)


def threshold_coloring(word: str, cap: int = 2_000_000) -> LiftedColoring:
    """Proper 3-coloring of R(G) for the threshold graph of ``word``, built by lifts from R(P_3)."""
    G = threshold(word)
    if G.is_complete():
        raise ColoringError("complete graph: its rotation graph is bipartite")
    steps = threshold_construction(G)
    out = lift_along(steps, cap)
    if not _isomorphic_threshold(out.graph, G):
        raise AssertionError("constructed graph differs from the threshold graph")
    return out


def _isomorphic_threshold(G: Graph, H: Graph) -> bool:
    """Threshold graphs are determined by their degree sequences."""
    return sorted(map(G.degree, range(G.n))) == sorted(map(H.degree, range(H.n)))


def threshold_words(max_n: int, connected: bool = True, include_complete: bool = False) -> list[str]:
    """One word per connected threshold graph on 2..``max_n`` vertices (up to isomorphism)."""
    from itertools import product

    seen = set()
    out = []
    for n in range(2, max_n + 1):
        for letters in product("iu", repeat=n - 1):
            word = "".join(letters)
            if connected and word[-1] != "u":
                continue
            G = threshold(word, require_connected=connected)
            if not include_complete and G.is_complete():
                continue
            sig = (n, tuple(sorted(map(G.degree, range(n)))))
            if sig in seen:
                continue
            seen.add(sig)
            out.append(word)
    return out


def complete_bipartite_steps(p: int, q: int) -> tuple[list[Step], list[int]]:
    """Pendant steps from P_3 to the star K_{1,q}; then false-twin vertex ids for the centre."""
    if q < 2 or p < 1:
        raise GraphError("need p >= 1 and q >= 2")
    steps = [Step(SIMPLICIAL) for _ in range(q - 2)]
    return steps, [1] * (p - 1)


def complete_bipartite_coloring(p: int, q: int, cap: int = 2_000_000) -> LiftedColoring:
    """3-coloring of R(K_{p,q}) lifted from R(P_3): pendants give the star, false twins of its centre the rest."""
    from .structure import false_twin_extension

    steps, twins = complete_bipartite_steps(p, q)
    out = lift_along(steps, cap)
    RG, c, reports = out.rotation_graph, out.coloring, out.reports
    for v in twins:
        ext = false_twin_extension(RG.graph, v)
        big = build_rotation_graph(ext.big, cap=cap, cross_check=False)
        fi = build_family_index(ext, RG, big)
        c = lift_coloring_false_twin(c, fi)
        reports.append(properness_report(big, c, ext.describe()))
        RG = big
    return LiftedColoring(RG.graph, RG, c, out.steps, reports)
