"""Families of trees induced by the four graph operations, and the quotient map.

Family members carry a level tag ``(i, j)``:

* simplicial vertex: ``(i, 0)`` for ``T(i)``, ``i = 0..λ(T)+1``;
* true twin: ``(i, j)`` for ``T(i, j)``, ``i = 0..d``, ``j`` in ``{1, 2}``;
* false twin: as for the true twin, with ``T_∧`` tagged ``(d, 0)``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import permutations

import numpy as np

from .graphs import (
    Graph,
    GraphError,
    _bits,
    add_false_twin,
    add_simplicial,
    add_true_twin,
    delete_twin_edges,
    is_clique,
    is_true_twin_set,
)
from .reports import Report
from .rotation import RotationGraph
from .trees import ROOT, ElimTree, TreeError, insert, is_valid, lam, relabel, swap_map

SIMPLICIAL = "simplicial"
TRUE_TWIN = "true_twin"
FALSE_TWIN = "false_twin"
MODES = (SIMPLICIAL, TRUE_TWIN, FALSE_TWIN)


@dataclass(frozen=True)
class Extension:
    """A base graph, one operation applied to it, and the result.

    ``anchor`` is the clique ``K`` for a simplicial vertex and ``(v,)`` for twins.
    The new vertex is always ``base.n``.
    """

    kind: str
    base: Graph
    anchor: tuple[int, ...]
    big: Graph

    @property
    def new(self) -> int:
        return self.base.n

    @property
    def v(self) -> int:
        if self.kind == SIMPLICIAL:
            raise ValueError("simplicial extensions have a clique, not a single vertex")
        return self.anchor[0]

    def describe(self) -> str:
        names = ",".join(self.base.label(a) for a in self.anchor)
        return f"{self.kind}[{names}] on n={self.base.n}"


def simplicial_extension(G: Graph, K) -> Extension:
    K = tuple(sorted(K))
    return Extension(SIMPLICIAL, G, K, add_simplicial(G, K))


def true_twin_extension(G: Graph, v: int) -> Extension:
    return Extension(TRUE_TWIN, G, (v,), add_true_twin(G, v))


def false_twin_extension(G: Graph, v: int) -> Extension:
    return Extension(FALSE_TWIN, G, (v,), add_false_twin(G, v))


def make_extension(kind: str, G: Graph, anchor) -> Extension:
    if kind == SIMPLICIAL:
        return simplicial_extension(G, anchor)
    v = anchor if isinstance(anchor, int) else list(anchor)[0]
    if kind == TRUE_TWIN:
        return true_twin_extension(G, v)
    if kind == FALSE_TWIN:
        return false_twin_extension(G, v)
    raise ValueError(f"unknown mode {kind!r}")


# families ------------------------------------------------------------------------


def family_Px(G: Graph, K, T: ElimTree) -> list[ElimTree]:
    """``T(0), ..., T(λ(T)+1)`` with the new vertex ``x = n`` over ``v_λ``."""
    k, top = lam(T, K)
    return [insert(T, i, G.n, top) for i in range(k + 2)]


def _twin_halves(G: Graph, v: int, T: ElimTree) -> tuple[list[ElimTree], list[ElimTree]]:
    d = T.depth[v]
    rho = swap_map(G.n + 1, v, G.n)
    first = [insert(T, i, G.n, v) for i in range(d + 1)]
    return first, [relabel(S, rho) for S in first]


def family_P(G: Graph, v: int, T: ElimTree) -> list[ElimTree]:
    """``T(0,1), ..., T(d,1), T(d,2), ..., T(0,2)`` in path order."""
    first, second = _twin_halves(G, v, T)
    return first + second[::-1]


def wedge(T: ElimTree, v: int, v_new: int) -> ElimTree:
    """``T_∧`` for a leaf ``v``: the new vertex becomes a sibling leaf of ``v``."""
    if not T.is_leaf(v) or T.parent[v] == ROOT:
        raise TreeError(f"{v} must be a non-root leaf")
    return _sibling(T, v, v_new)


def _sibling(T: ElimTree, v: int, v_new: int) -> ElimTree:
    parent = list(T.parent)
    if v_new == len(parent):
        parent.append(T.parent[v])
    else:
        parent[v_new] = T.parent[v]
    return ElimTree(parent)


def family_Ptilde(G: Graph, v: int, T: ElimTree) -> list[ElimTree]:
    """As :func:`family_P`, with the middle pair merged into ``T_∧`` when ``v`` is a leaf."""
    first, second = _twin_halves(G, v, T)
    if T.is_leaf(v) and T.parent[v] != ROOT:
        return first[:-1] + [wedge(T, v, G.n)] + second[:-1][::-1]
    return first + second[::-1]


def family_tags(ext: Extension, T: ElimTree) -> list[tuple[int, int]]:
    if ext.kind == SIMPLICIAL:
        k, _ = lam(T, ext.anchor)
        return [(i, 0) for i in range(k + 2)]
    d = T.depth[ext.v]
    first = [(i, 1) for i in range(d + 1)]
    second = [(i, 2) for i in range(d, -1, -1)]
    if ext.kind == FALSE_TWIN and T.is_leaf(ext.v) and T.parent[ext.v] != ROOT:
        return first[:-1] + [(d, 0)] + second[1:]
    return first + second


def family(ext: Extension, T: ElimTree) -> list[ElimTree]:
    if ext.kind == SIMPLICIAL:
        return family_Px(ext.base, ext.anchor, T)
    if ext.kind == TRUE_TWIN:
        return family_P(ext.base, ext.v, T)
    return family_Ptilde(ext.base, ext.v, T)


@dataclass
class FamilyIndex:
    """Families of every tree of ``small`` located inside ``big``.

    ``members[t]`` lists big ordinals in path order; ``owner``/``slot`` invert it.
    """

    ext: Extension
    small: RotationGraph
    big: RotationGraph
    members: list[list[int]]
    tags: list[list[tuple[int, int]]]
    owner: np.ndarray
    slot: np.ndarray
    lookup: list[dict[tuple[int, int], int]] = field(default_factory=list)

    def member(self, t: int, tag: tuple[int, int]) -> int | None:
        return self.lookup[t].get(tag)

    def tag_of(self, b: int) -> tuple[int, int]:
        return self.tags[int(self.owner[b])][int(self.slot[b])]


def all_families(ext: Extension, small: RotationGraph) -> list[list[ElimTree]]:
    return [family(ext, small.tree(t)) for t in range(len(small))]


def build_family_index(ext: Extension, small: RotationGraph, big: RotationGraph) -> FamilyIndex:
    """Index of all families; raises if a member is missing from ``big`` or owned twice."""
    owner = np.full(len(big), -1, dtype=np.int64)
    slot = np.full(len(big), -1, dtype=np.int64)
    members, tags, lookup = [], [], []
    for t in range(len(small)):
        T = small.tree(t)
        fam = family(ext, T)
        tg = family_tags(ext, T)
        ords = []
        for pos, S in enumerate(fam):
            b = big.index.get(S.key)
            if b is None:
                raise TreeError(f"family member {S} of tree {t} is not a search tree of the extension")
            if owner[b] != -1:
                raise TreeError(f"tree {S} lies in the families of {owner[b]} and {t}")
            owner[b] = t
            slot[b] = pos
            ords.append(b)
        members.append(ords)
        tags.append(tg)
        lookup.append(dict(zip(tg, ords)))
    return FamilyIndex(ext, small, big, members, tags, owner, slot, lookup)


# partition -------------------------------------------------------------------------


def verify_partition(big: RotationGraph, families: list[list[ElimTree]], instance: str = "") -> Report:
    """Families are disjoint, cover ``big``, consist of search trees and induce paths."""
    rep = Report("partition", instance)
    owner: dict[bytes, int] = {}
    sizes = Counter()
    for f, fam in enumerate(families):
        sizes[len(fam)] += 1
        ords = []
        for S in fam:
            key = S.key
            if key in owner:
                rep.fail({"duplicate": key.hex(), "families": [owner[key], f]})
            owner[key] = f
            b = big.index.get(key)
            if b is None:
                rep.fail({"not_a_vertex": key.hex(), "family": f})
            else:
                ords.append(b)
        if len(ords) != len(fam):
            continue
        pos = {b: i for i, b in enumerate(ords)}
        for i, b in enumerate(ords):
            inside = sorted(pos[c] for c in big.neighbors(b).tolist() if c in pos)
            expect = [j for j in (i - 1, i + 1) if 0 <= j < len(ords)]
            if inside != expect:
                rep.fail({"not_induced_path": f, "position": i, "family_neighbours": inside})
    missing = len(big) - len(set(owner) & set(big.index))
    rep.require(missing == 0, {"uncovered": missing})
    rep.details.update({"families": len(families), "trees": len(big), "size_histogram": dict(sorted(sizes.items()))})
    return rep


# edge decomposition ------------------------------------------------------------------


def _anchor_and_depth(ext: Extension, T: ElimTree) -> tuple[int, int]:
    if ext.kind == SIMPLICIAL:
        k, top = lam(T, ext.anchor)
        return top, k
    return ext.v, T.depth[ext.v]


def classify_small_edge(ext: Extension, T: ElimTree, Tp: ElimTree, pair: tuple[int, int]) -> dict:
    """Case of the catalog for the rotation of ``pair`` taking ``T`` to ``Tp``.

    The result is oriented so that ``T`` is the side where both rotated
    vertices lie on the root path to the anchor, when that happens on exactly
    one side.  Keys: ``case``, ``swap`` (orientation flipped), ``k``, ``l``.
    """
    u, w = pair
    for flipped, (X, Y) in enumerate(((T, Tp), (Tp, T))):
        a, b = (u, w) if X.parent[w] == u else (w, u)
        top, k = _anchor_and_depth(ext, X)
        A = X.subtree_masks  # b on the path iff b is an ancestor of the anchor
        a_in = bool(A[a] >> top & 1)
        b_in = bool(A[b] >> top & 1)
        if not a_in and not b_in:
            return {"case": "1", "swap": bool(flipped), "k": k, "a": a, "b": b}
        if a_in and b_in:
            l = X.depth[b]
            if b == top:
                if ext.kind == SIMPLICIAL:
                    case = "2bi" if a in ext.anchor else "2bii"
                else:
                    case = "2b"
                return {"case": case, "swap": bool(flipped), "k": k, "l": l, "a": a, "b": b}
            nxt = X.branch_to(top)[l + 1]
            touches = bool(X.subtree_masks[nxt] & ext.base.adj[a])
            return {"case": "2ai" if touches else "2aii", "swap": bool(flipped), "k": k, "l": l, "a": a, "b": b}
        if not a_in and b_in:
            return {"case": "impossible", "swap": bool(flipped), "k": k, "a": a, "b": b}
        # a on the path, b off it: read from the other side
    return {"case": "unclassified"}


def _predicted_level_pairs(ext: Extension, info: dict) -> list[tuple[int, int]]:
    """Level pairs ``(i, i')``: ``X(i)`` adjacent to ``Y(i')`` for the oriented edge."""
    case, k = info["case"], info["k"]
    if ext.kind == SIMPLICIAL:
        if case == "1":
            return [(i, i) for i in range(k + 2)]
        if case == "2ai":
            return [(i, i) for i in range(k + 2) if i != info["l"]]
        if case == "2aii":
            l = info["l"]
            return [(i, i) for i in range(l)] + [(i + 1, i) for i in range(l, k + 1)]
        if case == "2bi":
            return [(i, i) for i in range(k)] + [(k + 1, k + 1)]
        if case == "2bii":
            return [(i, i) for i in range(k)] + [(k + 1, k)]
    else:
        if case == "1":
            return [(i, i) for i in range(k + 1)]
        if case == "2ai":
            return [(i, i) for i in range(k + 1) if i != info["l"]]
        if case == "2aii":
            l = info["l"]
            return [(i, i) for i in range(l)] + [(i + 1, i) for i in range(l, k)]
        if case == "2b":
            return [(i, i) for i in range(k)]
    return []


def _project_tag(fi: FamilyIndex, t: int, tag: tuple[int, int]) -> int | None:
    """Member of family ``t`` for a true-twin tag, merging the middle pair into ``T_∧``."""
    b = fi.member(t, tag)
    if b is None and fi.ext.kind == FALSE_TWIN:
        b = fi.member(t, (tag[0], 0))
    return b


def verify_edge_decomposition(fi: FamilyIndex, instance: str = "") -> Report:
    """Edges of the big rotation graph equal the family paths plus the catalog prediction.

    Every edge of the small graph is classified by case; its predicted set of
    inter-family edges is built from the level pairs of that case.  The union
    must equal the actual inter-family edges exactly.  Case 2(a)ii edges must
    close the expected 5-cycles, and must be absent when the anchor is universal.
    """
    ext, small, big = fi.ext, fi.small, fi.big
    rep = Report(f"edge_decomposition[{ext.kind}]", instance)
    if small.pair_labels is None:
        raise ValueError("small rotation graph needs edge labels")
    predicted: dict[tuple[int, int], str] = {}
    cases = Counter()
    js = (0,) if ext.kind == SIMPLICIAL else (1, 2)
    five_cycles = 0
    for s, t in small.edge_array().tolist():
        pair = small.edge_label(s, t)
        T, Tp = small.tree(s), small.tree(t)
        info = classify_small_edge(ext, T, Tp, pair)
        cases[info["case"]] += 1
        if info["case"] in ("impossible", "unclassified"):
            rep.fail({"edge": [s, t], "pair": pair, "case": info["case"]})
            continue
        x, y = (t, s) if info["swap"] else (s, t)
        for i, ip in _predicted_level_pairs(ext, info):
            for j in js:
                bx = _project_tag(fi, x, (i, j))
                by = _project_tag(fi, y, (ip, j))
                if bx is None or by is None:
                    rep.fail({"edge": [s, t], "case": info["case"], "missing_level": [i, ip, j]})
                    continue
                if bx != by:
                    predicted[(min(bx, by), max(bx, by))] = info["case"]
        if info["case"] == "2aii" and ext.kind != FALSE_TWIN:
            l = info["l"]
            for j in js:
                cyc = [fi.member(x, (l - 1, j)), fi.member(x, (l, j)), fi.member(x, (l + 1, j)),
                       fi.member(y, (l, j)), fi.member(y, (l - 1, j))]
                ok = None not in cyc and all(big.has_edge(cyc[q], cyc[(q + 1) % 5]) for q in range(5))
                ok = ok and not any(big.has_edge(cyc[q], cyc[(q + 2) % 5]) for q in range(5))
                rep.require(bool(ok), {"five_cycle": cyc, "edge": [s, t]})
                five_cycles += 1

    universal = all(ext.base.closed_mask(a) == ext.base.full_mask for a in ext.anchor)
    if universal:
        rep.require(cases["2aii"] == 0, {"universal_anchor_with_2aii": cases["2aii"]})

    edges = big.edge_array()
    own = fi.owner[edges]
    if (own < 0).any():
        rep.fail({"unowned_vertices": int((fi.owner < 0).sum())})
    inter = own[:, 0] != own[:, 1]
    actual_inter = set(map(tuple, edges[inter].tolist()))
    # intra-family edges must be consecutive members
    sl = fi.slot[edges[~inter]]
    nonconsec = int((np.abs(sl[:, 0] - sl[:, 1]) != 1).sum())
    rep.require(nonconsec == 0, {"intra_family_non_path_edges": nonconsec})
    path_edges = sum(max(len(m) - 1, 0) for m in fi.members)
    rep.require(int((~inter).sum()) == path_edges, {"intra_edges": int((~inter).sum()), "path_edges": path_edges})
    # inter-family edges join families of adjacent trees
    small_edges = small.edge_set()
    for a, b in list(actual_inter)[:]:
        p, q = int(fi.owner[a]), int(fi.owner[b])
        if (min(p, q), max(p, q)) not in small_edges:
            rep.fail({"inter_edge_between_nonadjacent_families": [a, b, p, q]})
            break
    extra = actual_inter - set(predicted)
    missing = set(predicted) - actual_inter
    for e in sorted(extra)[:5]:
        rep.fail({"unpredicted_edge": list(e)})
    for e in sorted(missing)[:5]:
        rep.fail({"predicted_but_absent": list(e), "case": predicted[e]})
    multiplicity = Counter(predicted.values())
    rep.details.update(
        {
            "small_edge_cases": dict(sorted(cases.items())),
            "inter_edges_by_case": dict(sorted(multiplicity.items())),
            "inter_edges": len(actual_inter),
            "intra_edges": int((~inter).sum()),
            "five_cycles_checked": five_cycles,
            "anchor_universal": universal,
        }
    )
    return rep


# embedded copies -------------------------------------------------------------------


def embedded_copies(fi: FamilyIndex, anchor: str = "root", j: int = 1, instance: str = "") -> tuple[Report, list[int]]:
    """Check the copy of R(G) at the top (``root``) or bottom (``deepest``) of each family.

    Simplicial: ``T(0)`` or ``T(λ+1)``.  Twins: ``T(0, j)``.  Returns the
    report and the image ordinals in small-ordinal order.
    """
    ext, small, big = fi.ext, fi.small, fi.big
    rep = Report(f"embedded_copy[{ext.kind},{anchor},{j}]", instance)
    if ext.kind == SIMPLICIAL:
        image = [m[0] if anchor == "root" else m[-1] for m in fi.members]
    else:
        if anchor != "root":
            raise ValueError("twin copies are anchored at level 0")
        image = [fi.member(t, (0, j)) for t in range(len(small))]
        if ext.kind == FALSE_TWIN:
            image = [b if b is not None else fi.member(t, (0, 0)) for t, b in enumerate(image)]
    rep.require(len(set(image)) == len(image), {"not_injective": True})
    where = {b: t for t, b in enumerate(image)}
    induced = set()
    for t, b in enumerate(image):
        for c in big.neighbors(b).tolist():
            s = where.get(c)
            if s is not None and t < s:
                induced.add((t, s))
    expect = small.edge_set()
    for e in sorted(induced - expect)[:5]:
        rep.fail({"extra_edge": list(e)})
    for e in sorted(expect - induced)[:5]:
        rep.fail({"missing_edge": list(e)})
    rep.details.update({"vertices": len(image), "edges": len(induced), "expected_edges": len(expect)})
    return rep, image


def twin_halves_check(fi: FamilyIndex, instance: str = "") -> Report:
    """``ρ_{v,v'}`` maps the ``j = 1`` half onto the ``j = 2`` half as an isomorphism,
    and the only edges between halves are the middle pairs."""
    ext, big = fi.ext, fi.big
    rep = Report("twin_halves", instance)
    if ext.kind != TRUE_TWIN:
        raise ValueError("halves are defined for true twins")
    rho = swap_map(ext.big.n, ext.v, ext.new)
    half = np.zeros(len(big), dtype=np.int8)
    for t, tg in enumerate(fi.tags):
        for b, (i, j) in zip(fi.members[t], tg):
            half[b] = j
    image = np.empty(len(big), dtype=np.int64)
    for b in range(len(big)):
        image[b] = big.index[relabel(big.tree(b), rho).key]
    rep.require(bool(np.all(half[image] == 3 - half)), {"rho_does_not_swap_halves": True})
    edges = big.edge_array()
    mapped = np.sort(image[edges], axis=1)
    rep.require(set(map(tuple, mapped.tolist())) == set(map(tuple, edges.tolist())), {"rho_not_automorphism": True})
    cross = edges[half[edges[:, 0]] != half[edges[:, 1]]]
    for a, b in cross.tolist():
        ta, tb = fi.tag_of(a), fi.tag_of(b)
        t = int(fi.owner[a])
        d = fi.small.tree(t).depth[ext.v]
        ok = fi.owner[a] == fi.owner[b] and {ta, tb} == {(d, 1), (d, 2)}
        rep.require(bool(ok), {"cross_edge": [a, b]})
    rep.details["cross_edges"] = int(cross.shape[0])
    return rep


# W-special trees and the quotient ------------------------------------------------------


def _w_mask(G: Graph, W) -> int:
    ws = sorted(set(W))
    if len(ws) < 2:
        raise GraphError("W needs at least two vertices")
    if not is_true_twin_set(G, ws):
        raise GraphError(f"{ws} is not a set of true twins")
    m = 0
    for w in ws:
        m |= 1 << w
    return m


def special_chain(T: ElimTree, wmask: int) -> tuple[list[int], int] | None:
    """``(L_T bottom-up, q_T)`` when ``T`` is W-special, else ``None``."""
    leaf = None
    for w in _bits(wmask):
        if w in T and not T.children[w]:
            leaf = w
            break
    if leaf is None:
        return None
    chain = [leaf]
    p = T.parent[leaf]
    while p != ROOT and wmask >> p & 1:
        chain.append(p)
        p = T.parent[p]
    if len(chain) < 2 or p == ROOT:
        return None
    return chain, p


def is_W_special(G: Graph, W, T: ElimTree) -> tuple[bool, list[int], int | None]:
    """``(special?, L_T, q_T)``; ``L_T`` sorted by id."""
    found = special_chain(T, _w_mask(G, W))
    if found is None:
        return False, [], None
    chain, q = found
    return True, sorted(chain), q


def project(G: Graph, W, T: ElimTree, check: bool = True) -> ElimTree:
    """π: flatten ``L_T`` into sibling leaves under ``q_T``; identity off special trees."""
    wmask = _w_mask(G, W)
    found = special_chain(T, wmask)
    if found is None:
        out = T
    else:
        chain, q = found
        parent = list(T.parent)
        for w in chain:
            parent[w] = q
        out = ElimTree(parent)
    if check and not is_valid(delete_twin_edges(G, _bits(wmask)), out):
        raise TreeError(f"π({T}) is not a search tree of G - S")
    return out


def w_leaf_groups(T: ElimTree, wmask: int) -> dict[int, list[int]]:
    """W-leaves grouped by parent."""
    groups: dict[int, list[int]] = {}
    for w in _bits(wmask):
        if w in T and not T.children[w] and T.parent[w] != ROOT:
            groups.setdefault(T.parent[w], []).append(w)
    return groups


def _special_edge(chain_a, chain_b, pair) -> bool:
    if chain_a is None or chain_b is None:
        return False
    la, lb = set(chain_a[0]), set(chain_b[0])
    return la == lb and pair[0] in la and pair[1] in la


@dataclass
class QuotientMap:
    source: RotationGraph
    target: RotationGraph
    W: tuple[int, ...]
    map: np.ndarray
    special: np.ndarray
    special_edges: np.ndarray
    report: Report

    def fiber_sizes(self) -> Counter:
        return Counter(Counter(self.map.tolist()).values())


def build_quotient(source: RotationGraph, W, target: RotationGraph, instance: str = "") -> QuotientMap:
    """π over all of ``source`` with every quotient invariant checked in ``report``."""
    G = source.graph
    W = tuple(sorted(W))
    wmask = _w_mask(G, W)
    GmS = delete_twin_edges(G, W)
    rep = Report("quotient", instance)
    rep.require(GmS.adj == target.graph.adj, {"target_graph_is_not_G_minus_S": True})
    N = len(source)
    pi = np.empty(N, dtype=np.int64)
    special = np.zeros(N, dtype=bool)
    chains: list = [None] * N
    for s in range(N):
        T = source.tree(s)
        found = special_chain(T, wmask)
        chains[s] = found
        special[s] = found is not None
        img = project(G, W, T, check=False)
        t = target.index.get(img.key)
        if t is None:
            rep.fail({"image_not_in_target": s, "tree": str(img)})
            pi[s] = -1
        else:
            pi[s] = t
    if not rep.passed:
        return QuotientMap(source, target, W, pi, special, np.zeros((0, 2), np.int64), rep)

    # surjective
    hit = np.zeros(len(target), dtype=bool)
    hit[pi] = True
    rep.require(bool(hit.all()), {"unhit_targets": int((~hit).sum())})

    # quotient law and special-edge behaviour
    edges = source.edge_array()
    mapped = pi[edges]
    target_codes = set((target.edge_array()[:, 0].astype(np.int64) * len(target) + target.edge_array()[:, 1]).tolist())
    special_rows = []
    images = set()
    for (a, b), (ma, mb) in zip(edges.tolist(), mapped.tolist()):
        pair = source.edge_label(a, b)
        is_sp = _special_edge(chains[a], chains[b], pair)
        if is_sp:
            special_rows.append((a, b))
        if ma == mb:
            rep.require(is_sp, {"collapsed_non_special_edge": [a, b]})
        else:
            rep.require(not is_sp, {"special_edge_not_collapsed": [a, b]})
            lo, hi = min(ma, mb), max(ma, mb)
            if not rep.require(lo * len(target) + hi in target_codes, {"quotient_law": [a, b, ma, mb]}):
                continue
            images.add((lo, hi))
    special_edges = np.asarray(special_rows, dtype=np.int64).reshape(-1, 2)

    # contraction equality: edge images are exactly the target edges, classes are special components
    rep.require(len(images) == len(target_codes), {"contracted_edges": len(images), "target_edges": len(target_codes)})
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import connected_components

    if special_edges.size:
        M = coo_matrix((np.ones(len(special_edges)), (special_edges[:, 0], special_edges[:, 1])), shape=(N, N))
        _, comp = connected_components(M, directed=False)
    else:
        comp = np.arange(N)
    # same partition: pairs (comp, pi) must be in bijection
    pairs = set(zip(comp.tolist(), pi.tolist()))
    rep.require(len(pairs) == len(set(comp.tolist())) == len(target), {"contraction_classes_differ_from_fibers": True})

    # fibers
    fibers: dict[int, list[int]] = {}
    for s, t in enumerate(pi.tolist()):
        fibers.setdefault(t, []).append(s)
    for t in range(len(target)):
        groups = [g for g in w_leaf_groups(target.tree(t), wmask).values() if len(g) >= 2]
        members = fibers.get(t, [])
        if not groups:
            rep.require(len(members) == 1, {"fiber_size": len(members), "target": t, "expected": 1})
            continue
        if not rep.require(len(groups) == 1, {"several_leaf_groups": t}):
            continue
        L = groups[0]
        perms = []
        for s in members:
            ch = chains[s]
            if not rep.require(ch is not None and sorted(ch[0]) == L, {"fiber_member_not_special": s, "target": t}):
                break
            perms.append(tuple(reversed(ch[0])))  # top-down order
        else:
            expect = set(permutations(L))
            rep.require(set(perms) == expect and len(perms) == len(expect), {"fiber_not_all_orders": t})
            pos = {p: s for p, s in zip(perms, members)}
            want = set()
            for p in perms:
                for i in range(len(p) - 1):
                    q = list(p)
                    q[i], q[i + 1] = q[i + 1], q[i]
                    a, b = pos[p], pos[tuple(q)]
                    want.add((min(a, b), max(a, b)))
            mem = set(members)
            have = set()
            for s in members:
                for c in source.neighbors(s).tolist():
                    if c in mem and s < c:
                        have.add((s, c))
            rep.require(have == want, {"fiber_not_permutohedron": t})
    sizes = Counter(len(f) for f in fibers.values())
    rep.details.update(
        {
            "source_trees": N,
            "target_trees": len(target),
            "special_trees": int(special.sum()),
            "special_edges": int(len(special_edges)),
            "fiber_sizes": dict(sorted(sizes.items())),
        }
    )
    return QuotientMap(source, target, W, pi, special, special_edges, rep)


def verify_families(ext: Extension, small: RotationGraph, big: RotationGraph, instance: str = "") -> list[Report]:
    """Partition, decomposition and copy checks for one extension."""
    fams = all_families(ext, small)
    reports = [verify_partition(big, fams, instance)]
    if not reports[0].passed:
        return reports
    fi = build_family_index(ext, small, big)
    reports.append(verify_edge_decomposition(fi, instance))
    if ext.kind == SIMPLICIAL:
        reports.append(embedded_copies(fi, "root", instance=instance)[0])
        reports.append(embedded_copies(fi, "deepest", instance=instance)[0])
    else:
        for j in (1, 2):
            reports.append(embedded_copies(fi, "root", j, instance=instance)[0])
    if ext.kind == TRUE_TWIN:
        reports.append(twin_halves_check(fi, instance))
    return reports


def extension_choices(G: Graph, max_cliques: int | None = None) -> list[tuple[str, tuple[int, ...]]]:
    """Every non-empty clique for the simplicial mode and every vertex for the twin modes."""
    out: list[tuple[str, tuple[int, ...]]] = []
    cliques = []
    for mask in range(1, 1 << G.n):
        vs = _bits(mask)
        if is_clique(G, vs):
            cliques.append(tuple(vs))
    if max_cliques is not None:
        cliques = cliques[:max_cliques]
    out += [(SIMPLICIAL, K) for K in cliques]
    out += [(TRUE_TWIN, (v,)) for v in range(G.n)]
    out += [(FALSE_TWIN, (v,)) for v in range(G.n)]
    return out
