"""Distances and diameters on rotation graphs, with the geodesic and parity laws."""

from __future__ import annotations

import json
import logging
import os
import time
from dataclasses import dataclass, field
from math import comb
from pathlib import Path

import numpy as np

from .graphs import Graph, delete_twin_edges, is_automorphism, twin_classes
from .reports import Report
from .rotation import RotationGraph, build_rotation_graph
from .structure import QuotientMap

log = logging.getLogger(__name__)

UNSEEN = 255


class BudgetExceededError(RuntimeError):
    """Time or memory budget hit; ``partial`` carries the best bound so far."""

    def __init__(self, message: str, partial: dict):
        super().__init__(message)
        self.partial = partial


# BFS --------------------------------------------------------------------------------


@dataclass
class DistanceProfile:
    source: int
    dist: np.ndarray
    eccentricity: int
    farthest: list[int]


def _neighbor_block(RG: RotationGraph) -> np.ndarray | None:
    """``(N, d)`` neighbour matrix when every tree has the same degree."""
    cached = RG.__dict__.get("_block")
    if cached is None:
        deg = np.diff(RG.indptr)
        if deg.size and np.all(deg == deg[0]):
            cached = RG.indices.reshape(-1, int(deg[0]))
        else:
            cached = False
        RG.__dict__["_block"] = cached
    return None if cached is False else cached


def _gather(RG: RotationGraph, frontier: np.ndarray) -> np.ndarray:
    block = _neighbor_block(RG)
    if block is not None:
        return block[frontier].ravel()
    starts = RG.indptr[frontier]
    counts = RG.indptr[frontier + 1] - starts
    offs = np.repeat(starts - np.cumsum(counts) + counts, counts) + np.arange(int(counts.sum()))
    return RG.indices[offs]


def bfs_levels(RG: RotationGraph, source: int) -> np.ndarray:
    """Hop distances from ``source`` as uint8 (255 = unreachable)."""
    dist = np.full(len(RG), UNSEEN, dtype=np.uint8)
    dist[source] = 0
    frontier = np.array([source], dtype=np.int64)
    d = 0
    seen = np.zeros(len(RG), dtype=bool)
    seen[source] = True
    while frontier.size:
        nb = _gather(RG, frontier)
        nb = nb[~seen[nb]]
        if not nb.size:
            break
        nb = np.unique(nb)
        d += 1
        if d >= UNSEEN:
            raise OverflowError("distance exceeds uint8 range")
        seen[nb] = True
        dist[nb] = d
        frontier = nb
    return dist


def bfs_from(RG: RotationGraph, s: int) -> DistanceProfile:
    dist = bfs_levels(RG, s)
    reach = dist[dist != UNSEEN]
    ecc = int(reach.max())
    far = np.flatnonzero(dist == ecc)[:10].tolist()
    return DistanceProfile(s, dist, ecc, far)


def distance(RG: RotationGraph, a: int, b: int) -> int:
    return int(bfs_levels(RG, a)[b])


def shortest_path(RG: RotationGraph, a: int, b: int) -> list[int]:
    """One geodesic, walking back from ``b`` along decreasing distance (smallest ordinal first)."""
    dist = bfs_levels(RG, a)
    if dist[b] == UNSEEN:
        raise ValueError("unreachable")
    path = [b]
    while path[-1] != a:
        x = path[-1]
        nb = RG.neighbors(x)
        prev = nb[dist[nb] == dist[x] - 1]
        path.append(int(prev.min()))
    return path[::-1]


# orbits -----------------------------------------------------------------------------


def tree_codes(rows: np.ndarray, n: int) -> np.ndarray:
    """Injective int64 code of each key row (base ``n+1``, root digit ``n``)."""
    if n > 15:
        raise ValueError("tree codes support n <= 15")
    r = rows.astype(np.int64)
    r[r == 255] = n
    weights = (n + 1) ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return r @ weights


def apply_automorphism_rows(rows: np.ndarray, f) -> np.ndarray:
    """``f*`` on every key row at once."""
    n = rows.shape[1]
    fmap = np.arange(256, dtype=np.uint8)
    fmap[:n] = np.asarray(f, dtype=np.uint8)
    out = np.empty_like(rows)
    out[:, np.asarray(f)] = fmap[rows]
    return out


@dataclass
class OrbitSet:
    generators: list[list[int]]
    labels: np.ndarray
    representatives: np.ndarray
    sizes: np.ndarray

    @property
    def count(self) -> int:
        return int(self.representatives.size)


def image_ordinals(RG: RotationGraph, f) -> np.ndarray:
    n = RG.graph.n
    codes = tree_codes(RG.rows, n)
    order = np.argsort(codes, kind="stable")
    sorted_codes = codes[order]
    img = tree_codes(apply_automorphism_rows(RG.rows, f), n)
    pos = np.searchsorted(sorted_codes, img)
    pos = np.minimum(pos, len(codes) - 1)
    if not np.array_equal(sorted_codes[pos], img):
        raise ValueError("generator maps some search tree outside the rotation graph")
    return order[pos]


def orbit_reduce(G: Graph, RG: RotationGraph, generators, check_edges: bool = True) -> OrbitSet:
    """Orbits of tree ordinals under the group generated by ``generators`` acting by ``f*``."""
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import connected_components

    gens = [list(map(int, f)) for f in generators]
    for f in gens:
        if not is_automorphism(G, f):
            raise ValueError(f"{f} is not an automorphism of the graph")
    N = len(RG)
    rows, cols = [np.arange(N)], [np.arange(N)]
    edges = RG.edge_array() if check_edges else None
    for f in gens:
        img = image_ordinals(RG, f)
        if edges is not None:
            mapped = np.sort(img[edges], axis=1)
            a = np.sort(edges[:, 0].astype(np.int64) * N + edges[:, 1])
            b = np.sort(mapped[:, 0].astype(np.int64) * N + mapped[:, 1])
            if not np.array_equal(a, b):
                raise ValueError(f"f* for {f} is not an automorphism of the rotation graph")
        rows.append(np.arange(N))
        cols.append(img)
    M = coo_matrix((np.ones(sum(r.size for r in rows), dtype=np.int8), (np.concatenate(rows), np.concatenate(cols))), shape=(N, N))
    k, labels = connected_components(M, directed=False)
    reps = np.full(k, N, dtype=np.int64)
    np.minimum.at(reps, labels, np.arange(N))
    sizes = np.bincount(labels, minlength=k)
    order = np.argsort(reps)
    relabel = np.empty(k, dtype=np.int64)
    relabel[order] = np.arange(k)
    return OrbitSet(gens, relabel[labels], reps[order], sizes[order])


def symmetric_generators(block: list[int], n: int) -> list[list[int]]:
    """A transposition and a full cycle on ``block`` (they generate its symmetric group)."""
    if len(block) < 2:
        return []
    swap = list(range(n))
    swap[block[0]], swap[block[1]] = block[1], block[0]
    gens = [swap]
    if len(block) > 2:
        cyc = list(range(n))
        for a, b in zip(block, block[1:] + block[:1]):
            cyc[a] = b
        gens.append(cyc)
    return gens


def twin_class_generators(G: Graph) -> list[list[int]]:
    """Generators permuting each class of true or false twins."""
    gens: list[list[int]] = []
    for cls in twin_classes(G):
        gens += symmetric_generators(sorted(cls), G.n)
    return gens


# diameters --------------------------------------------------------------------------


@dataclass
class DiameterResult:
    value: int
    witness_pair: tuple[int, int]
    sources_run: int
    runtime: float
    exact: bool = True
    orbits: int | None = None
    spot_checks: int = 0
    eccentricities: dict[int, int] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "witness_pair": list(self.witness_pair),
            "sources_run": self.sources_run,
            "runtime": round(self.runtime, 3),
            "exact": self.exact,
            "orbits": self.orbits,
            "spot_checks": self.spot_checks,
        }


_WORKER_RG: RotationGraph | None = None


def _ecc_task(s: int) -> tuple[int, int, int]:
    prof = bfs_from(_WORKER_RG, s)
    return s, prof.eccentricity, prof.farthest[0]


def _run_sources(RG: RotationGraph, sources, workers: int):
    global _WORKER_RG
    if workers <= 1 or len(sources) < 2:
        for s in sources:
            prof = bfs_from(RG, int(s))
            yield int(s), prof.eccentricity, prof.farthest[0]
        return
    import multiprocessing as mp

    _WORKER_RG = RG
    ctx = mp.get_context("fork")
    with ctx.Pool(workers) as pool:
        yield from pool.imap(_ecc_task, [int(s) for s in sources], chunksize=1)
    _WORKER_RG = None


def diameter(
    RG: RotationGraph,
    orbits: OrbitSet | None = None,
    spot_checks: int = 20,
    checkpoint: str | Path | None = None,
    time_budget: float | None = None,
    workers: int = 1,
    seed: int = 0,
) -> DiameterResult:
    """Largest eccentricity; with ``orbits`` only representatives are BFS sources.

    Eccentricity is constant on orbits because ``f*`` is an automorphism of the
    rotation graph; ``spot_checks`` orbits are re-run from a random other member.
    """
    t0 = time.perf_counter()
    sources = orbits.representatives if orbits is not None else np.arange(len(RG))
    done: dict[int, tuple[int, int]] = {}
    ck = Path(checkpoint) if checkpoint else None
    if ck is not None and ck.exists():
        data = json.loads(ck.read_text())
        if data.get("vertices") == len(RG):
            done = {int(k): tuple(v) for k, v in data["done"].items()}
    todo = [int(s) for s in sources if int(s) not in done]
    best = max(((e, s, f) for s, (e, f) in done.items()), default=(-1, 0, 0))
    last_save = time.perf_counter()
    exact = True
    for s, ecc, far in _run_sources(RG, todo, workers):
        done[s] = (ecc, far)
        if ecc > best[0]:
            best = (ecc, s, far)
        now = time.perf_counter()
        if ck is not None and now - last_save > 30:
            _save_checkpoint(ck, RG, done)
            last_save = now
        if time_budget is not None and now - t0 > time_budget:
            exact = False
            break
    if ck is not None:
        _save_checkpoint(ck, RG, done)
    if not exact:
        raise BudgetExceededError(
            f"time budget of {time_budget}s exceeded after {len(done)} of {len(sources)} sources",
            {"lower_bound": best[0], "sources_run": len(done), "witness_pair": [best[1], best[2]]},
        )
    checks = 0
    if orbits is not None and spot_checks:
        rng = np.random.default_rng(seed)
        multi = np.flatnonzero(orbits.sizes > 1)
        pick = rng.choice(multi, size=min(spot_checks, multi.size), replace=False) if multi.size else []
        for o in pick:
            members = np.flatnonzero(orbits.labels == o)
            other = int(rng.choice(members[members != orbits.representatives[o]]))
            ecc = bfs_from(RG, other).eccentricity
            if ecc != done[int(orbits.representatives[o])][0]:
                raise AssertionError(f"eccentricity differs inside orbit {o}")
            checks += 1
    return DiameterResult(
        best[0],
        (best[1], best[2]),
        len(done),
        time.perf_counter() - t0,
        True,
        orbits.count if orbits is not None else None,
        checks,
        {s: e for s, (e, _) in done.items()},
    )


def _save_checkpoint(path: Path, RG: RotationGraph, done: dict) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps({"vertices": len(RG), "done": {str(k): list(v) for k, v in done.items()}}))
    os.replace(tmp, path)


def graph_diameter(G: Graph, orbits: str = "auto", cap: int = 5_000_000, **kw) -> DiameterResult:
    RG = build_rotation_graph(G, cap=cap, edge_labels=False, cross_check=False)
    orb = None
    if orbits == "auto":
        gens = twin_class_generators(G)
        if gens:
            orb = orbit_reduce(G, RG, gens)
    return diameter(RG, orb, **kw)


# closed forms --------------------------------------------------------------------------


def spk_diameter_formula(p: int, q: int) -> int:
    if q >= 4 * p + 1:
        return 2 * p * q + comb(p, 2)
    return p * q + comb(q, 2) // 2 + comb(p, 2)


def kpq_lower_bound(p: int, q: int) -> int:
    return p * q + comb(q, 2) // 2


def broom_upper_bound(q: int) -> float:
    return 2 * q + 0.5 * (comb(q, 2) + 1)


# geodesic laws ----------------------------------------------------------------------------


def relative_orders(RG: RotationGraph, i: int, pairs) -> list[int]:
    T = RG.tree(i)
    return [1 if T.is_ancestor(u, v) else -1 for u, v in pairs]


def rotation_parity_check(RG: RotationGraph, walk: list[int], pairs=None) -> Report:
    """Odd number of ``uv``-rotations along ``walk`` iff ``u, v`` swap relative order."""
    if RG.pair_labels is None:
        raise ValueError("rotation graph needs edge labels")
    G = RG.graph
    pairs = pairs if pairs is not None else G.edges()
    rep = Report("rotation_parity", f"walk of length {len(walk) - 1}")
    counts = np.zeros(G.n * G.n, dtype=np.int64)
    for a, b in zip(walk, walk[1:]):
        u, v = RG.edge_label(a, b)
        counts[u * G.n + v] += 1
    first = relative_orders(RG, walk[0], pairs)
    last = relative_orders(RG, walk[-1], pairs)
    for (u, v), x, y in zip(pairs, first, last):
        code = min(u, v) * G.n + max(u, v)
        if (counts[code] % 2 == 1) != (x != y):
            rep.fail({"pair": [u, v], "count": int(counts[code]), "order_changed": x != y})
    return rep


def random_walks(RG: RotationGraph, count: int, max_len: int, seed: int = 0) -> list[list[int]]:
    rng = np.random.default_rng(seed)
    walks = []
    for _ in range(count):
        x = int(rng.integers(len(RG)))
        walk = [x]
        for _ in range(int(rng.integers(0, max_len + 1))):
            nb = RG.neighbors(walk[-1])
            walk.append(int(nb[rng.integers(nb.size)]))
        walks.append(walk)
    return walks


def parity_suite(RG: RotationGraph, walks: int = 500, seed: int = 0, max_len: int = 40) -> Report:
    rep = Report("rotation_parity", f"{walks} walks, seed {seed}")
    for w in random_walks(RG, walks, max_len, seed):
        rep.merge(rotation_parity_check(RG, w))
    rng = np.random.default_rng(seed + 1)
    for _ in range(min(50, len(RG))):
        a, b = map(int, rng.integers(len(RG), size=2))
        rep.merge(rotation_parity_check(RG, shortest_path(RG, a, b)))
    rep.details["walks"] = walks
    return rep


def _directed_edges(RG: RotationGraph) -> tuple[np.ndarray, np.ndarray]:
    src = np.repeat(np.arange(len(RG), dtype=np.int64), np.diff(RG.indptr))
    return src, RG.indices.astype(np.int64)


def geodesic_weight_range(RG: RotationGraph, s: int, weight: np.ndarray, dist: np.ndarray | None = None):
    """Min and max total ``weight`` over geodesics from ``s`` to every tree.

    ``weight`` aligns with the CSR entries.  Dynamic programme over BFS levels.
    """
    if dist is None:
        dist = bfs_levels(RG, s)
    src, dst = _directed_edges(RG)
    d32 = dist.astype(np.int32)
    forward = d32[dst] == d32[src] + 1
    src, dst, w = src[forward], dst[forward], weight[forward].astype(np.int64)
    lvl = d32[src]
    order = np.argsort(lvl, kind="stable")
    src, dst, w, lvl = src[order], dst[order], w[order], lvl[order]
    bounds = np.searchsorted(lvl, np.arange(int(d32[d32 != UNSEEN].max()) + 2))
    big = np.iinfo(np.int64).max // 4
    mn = np.full(len(RG), big, dtype=np.int64)
    mx = np.full(len(RG), -1, dtype=np.int64)
    mn[s] = mx[s] = 0
    for L in range(len(bounds) - 1):
        a, b = bounds[L], bounds[L + 1]
        if a == b:
            continue
        np.minimum.at(mn, dst[a:b], mn[src[a:b]] + w[a:b])
        np.maximum.at(mx, dst[a:b], mx[src[a:b]] + w[a:b])
    return mn, mx, dist


def _ancestor_flags(RG: RotationGraph, u: int, v: int) -> np.ndarray:
    """For every tree: True if ``u`` lies above ``v``."""
    rows = RG.rows
    x = np.full(len(RG), v, dtype=np.int64)
    above = np.zeros(len(RG), dtype=bool)
    for _ in range(RG.graph.n):
        p = rows[np.arange(len(RG)), x].astype(np.int64)
        live = p != 255
        above |= live & (p == u)
        x = np.where(live, p, x)
    return above


def twin_rotation_count_check(RG: RotationGraph, W: tuple[int, int], sources=None, instance: str = "") -> Report:
    """Every geodesic has exactly one ``uv``-rotation if the orders differ, none otherwise."""
    if RG.pair_labels is None:
        raise ValueError("rotation graph needs edge labels")
    u, v = sorted(W)
    from .graphs import is_true_twin_set

    if not is_true_twin_set(RG.graph, [u, v]):
        raise ValueError(f"{u}, {v} are not true twins")
    rep = Report("twin_rotation_count", instance)
    weight = (RG.pair_labels == RG.pair_code(u, v)).astype(np.int64)
    above = _ancestor_flags(RG, u, v)
    sources = range(len(RG)) if sources is None else sources
    pairs = 0
    for s in sources:
        mn, mx, _ = geodesic_weight_range(RG, int(s), weight)
        expect = (above != above[s]).astype(np.int64)
        bad = np.flatnonzero((mn != expect) | (mx != expect))
        for t in bad[:3].tolist():
            rep.fail({"source": int(s), "target": t, "min": int(mn[t]), "max": int(mx[t]), "expected": int(expect[t])})
        pairs += len(RG)
    rep.details["pairs"] = pairs
    return rep


def quotient_distance_check(Q: QuotientMap, sources=None, instance: str = "") -> Report:
    """Target distance is source distance minus [some geodesic uses a W-special edge]."""
    if len(Q.W) != 2:
        raise ValueError("the dichotomy is stated for |W| = 2")
    src_rg, tgt = Q.source, Q.target
    rep = Report("quotient_distance", instance)
    N = len(src_rg)
    sp = set(map(tuple, Q.special_edges.tolist()))
    s_arr, d_arr = _directed_edges(src_rg)
    weight = np.fromiter(((min(a, b), max(a, b)) in sp for a, b in zip(s_arr.tolist(), d_arr.tolist())), dtype=np.int64, count=s_arr.size)
    sources = range(N) if sources is None else sources
    counts = {"drop": 0, "equal": 0}
    pairs = 0
    for s in sources:
        s = int(s)
        _, mx, dist = geodesic_weight_range(src_rg, s, weight)
        tdist = bfs_levels(tgt, int(Q.map[s]))[Q.map].astype(np.int64)
        has = mx >= 1
        rep.require(bool(np.all(mx <= 1)), {"source": s, "geodesic_with_two_special_edges": True})
        expect = dist.astype(np.int64) - has
        bad = np.flatnonzero(tdist != expect)
        for t in bad[:3].tolist():
            rep.fail({"source": s, "target": t, "dist": int(dist[t]), "target_dist": int(tdist[t]), "special_on_geodesic": bool(has[t])})
        counts["drop"] += int(has.sum())
        counts["equal"] += int((~has).sum())
        pairs += N
    rep.details.update({"pairs": pairs, **counts})
    return rep


def lower_bound_check(G: Graph, W, orbits: str = "auto", instance: str = "", cap: int = 5_000_000) -> Report:
    """``diam R(G) - C(|W|,2) <= diam R(G-S)``; records whether it is tight."""
    W = sorted(W)
    H = delete_twin_edges(G, W)
    dG = graph_diameter(G, orbits, cap).value
    dH = graph_diameter(H, orbits, cap).value
    rep = Report("diameter_lower_bound", instance)
    slack = dH - (dG - comb(len(W), 2))
    rep.require(slack >= 0, {"diam_G": dG, "diam_G_minus_S": dH})
    rep.details.update({"diam_G": dG, "diam_G_minus_S": dH, "binom": comb(len(W), 2), "tight": slack == 0})
    return rep


# witness fixtures --------------------------------------------------------------------


def _label_to_id(label: str) -> int:
    if label[0] == "x":
        return int(label[1:]) - 1
    if label[0] == "y":
        return int(label[1:]) + 1
    raise ValueError(f"bad vertex label {label!r}")


def load_witnesses() -> dict:
    """Far-apart tree pairs on ``SPK_{2,q}``, with vertices named ``x1, x2, y1, ...``."""
    from importlib.resources import files

    return json.loads(files("rotgraph").joinpath("data/witnesses.json").read_text())["witnesses"]


def witness_trees(name: str):
    """``(graph, T, T', claimed distance)`` for a stored witness pair."""
    from .graphs import parse_family
    from .trees import path_tree, validate

    w = load_witnesses()[name]
    G = parse_family(w["family"])
    T = path_tree([_label_to_id(x) for x in w["from"]])
    T2 = path_tree([_label_to_id(x) for x in w["to"]])
    validate(G, T)
    validate(G, T2)
    return G, T, T2, int(w["distance"])


def kpq_bounds_check(p: int, q: int, diam: int) -> Report:
    """Known bounds on ``diam R(K_{p,q})`` against a computed value."""
    rep = Report("kpq_bounds", f"K_{{{p},{q}}}")
    rep.require(comb(q, 2) <= diam <= 2 * p * q, {"diam": diam, "range": [comb(q, 2), 2 * p * q]})
    if min(2, p / 4) <= q <= 4 * p:
        rep.require(kpq_lower_bound(p, q) <= diam, {"diam": diam, "lower": kpq_lower_bound(p, q)})
    if p == 2 and q <= 6:
        rep.require(diam <= broom_upper_bound(q), {"diam": diam, "broom": broom_upper_bound(q)})
    rep.details.update({"diam": diam, "lower": kpq_lower_bound(p, q), "broom": broom_upper_bound(q) if p == 2 else None})
    return rep
