"""Batch verification over the built-in corpus; each suite returns a list of reports."""

from __future__ import annotations

import logging
from math import comb, factorial

import numpy as np

from .coloring import (
    ColoringError,
    chromatic_number_exact,
    complete_bipartite_coloring,
    properness_report,
    sign_coloring,
    threshold_coloring,
    threshold_words,
)
from .graphs import (
    Graph,
    complete,
    complete_bipartite,
    complete_split,
    connected_graphs,
    delete_twin_edges,
    path,
    threshold,
    twin_classes,
)
from .metrics import (
    bfs_levels,
    diameter,
    distance,
    geodesic_weight_range,
    kpq_bounds_check,
    orbit_reduce,
    parity_suite,
    quotient_distance_check,
    spk_diameter_formula,
    twin_class_generators,
    twin_rotation_count_check,
    load_witnesses,
    witness_trees,
    _directed_edges,
)
from .reports import Report
from .rotation import build_rotation_graph
from .structure import build_quotient, extension_choices, make_extension, verify_families

log = logging.getLogger(__name__)

SUITES = ("counts", "partitions", "quotients", "colorings", "distances")

# Known diameters of R(K_{2,q}).
KNOWN_K2Q_DIAMETERS = {3: 8, 4: 11, 5: 15, 6: 20, 7: 25, 8: 30}


def catalan(n: int) -> int:
    return comb(2 * n, n) // (n + 1)


def _rg(G: Graph, labels: bool = True, cap: int = 5_000_000):
    return build_rotation_graph(G, cap=cap, edge_labels=labels, cross_check=False)


# counts -------------------------------------------------------------------------


def suite_counts(**_) -> list[Report]:
    cases = [(f"K_{n}", complete(n), factorial(n)) for n in range(3, 7)]
    cases += [(f"P_{n}", path(n), catalan(n)) for n in range(3, 9)]
    cases.append(("SPK_{2,2}", complete_split(2, 2), 22))
    out = []
    for name, G, want in cases:
        got = len(_rg(G, labels=False))
        rep = Report("vertex_count", name)
        rep.require(got == want, {"got": got, "expected": want})
        rep.details.update({"vertices": got, "expected": want})
        out.append(rep)
    return out


# partitions ---------------------------------------------------------------------


def reduced_extension_choices(G: Graph) -> list[tuple[str, tuple[int, ...]]]:
    """Extension choices up to permutations inside twin classes (these are automorphisms of G)."""
    rep = {}
    for cls in twin_classes(G):
        for v in cls:
            rep[v] = min(cls)
    seen = set()
    out = []
    for kind, anchor in extension_choices(G):
        sig = (kind, tuple(sorted(rep.get(v, v) for v in anchor)))
        if sig not in seen:
            seen.add(sig)
            out.append((kind, anchor))
    return out


def family_checks(G: Graph, name: str, choices=None) -> list[Report]:
    small = _rg(G)
    out = []
    for kind, anchor in choices if choices is not None else extension_choices(G):
        ext = make_extension(kind, G, anchor)
        big = _rg(ext.big)
        out += verify_families(ext, small, big, f"{name} {ext.describe()}")
    return out


def partition_corpus(max_pq: int = 7) -> list[tuple[str, Graph, bool]]:
    """``(name, graph, exhaustive choices?)``."""
    out = []
    for n in range(3, 6):
        for k, G in enumerate(connected_graphs(n)):
            out.append((f"connected n={n} #{k}", G, True))
    for s in range(3, max_pq + 1):
        for p in range(1, s // 2 + 1):
            q = s - p
            out.append((f"SPK_{{{p},{q}}}", complete_split(p, q), False))
            out.append((f"K_{{{p},{q}}}", complete_bipartite(p, q), False))
    return out


def suite_partitions(max_pq: int = 7, **_) -> list[Report]:
    out = []
    for name, G, full in partition_corpus(max_pq):
        log.info("partitions: %s", name)
        choices = extension_choices(G) if full else reduced_extension_choices(G)
        reps = family_checks(G, name, choices)
        agg = Report("families", name)
        for r in reps:
            agg.merge(r)
        agg.details.update({"extensions": len(choices), "checks": len(reps)})
        out.append(agg)
    return out


# quotients -----------------------------------------------------------------------


QUOTIENT_CASES = [
    ("K_4, W={2,3}", complete(4), (2, 3)),
    ("SPK_{2,2}, W=P", complete_split(2, 2), (0, 1)),
    ("SPK_{2,3}, W=P", complete_split(2, 3), (0, 1)),
    ("SPK_{2,4}, W=P", complete_split(2, 4), (0, 1)),
    ("SPK_{3,3}, W=P", complete_split(3, 3), (0, 1, 2)),
]


def suite_quotients(**_) -> list[Report]:
    out = []
    for name, G, W in QUOTIENT_CASES:
        log.info("quotients: %s", name)
        Q = build_quotient(_rg(G), W, _rg(delete_twin_edges(G, W)), name)
        Q.report.details["fiber_sizes"] = dict(sorted(Q.fiber_sizes().items()))
        out.append(Q.report)
    return out


# colorings -----------------------------------------------------------------------


def _chi_report(name: str, RG, want: int, seed: int) -> Report:
    res = chromatic_number_exact(RG, seed=seed)
    rep = Report("chromatic_number", name)
    rep.require(res.exact and res.value == want, {"result": res.to_json(), "expected": want})
    if res.exact:
        rep.merge(properness_report(RG, res.coloring, name))
    rep.details.update(res.to_json())
    return rep


def suite_colorings(seed: int = 0, **_) -> list[Report]:
    out = []
    for n in range(2, 7):
        RG = _rg(complete(n), labels=False)
        out.append(_chi_report(f"K_{n}", RG, 2, seed))
        out.append(properness_report(RG, sign_coloring(RG), f"K_{n} sign coloring"))
    for word in threshold_words(6):
        name = f"threshold {word}"
        log.info("colorings: %s", name)
        G = threshold(word)
        out.append(_chi_report(name, _rg(G, labels=False), 3, seed))
        rep = Report("lifted_coloring", name)
        try:
            lc = threshold_coloring(word)
        except ColoringError as exc:
            rep.details["reachable_from_P3"] = False
            rep.details["note"] = str(exc)
        else:
            for r in lc.reports:
                rep.merge(r)
            rep.details.update({"reachable_from_P3": True, "colors": lc.coloring.k, "steps": len(lc.steps)})
        out.append(rep)
    for p, q in [(2, 2), (2, 3), (3, 3)]:
        name = f"K_{{{p},{q}}}"
        out.append(_chi_report(name, _rg(complete_bipartite(p, q), labels=False), 3, seed))
        lc = complete_bipartite_coloring(p, q)
        rep = Report("lifted_coloring", name)
        for r in lc.reports:
            rep.merge(r)
        rep.details["colors"] = lc.coloring.k
        out.append(rep)
    return out


# distances -----------------------------------------------------------------------


def _diam(G: Graph, orbits: bool = True, workers: int = 1, checkpoint=None):
    RG = _rg(G, labels=False)
    orb = orbit_reduce(G, RG, twin_class_generators(G)) if orbits else None
    return diameter(RG, orb, workers=workers, checkpoint=checkpoint)


def diameter_table(qs, workers: int = 1, checkpoint_dir=None) -> dict[str, dict[int, int]]:
    out: dict[str, dict[int, int]] = {"kpq": {}, "spk": {}}
    for q in qs:
        for key, G in (("kpq", complete_bipartite(2, q)), ("spk", complete_split(2, q))):
            ck = None if checkpoint_dir is None else f"{checkpoint_dir}/diam_{key}_2_{q}.json"
            log.info("distances: diameter %s 2,%d", key, q)
            out[key][q] = _diam(G, workers=workers, checkpoint=ck).value
    return out


def witness_report(name: str) -> Report:
    G, T, T2, want = witness_trees(name)
    RG = _rg(G, labels=False)
    got = distance(RG, RG.ordinal(T), RG.ordinal(T2))
    rep = Report("witness_distance", name)
    rep.require(got == want, {"got": got, "expected": want})
    rep.details.update({"distance": got, "expected": want, "graph_n": G.n})
    return rep


def witness_quotient_report() -> Report:
    """The SPK_{2,3} witness pair keeps its distance under π: no geodesic uses a special edge."""
    G, T, T2, want = witness_trees("spk23_far")
    Q = build_quotient(_rg(G), (0, 1), _rg(delete_twin_edges(G, (0, 1))), "SPK_{2,3}")
    a, b = Q.source.ordinal(T), Q.source.ordinal(T2)
    sp = set(map(tuple, Q.special_edges.tolist()))
    src, dst = _directed_edges(Q.source)
    w = np.fromiter(((min(x, y), max(x, y)) in sp for x, y in zip(src.tolist(), dst.tolist())), dtype=np.int64, count=src.size)
    _, mx, dist = geodesic_weight_range(Q.source, a, w)
    tdist = int(bfs_levels(Q.target, int(Q.map[a]))[Q.map[b]])
    rep = Report("witness_quotient", "SPK_{2,3} -> K_{2,3}")
    rep.require(int(dist[b]) == want and tdist == want and mx[b] == 0, {"source": int(dist[b]), "target": tdist, "special": int(mx[b])})
    rep.details.update({"source_distance": int(dist[b]), "target_distance": tdist})
    return rep


def geodesic_law_reports(seed: int = 0, walks: int = 500) -> list[Report]:
    out = []
    K4, S22 = _rg(complete(4)), _rg(complete_split(2, 2))
    S23, K23 = _rg(complete_split(2, 3)), _rg(complete_bipartite(2, 3))
    for name, RG in [("K_4", K4), ("SPK_{2,2}", S22), ("SPK_{2,3}", S23), ("K_{2,3}", K23)]:
        r = parity_suite(RG, walks=walks, seed=seed)
        r.instance = f"{name}, {walks} walks"
        out.append(r)
    out.append(twin_rotation_count_check(K4, (2, 3), instance="K_4, all pairs"))
    out.append(twin_rotation_count_check(S23, (0, 1), instance="SPK_{2,3}, all pairs"))
    Q = build_quotient(K4, (2, 3), S22, "K_4")
    out.append(quotient_distance_check(Q, instance="K_4 -> SPK_{2,2}, all pairs"))
    Q = build_quotient(S23, (0, 1), K23, "SPK_{2,3}")
    out.append(quotient_distance_check(Q, instance="SPK_{2,3} -> K_{2,3}, all pairs"))
    return out


def deletion_bound_reports(table: dict[str, dict[int, int]]) -> list[Report]:
    """Twin-edge deletion bound on each SPK_{2,q} -> K_{2,q} pair, plus K_{p,q} bounds."""
    out = []
    for q in sorted(table["kpq"]):
        dG, dH = table["spk"][q], table["kpq"][q]
        rep = Report("diameter_lower_bound", f"SPK_{{2,{q}}} -> K_{{2,{q}}}")
        rep.require(dG - 1 <= dH <= dG, {"diam_G": dG, "diam_G_minus_S": dH})
        tight = dG - 1 == dH
        if q in KNOWN_K2Q_DIAMETERS:
            expect_tight = spk_diameter_formula(2, q) - 1 == KNOWN_K2Q_DIAMETERS[q]
            rep.require(tight == expect_tight, {"tight": tight, "expected_tight": expect_tight})
        rep.details.update({"diam_G": dG, "diam_G_minus_S": dH, "tight": tight})
        out.append(rep)
        out.append(kpq_bounds_check(2, q, dH))
    return out


def suite_distances(deep: bool = False, seed: int = 0, workers: int = 1, checkpoint_dir=None, **_) -> list[Report]:
    out = []
    qs = list(range(2, 9 if deep else 7))
    table = diameter_table(qs, workers, checkpoint_dir)
    for q in qs:
        if q in KNOWN_K2Q_DIAMETERS:
            rep = Report("diameter", f"K_{{2,{q}}}")
            got, want = table["kpq"][q], KNOWN_K2Q_DIAMETERS[q]
            rep.require(got == want, {"got": got, "expected": want})
            rep.details.update({"diameter": got, "expected": want})
            out.append(rep)
        rep = Report("diameter", f"SPK_{{2,{q}}}")
        got, want = table["spk"][q], spk_diameter_formula(2, q)
        rep.require(got == want, {"got": got, "formula": want})
        rep.details.update({"diameter": got, "formula": want})
        out.append(rep)
    for q in (2, 3, 4):
        for G, name in ((complete_bipartite(2, q), f"K_{{2,{q}}}"), (complete_split(2, q), f"SPK_{{2,{q}}}")):
            a, b = _diam(G).value, _diam(G, orbits=False).value
            rep = Report("orbit_agreement", name)
            rep.require(a == b, {"with_orbits": a, "all_sources": b})
            out.append(rep)
    for name in load_witnesses():
        out.append(witness_report(name))
    out.append(witness_quotient_report())
    out += geodesic_law_reports(seed)
    out += deletion_bound_reports(table)
    return out


RUNNERS = {
    "counts": suite_counts,
    "partitions": suite_partitions,
    "quotients": suite_quotients,
    "colorings": suite_colorings,
    "distances": suite_distances,
}


def run_suite(name: str, **kw) -> list[Report]:
    if name == "all":
        out = []
        for s in SUITES:
            out += RUNNERS[s](**kw)
        return out
    if name not in RUNNERS:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)} or all")
    return RUNNERS[name](**kw)
