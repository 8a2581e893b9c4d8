"""Acceptance criteria, one test each; a PASS/FAIL line per criterion is printed in the summary."""

from __future__ import annotations

import time
from math import comb, factorial

import pytest

from rotgraph.coloring import (
    ColoringError,
    chromatic_number_exact,
    complete_bipartite_coloring,
    is_proper,
    properness_report,
    threshold_coloring,
    threshold_words,
)
from rotgraph.graphs import complete, complete_bipartite, complete_split, delete_twin_edges, path, threshold
from rotgraph.metrics import (
    diameter,
    distance,
    orbit_reduce,
    parity_suite,
    quotient_distance_check,
    spk_diameter_formula,
    twin_class_generators,
    twin_rotation_count_check,
    witness_trees,
)
from rotgraph.rotation import build_rotation_graph
from rotgraph.structure import build_quotient
from rotgraph.suites import (
    KNOWN_K2Q_DIAMETERS,
    catalan,
    extension_choices,
    family_checks,
    partition_corpus,
    reduced_extension_choices,
)


def _summary(reports) -> tuple[bool, int, list]:
    bad = [r for r in reports if not r.passed]
    return not bad, len(reports), [str(r) for r in bad[:3]]


@pytest.fixture(scope="module")
def family_reports():
    t0 = time.perf_counter()
    out = []
    for name, G, full in partition_corpus(7):
        choices = extension_choices(G) if full else reduced_extension_choices(G)
        out += family_checks(G, name, choices)
    return out, time.perf_counter() - t0


@pytest.fixture(scope="module")
def diameters():
    """diam R(K_{2,q}) and diam R(SPK_{2,q}) for q = 2..8, orbit-reduced."""
    t0 = time.perf_counter()
    table = {"kpq": {}, "spk": {}}
    for q in range(2, 9):
        for key, G in (("kpq", complete_bipartite(2, q)), ("spk", complete_split(2, q))):
            RG = build_rotation_graph(G, edge_labels=False, cross_check=False)
            orb = orbit_reduce(G, RG, twin_class_generators(G))
            table[key][q] = diameter(RG, orb).value
            del RG, orb
    return table, time.perf_counter() - t0


def test_criterion_1_vertex_counts(acceptance_line):
    t0 = time.perf_counter()
    got = {}
    want = {}
    for n in range(3, 7):
        got[f"K_{n}"], want[f"K_{n}"] = len(build_rotation_graph(complete(n))), factorial(n)
    for n in range(3, 9):
        got[f"P_{n}"], want[f"P_{n}"] = len(build_rotation_graph(path(n))), catalan(n)
    got["SPK_{2,2}"], want["SPK_{2,2}"] = len(build_rotation_graph(complete_split(2, 2))), 22
    elapsed = time.perf_counter() - t0
    ok = got == want and elapsed < 60
    acceptance_line(1, ok, f"{len(got)} counts exact, {elapsed:.1f}s")
    assert got == want
    assert elapsed < 60


def test_criterion_2_partitions(family_reports, acceptance_line):
    reports, elapsed = family_reports
    core = [r for r in reports if r.check == "partition" or r.check.startswith("edge_decomposition")]
    ok, n, bad = _summary(core)
    ok = ok and elapsed < 600
    acceptance_line(2, ok, f"{n} partition/decomposition checks, {elapsed:.0f}s")
    assert not bad, bad
    assert elapsed < 600


QUOTIENTS = [
    (complete(4), (2, 3)),
    (complete_split(2, 2), (0, 1)),
    (complete_split(2, 3), (0, 1)),
    (complete_split(2, 4), (0, 1)),
    (complete_split(3, 3), (0, 1, 2)),
]


def test_criterion_3_quotients(acceptance_line):
    t0 = time.perf_counter()
    reports = []
    for G, W in QUOTIENTS:
        Q = build_quotient(build_rotation_graph(G), W, build_rotation_graph(delete_twin_edges(G, W)))
        Q.report.require(set(Q.fiber_sizes()) <= {factorial(k) for k in range(1, len(W) + 1)}, dict(Q.fiber_sizes()))
        reports.append(Q.report)
    elapsed = time.perf_counter() - t0
    ok, n, bad = _summary(reports)
    acceptance_line(3, ok and elapsed < 600, f"{n} quotient maps, {elapsed:.1f}s")
    assert not bad, bad
    assert elapsed < 600


def test_criterion_4_embedded_copies(family_reports, acceptance_line):
    reports, _ = family_reports
    copies = [r for r in reports if r.check.startswith("embedded_copy") or r.check == "twin_halves"]
    ok, n, bad = _summary(copies)
    acceptance_line(4, ok and n > 0, f"{n} copy isomorphism checks")
    assert n > 0
    assert not bad, bad


def test_criterion_5_chromatic(acceptance_line):
    t0 = time.perf_counter()
    failures = []
    lifted = unreachable = 0
    for n in range(2, 7):
        res = chromatic_number_exact(build_rotation_graph(complete(n), edge_labels=False))
        if not (res.exact and res.value == 2):
            failures.append(("K", n, res.to_json()))
    words = threshold_words(6)
    for word in words:
        RG = build_rotation_graph(threshold(word), edge_labels=False)
        res = chromatic_number_exact(RG)
        if not (res.exact and res.value == 3 and is_proper(RG, res.coloring)):
            failures.append(("threshold", word, res.to_json()))
        try:
            lc = threshold_coloring(word)
        except ColoringError:
            unreachable += 1
            continue
        lifted += 1
        if not (all(r.passed for r in lc.reports) and properness_report(lc.rotation_graph, lc.coloring).passed):
            failures.append(("lift", word))
    for p, q in [(2, 2), (2, 3), (3, 3)]:
        RG = build_rotation_graph(complete_bipartite(p, q), edge_labels=False)
        res = chromatic_number_exact(RG)
        if not (res.exact and res.value == 3):
            failures.append(("kpq", p, q, res.to_json()))
        lc = complete_bipartite_coloring(p, q)
        lifted += 1
        if not properness_report(lc.rotation_graph, lc.coloring).passed:
            failures.append(("lift", p, q))
    elapsed = time.perf_counter() - t0
    ok = not failures and len(words) == 26 and elapsed < 1800
    acceptance_line(
        5,
        ok,
        f"exact chi on 5 complete, {len(words)} threshold, 3 bipartite; {lifted} lifted colorings proper; "
        f"{unreachable} threshold graphs not reachable from P3 by the two steps; {elapsed:.0f}s",
    )
    assert not failures, failures
    assert len(words) == 26
    assert elapsed < 1800


def test_criterion_6_diameters(diameters, acceptance_line):
    table, elapsed = diameters
    kpq = {q: table["kpq"][q] for q in range(3, 9)}
    spk_ok = all(table["spk"][q] == spk_diameter_formula(2, q) for q in range(2, 7))
    ok = kpq == KNOWN_K2Q_DIAMETERS and spk_ok and elapsed < 3600
    acceptance_line(6, ok, f"K_(2,q) q=3..8: {list(kpq.values())}; SPK_(2,q) q=2..6 match formula; {elapsed:.0f}s")
    assert kpq == KNOWN_K2Q_DIAMETERS
    assert spk_ok
    assert elapsed < 3600


def test_criterion_7_witnesses(acceptance_line):
    got = {}
    for name, want in [("spk23_far", 8), ("spk26_far", 20), ("spk27_far", 25)]:
        G, T, T2, claimed = witness_trees(name)
        RG = build_rotation_graph(G, edge_labels=False, cross_check=False)
        got[name] = (distance(RG, RG.ordinal(T), RG.ordinal(T2)), want)
        assert claimed == want
    ok = all(a == b for a, b in got.values())
    acceptance_line(7, ok, ", ".join(f"{k}={a}" for k, (a, _) in got.items()))
    assert ok, got


def test_criterion_8_geodesic_laws(acceptance_line):
    reports = []
    K4, S22 = build_rotation_graph(complete(4)), build_rotation_graph(complete_split(2, 2))
    S23, K23 = build_rotation_graph(complete_split(2, 3)), build_rotation_graph(complete_bipartite(2, 3))
    for RG in (K4, S22, S23, K23):
        reports.append(parity_suite(RG, walks=500, seed=0))
    reports.append(twin_rotation_count_check(K4, (2, 3)))
    reports.append(twin_rotation_count_check(S23, (0, 1)))
    reports.append(quotient_distance_check(build_quotient(K4, (2, 3), S22)))
    reports.append(quotient_distance_check(build_quotient(S23, (0, 1), K23)))
    ok, n, bad = _summary(reports)
    acceptance_line(8, ok, f"{n} law checks, 500 walks per instance, all pairs for the twin and quotient laws")
    assert not bad, bad


def test_criterion_9_lower_bound(diameters, acceptance_line):
    table, _ = diameters
    rows = []
    failures = []
    for q in range(3, 9):
        dG, dH = table["spk"][q], table["kpq"][q]
        holds = dG - comb(2, 2) <= dH
        tight = dG - 1 == dH
        expect_tight = spk_diameter_formula(2, q) - 1 == KNOWN_K2Q_DIAMETERS[q]
        rows.append(f"q={q}: {dG}-1 {'=' if tight else '<'} {dH}")
        if not holds or tight != expect_tight:
            failures.append((q, dG, dH, tight, expect_tight))
    acceptance_line(9, not failures, "; ".join(rows))
    assert not failures, failures
