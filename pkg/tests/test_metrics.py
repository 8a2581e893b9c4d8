from __future__ import annotations

import json

import networkx as nx
import numpy as np
import pytest

from rotgraph.graphs import complete, complete_bipartite, complete_split, path
from rotgraph.metrics import (
    BudgetExceededError,
    bfs_from,
    bfs_levels,
    broom_upper_bound,
    diameter,
    distance,
    geodesic_weight_range,
    kpq_bounds_check,
    kpq_lower_bound,
    load_witnesses,
    orbit_reduce,
    parity_suite,
    quotient_distance_check,
    random_walks,
    rotation_parity_check,
    shortest_path,
    spk_diameter_formula,
    symmetric_generators,
    twin_class_generators,
    twin_rotation_count_check,
    witness_trees,
)
from rotgraph.rotation import build_rotation_graph
from rotgraph.structure import build_quotient
from rotgraph.graphs import delete_twin_edges


@pytest.fixture(scope="module")
def spk23():
    return build_rotation_graph(complete_split(2, 3))


def test_bfs_matches_networkx(spk23):
    g = nx.Graph(spk23.edge_array().tolist())
    for s in (0, 17, 50):
        want = nx.single_source_shortest_path_length(g, s)
        got = bfs_levels(spk23, s)
        assert all(got[t] == d for t, d in want.items())


def test_bfs_on_irregular_graph():
    # rotation graphs are (n-1)-regular; exercise the CSR path with a hand-made irregular one
    RG = build_rotation_graph(path(4))
    RG.__dict__["_block"] = False
    g = nx.Graph(RG.edge_array().tolist())
    assert bfs_levels(RG, 3).tolist() == [nx.shortest_path_length(g, 3, t) for t in range(len(RG))]


def test_triangle_inequality_and_lipschitz(spk23):
    D = np.stack([bfs_levels(spk23, s) for s in range(len(spk23))]).astype(int)
    assert np.array_equal(D, D.T)
    for k in range(len(spk23)):
        assert np.all(D <= D[:, [k]] + D[[k], :])
    e = spk23.edge_array()
    assert np.all(np.abs(D[e[:, 0]] - D[e[:, 1]]) <= 1)


def test_profile_and_path(spk23):
    prof = bfs_from(spk23, 0)
    assert prof.eccentricity == int(prof.dist.max())
    t = prof.farthest[0]
    p = shortest_path(spk23, 0, t)
    assert len(p) - 1 == prof.eccentricity == distance(spk23, 0, t)
    assert all(spk23.has_edge(a, b) for a, b in zip(p, p[1:]))


def test_orbits_of_permutohedron():
    G = complete(4)
    RG = build_rotation_graph(G)
    orb = orbit_reduce(G, RG, symmetric_generators(list(range(4)), 4))
    assert orb.count == 1 and orb.sizes.tolist() == [24]


def test_orbit_reduce_rejects_non_automorphism():
    G = path(4)
    RG = build_rotation_graph(G)
    with pytest.raises(ValueError):
        orbit_reduce(G, RG, [[1, 0, 2, 3]])


def test_orbit_count_k23():
    G = complete_bipartite(2, 3)
    RG = build_rotation_graph(G)
    orb = orbit_reduce(G, RG, twin_class_generators(G))
    assert orb.sizes.sum() == len(RG)
    assert orb.count >= len(RG) // 12
    prof = [bfs_from(RG, i).eccentricity for i in range(len(RG))]
    for o in range(orb.count):
        assert len({prof[i] for i in np.flatnonzero(orb.labels == o)}) == 1


@pytest.mark.parametrize("G", [complete_bipartite(2, 3), complete_split(2, 4), path(5)])
def test_orbit_diameter_equals_all_sources(G):
    RG = build_rotation_graph(G, edge_labels=False)
    gens = twin_class_generators(G)
    orb = orbit_reduce(G, RG, gens) if gens else None
    assert diameter(RG, orb).value == diameter(RG).value


def test_diameter_checkpoint_resume(tmp_path):
    RG = build_rotation_graph(complete_bipartite(2, 3), edge_labels=False)
    ck = tmp_path / "ck.json"
    first = diameter(RG, checkpoint=ck)
    data = json.loads(ck.read_text())
    assert len(data["done"]) == len(RG)
    again = diameter(RG, checkpoint=ck)
    assert again.value == first.value == 8


def test_diameter_time_budget():
    RG = build_rotation_graph(complete_split(2, 4), edge_labels=False)
    with pytest.raises(BudgetExceededError) as err:
        diameter(RG, time_budget=1e-9)
    assert err.value.partial["sources_run"] >= 1


def test_diameter_workers_agree():
    RG = build_rotation_graph(complete_bipartite(2, 3), edge_labels=False)
    assert diameter(RG, workers=2).value == diameter(RG).value


def test_closed_forms():
    assert [spk_diameter_formula(2, q) for q in range(2, 9)] == [5, 8, 12, 16, 20, 25, 31]
    assert spk_diameter_formula(1, 6) == 2 * 6
    assert kpq_lower_bound(2, 4) == 11
    assert broom_upper_bound(3) == 8.0


def test_kpq_bounds_check_flags_bad_value():
    assert kpq_bounds_check(2, 4, 11).passed
    assert not kpq_bounds_check(2, 4, 10).passed
    assert not kpq_bounds_check(2, 4, 12).passed


def test_parity_on_walks(spk23):
    assert parity_suite(spk23, walks=100, seed=3).passed
    w = random_walks(spk23, 1, 0)[0]
    assert rotation_parity_check(spk23, w).passed


def test_parity_check_can_fail(spk23):
    walk = [0, int(spk23.neighbors(0)[0])]
    bad = build_rotation_graph(complete_split(2, 3))
    bad.pair_labels = bad.pair_labels.copy()
    bad.pair_labels[:] = bad.pair_code(2, 3)
    assert not rotation_parity_check(bad, walk).passed


def test_twin_rotation_count():
    RG = build_rotation_graph(complete(4))
    assert twin_rotation_count_check(RG, (2, 3)).passed
    with pytest.raises(ValueError):
        twin_rotation_count_check(build_rotation_graph(path(4)), (1, 2))


def test_geodesic_weight_range_counts_labels():
    RG = build_rotation_graph(complete(3))
    w = np.ones(RG.indices.size, dtype=np.int64)
    mn, mx, dist = geodesic_weight_range(RG, 0, w)
    assert np.array_equal(mn, dist) and np.array_equal(mx, dist)


def test_quotient_distance_dichotomy_and_failure():
    G = complete(4)
    Q = build_quotient(build_rotation_graph(G), (2, 3), build_rotation_graph(delete_twin_edges(G, (2, 3))))
    assert quotient_distance_check(Q).passed
    Q.special_edges = Q.special_edges[:0]
    assert not quotient_distance_check(Q).passed


def test_witness_fixture():
    names = sorted(load_witnesses())
    assert names == ["spk23_far", "spk26_far", "spk27_far"]
    G, T, T2, d = witness_trees("spk23_far")
    RG = build_rotation_graph(G)
    assert distance(RG, RG.ordinal(T), RG.ordinal(T2)) == d == 8


@pytest.mark.parametrize("p,q", [(1, 3), (1, 4), (1, 6), (1, 7), (3, 2), (3, 3)])
def test_spk_formula_against_bfs(p, q):
    from rotgraph.metrics import graph_diameter

    assert graph_diameter(complete_split(p, q)).value == spk_diameter_formula(p, q)
