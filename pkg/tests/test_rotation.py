from __future__ import annotations

from math import comb, factorial

import networkx as nx
import numpy as np
import pytest

from rotgraph.graphs import complete, complete_bipartite, complete_split, path, star
from rotgraph.rotation import (
    CapExceededError,
    RotationError,
    build_rotation_graph,
    check_symmetric,
    neighbors,
    read_binary,
    rotate,
    save_json,
)
from rotgraph.trees import all_valid_trees_bruteforce, is_valid, path_tree, tree_from_order


def catalan(n):
    return comb(2 * n, n) // (n + 1)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_complete_counts(n):
    RG = build_rotation_graph(complete(n))
    assert len(RG) == factorial(n)
    assert RG.n_edges == factorial(n) * (n - 1) // 2


@pytest.mark.parametrize("n", [3, 4, 5, 6, 7, 8])
def test_path_counts(n):
    assert len(build_rotation_graph(path(n))) == catalan(n)


def test_star_is_stellohedron():
    # stellohedron vertex count: sum_k q!/k!
    q = 4
    want = sum(factorial(q) // factorial(k) for k in range(q + 1))
    assert len(build_rotation_graph(star(q))) == want


def test_spk22_has_22_trees():
    assert len(build_rotation_graph(complete_split(2, 2))) == 22


def test_rotation_involution():
    G = path(5)
    T = tree_from_order(G, [2, 0, 4, 1, 3])
    for u, v in T.edges():
        S = rotate(G, T, u, v)
        assert is_valid(G, S)
        assert S.parent[u] == v
        assert rotate(G, S, v, u) == T
    with pytest.raises(RotationError):
        rotate(G, T, 0, 2)


def test_degree_is_tree_edge_count(atlas):
    for _, G in atlas[:20]:
        RG = build_rotation_graph(G)
        assert np.all(np.diff(RG.indptr) == G.n - 1)


def test_vertex_sets_match_bruteforce(atlas):
    for name, G in atlas:
        RG = build_rotation_graph(G, cross_check=False)
        assert set(RG.keys) == all_valid_trees_bruteforce(G), name
        assert check_symmetric(RG)


def test_neighbors_match_single_rotations():
    G = complete_bipartite(2, 3)
    RG = build_rotation_graph(G)
    for i in range(0, len(RG), 7):
        T = RG.tree(i)
        want = sorted(RG.ordinal(S) for S, _ in neighbors(G, T))
        assert RG.neighbors(i).tolist() == want
        for S, (u, v) in neighbors(G, T):
            assert RG.edge_label(i, RG.ordinal(S)) == (min(u, v), max(u, v))


def test_deterministic_ordinals():
    a = build_rotation_graph(complete_split(2, 3))
    b = build_rotation_graph(complete_split(2, 3))
    assert a.keys == b.keys and np.array_equal(a.indices, b.indices)


def test_permutohedron_is_connected_and_bipartite():
    RG = build_rotation_graph(complete(4))
    g = nx.Graph(RG.edge_array().tolist())
    assert nx.is_connected(g) and nx.is_bipartite(g)


def test_cap():
    with pytest.raises(CapExceededError) as err:
        build_rotation_graph(complete(7), cap=100)
    assert err.value.partial > 100


def test_exports(tmp_path):
    RG = build_rotation_graph(complete(3))
    dot = RG.to_dot()
    assert dot.count(" -- ") == RG.n_edges
    save_json(RG, tmp_path / "r.json")
    RG.write_binary(tmp_path / "r.bin")
    n, keys, edges = read_binary(tmp_path / "r.bin")
    assert n == 3 and keys == RG.keys and edges.shape == (RG.n_edges, 2)
    assert RG.label(RG.ordinal(path_tree([2, 0, 1]))) == "312"
