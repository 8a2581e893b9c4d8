from __future__ import annotations

from itertools import permutations
from math import factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rotgraph.graphs import Graph, complete, complete_split, path
from rotgraph.trees import (
    ABSENT,
    ROOT,
    ElimTree,
    TreeError,
    all_rooted_trees,
    all_valid_trees_bruteforce,
    eliminate,
    insert,
    is_valid,
    lam,
    path_tree,
    relabel,
    relative_order,
    swap_map,
    tree_from_json,
    tree_from_order,
    tree_str,
    tree_to_json,
)


def test_path_graph_order():
    T = tree_from_order(path(4), [1, 0, 2, 3])
    assert T.root == 1
    assert sorted(T.children[1]) == [0, 2]
    assert T.parent[3] == 2
    assert is_valid(path(4), T)


def test_complete_graph_trees_are_paths():
    for sigma in permutations(range(4)):
        T = tree_from_order(complete(4), sigma)
        assert T.is_path() and T.path_order() == list(sigma)


def test_bruteforce_count_matches_oracle():
    # valid search trees are exactly the rooted trees passing the component test
    for G in [path(4), complete_split(2, 2), Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])]:
        by_orders = all_valid_trees_bruteforce(G)
        by_filter = {T.key for T in all_rooted_trees(G.n) if is_valid(G, T)}
        assert by_orders == by_filter
    assert len(all_valid_trees_bruteforce(complete(4))) == factorial(4)


def test_invalid_tree_rejected():
    # star centred at a leaf of P3 is not a search tree
    T = ElimTree([ROOT, 0, 0])
    assert not is_valid(path(3), T)
    with pytest.raises(TreeError):
        ElimTree([ROOT, ROOT])
    with pytest.raises(TreeError):
        ElimTree([1, 0, ROOT])


def test_insert_and_eliminate_roundtrip():
    T = path_tree([0, 1, 2])
    for i in range(4):
        S = insert(T, i, 3, 2)
        assert S.depth[3] == i
        assert eliminate(S, 3) == T
    with pytest.raises(TreeError):
        insert(T, 5, 3, 2)


def test_eliminate_branching_vertex_fails():
    T = ElimTree([1, ROOT, 1])
    with pytest.raises(TreeError):
        eliminate(T, 1)
    assert eliminate(T, 0, shrink=False).parent == (ABSENT, ROOT, 1)


def test_lam():
    T = path_tree([2, 0, 1, 3])
    assert lam(T, [0, 1]) == (2, 1)
    S = ElimTree([1, ROOT, 1])
    with pytest.raises(TreeError):
        lam(S, [0, 2])


def test_relabel_and_relative_order():
    T = path_tree([0, 1, 2])
    S = relabel(T, swap_map(3, 0, 2))
    assert S.path_order() == [2, 1, 0]
    assert relative_order(T, 0, 2) == 1 and relative_order(S, 0, 2) == -1
    assert relative_order(ElimTree([1, ROOT, 1]), 0, 2) == 0


def test_json_roundtrip():
    T = tree_from_order(path(5), [2, 0, 4, 1, 3])
    assert tree_from_json(tree_to_json(T)) == T
    assert tree_from_json({"order": [1, 0, 2]}) == path_tree([1, 0, 2])
    assert tree_str(T) == "2(0(1),4(3))"


@st.composite
def graph_and_order(draw):
    n = draw(st.integers(2, 7))
    edges = [(v, draw(st.integers(0, v - 1))) for v in range(1, n)]
    extra = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=8))
    edges += [(a, b) for a, b in extra if a != b]
    order = draw(st.permutations(range(n)))
    return Graph.from_edges(n, edges), order


@settings(max_examples=150, deadline=None)
@given(graph_and_order())
def test_orders_give_valid_trees(data):
    G, order = data
    T = tree_from_order(G, order)
    assert is_valid(G, T)
    # a vertex is eliminated before all of its descendants
    pos = {v: k for k, v in enumerate(order)}
    for u, v in T.edges():
        assert pos[u] < pos[v]
