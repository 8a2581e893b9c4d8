from __future__ import annotations

from math import factorial

import pytest

from rotgraph.graphs import complete, complete_split, delete_twin_edges, path
from rotgraph.rotation import build_rotation_graph
from rotgraph.structure import (
    FALSE_TWIN,
    SIMPLICIAL,
    TRUE_TWIN,
    all_families,
    build_family_index,
    build_quotient,
    embedded_copies,
    extension_choices,
    family_P,
    family_Ptilde,
    family_Px,
    is_W_special,
    make_extension,
    project,
    verify_edge_decomposition,
    verify_families,
    verify_partition,
)
from rotgraph.trees import is_valid, path_tree, tree_from_order


def test_family_Px_on_path():
    G = path(3)
    T = tree_from_order(G, [1, 0, 2])
    fam = family_Px(G, [2], T)
    # λ = 1 at vertex 2, so levels 0..2
    assert len(fam) == 3
    assert [S.depth[3] for S in fam] == [0, 1, 2]


def test_family_P_is_a_path_of_length_2d_plus_2():
    G = complete(3)
    T = path_tree([0, 1, 2])
    fam = family_P(G, 1, T)
    assert len(fam) == 2 * (1 + 1)
    big = build_rotation_graph(make_extension(TRUE_TWIN, G, 1).big)
    idx = [big.ordinal(S) for S in fam]
    for a, b in zip(idx, idx[1:]):
        assert big.has_edge(a, b)


def test_family_Ptilde_for_leaf():
    G = path(3)
    T = tree_from_order(G, [1, 0, 2])
    fam = family_Ptilde(G, 0, T)
    assert len(fam) == 2 * 2 - 1
    H = make_extension(FALSE_TWIN, G, 0).big
    assert all(is_valid(H, S) for S in fam)


@pytest.mark.parametrize("kind", [SIMPLICIAL, TRUE_TWIN, FALSE_TWIN])
def test_atlas_extensions(atlas, kind):
    for name, G in atlas:
        if G.n > 4:
            continue
        small = build_rotation_graph(G)
        for k, anchor in extension_choices(G):
            if k != kind:
                continue
            ext = make_extension(k, G, anchor)
            big = build_rotation_graph(ext.big)
            for rep in verify_families(ext, small, big, name):
                assert rep.passed, str(rep)


def test_partition_check_can_fail():
    G = complete_split(2, 2)
    ext = make_extension(TRUE_TWIN, G, 0)
    small, big = build_rotation_graph(G), build_rotation_graph(ext.big)
    fams = all_families(ext, small)
    assert verify_partition(big, fams).passed
    broken = [f[:-1] if k == 0 else f for k, f in enumerate(fams)]
    assert not verify_partition(big, broken).passed
    dup = fams + [fams[0]]
    assert not verify_partition(big, dup).passed


def test_decomposition_catalog_counts_cases():
    G = path(4)
    ext = make_extension(SIMPLICIAL, G, (1, 2))
    fi = build_family_index(ext, build_rotation_graph(G), build_rotation_graph(ext.big))
    rep = verify_edge_decomposition(fi, "P4")
    assert rep.passed
    assert sum(rep.details["inter_edges_by_case"].values()) == rep.details["inter_edges"]


def test_embedded_copy_images():
    G = complete_split(2, 2)
    ext = make_extension(SIMPLICIAL, G, (0, 1))
    small = build_rotation_graph(G)
    fi = build_family_index(ext, small, build_rotation_graph(ext.big))
    for anchor in ("root", "deepest"):
        rep, image = embedded_copies(fi, anchor)
        assert rep.passed and len(image) == len(small)


def test_w_special_and_projection():
    G = complete(4)
    W = (2, 3)
    T = path_tree([0, 1, 2, 3])
    ok, L, q = is_W_special(G, W, T)
    assert ok and L == [2, 3] and q == 1
    H = delete_twin_edges(G, W)
    S = project(G, W, T)
    assert is_valid(H, S) and S.parent[2] == S.parent[3] == 1
    T2 = path_tree([2, 0, 1, 3])
    assert not is_W_special(G, W, T2)[0]
    assert project(G, W, T2) == T2


@pytest.mark.parametrize(
    "G,W,fibers",
    [
        (complete(4), (2, 3), {1: 20, 2: 2}),
        (complete_split(2, 3), (0, 1), {1: 86, 2: 6}),
        (complete_split(3, 3), (0, 1, 2), {1: 492, 2: 54, 6: 6}),
    ],
)
def test_quotients(G, W, fibers):
    Q = build_quotient(build_rotation_graph(G), W, build_rotation_graph(delete_twin_edges(G, W)))
    assert Q.report.passed, str(Q.report)
    assert dict(Q.fiber_sizes()) == fibers
    assert set(Q.fiber_sizes()) <= {factorial(k) for k in range(1, len(W) + 1)}


def test_quotient_detects_wrong_target():
    G = complete(4)
    Q = build_quotient(build_rotation_graph(G), (2, 3), build_rotation_graph(G))
    assert not Q.report.passed
    assert {"target_graph_is_not_G_minus_S": True} in Q.report.witnesses
