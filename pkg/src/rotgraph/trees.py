"""Search (elimination) trees stored as parent arrays.

``parent[v]`` is the parent id, ``ROOT`` for the root and ``ABSENT`` for ids
not in the tree.  ``ABSENT`` only appears after :func:`eliminate`; it keeps
the array width equal to the id universe so keys stay comparable.
"""

from __future__ import annotations

from functools import cached_property
from typing import Iterable, Sequence

from .graphs import DisconnectedGraphError, Graph, GraphError, _bits

ROOT = -1
ABSENT = -2
KEY_ROOT = 255
KEY_ABSENT = 254
MAX_VERTICES = 254


class TreeError(ValueError):
    """Malformed tree or violated operation precondition."""


class ElimTree:
    """Immutable rooted tree on a subset of ``0..len(parent)-1``."""

    __slots__ = ("parent", "__dict__")

    def __init__(self, parent: Sequence[int]):
        parent = tuple(int(p) for p in parent)
        n = len(parent)
        if n > MAX_VERTICES:
            raise TreeError(f"at most {MAX_VERTICES} vertices supported")
        roots = [v for v, p in enumerate(parent) if p == ROOT]
        if len(roots) != 1:
            raise TreeError(f"expected exactly one root, found {len(roots)}")
        for v, p in enumerate(parent):
            if p in (ROOT, ABSENT):
                continue
            if not 0 <= p < n or parent[p] == ABSENT or p == v:
                raise TreeError(f"vertex {v} has invalid parent {p}")
        self.parent = parent
        # acyclicity: every present vertex reaches the root
        if len(self.order) != sum(1 for p in parent if p != ABSENT):
            raise TreeError("parent relation contains a cycle")

    # identity ---------------------------------------------------------------

    @classmethod
    def from_key(cls, key: bytes) -> ElimTree:
        return cls([ROOT if b == KEY_ROOT else ABSENT if b == KEY_ABSENT else b for b in key])

    @cached_property
    def key(self) -> bytes:
        return bytes(KEY_ROOT if p == ROOT else KEY_ABSENT if p == ABSENT else p for p in self.parent)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ElimTree) and self.parent == other.parent

    def __hash__(self) -> int:
        return hash(self.parent)

    def __repr__(self) -> str:
        return f"ElimTree(root={self.root}, parent={list(self.parent)})"

    # structure --------------------------------------------------------------

    @property
    def size(self) -> int:
        """Width of the id universe (not the number of present vertices)."""
        return len(self.parent)

    @cached_property
    def vertices(self) -> tuple[int, ...]:
        return tuple(v for v, p in enumerate(self.parent) if p != ABSENT)

    @cached_property
    def vertex_mask(self) -> int:
        mask = 0
        for v in self.vertices:
            mask |= 1 << v
        return mask

    def __contains__(self, v: int) -> bool:
        return 0 <= v < len(self.parent) and self.parent[v] != ABSENT

    @cached_property
    def root(self) -> int:
        return self.parent.index(ROOT)

    @cached_property
    def children(self) -> tuple[tuple[int, ...], ...]:
        ch: list[list[int]] = [[] for _ in self.parent]
        for v, p in enumerate(self.parent):
            if p >= 0:
                ch[p].append(v)
        return tuple(tuple(c) for c in ch)

    @cached_property
    def order(self) -> tuple[int, ...]:
        """Vertices in BFS order from the root."""
        out = [self.parent.index(ROOT)]
        for x in out:
            out.extend(self.children[x])
            if len(out) > len(self.parent):
                break
        return tuple(out)

    @cached_property
    def depth(self) -> tuple[int, ...]:
        d = [-1] * len(self.parent)
        for x in self.order:
            p = self.parent[x]
            d[x] = 0 if p == ROOT else d[p] + 1
        return tuple(d)

    @cached_property
    def subtree_masks(self) -> tuple[int, ...]:
        mask = [1 << v if p != ABSENT else 0 for v, p in enumerate(self.parent)]
        for x in reversed(self.order):
            p = self.parent[x]
            if p >= 0:
                mask[p] |= mask[x]
        return tuple(mask)

    def subtree_vertices(self, v: int) -> list[int]:
        return _bits(self.subtree_masks[v])

    def levels(self) -> list[list[int]]:
        out: list[list[int]] = []
        for x in self.order:
            d = self.depth[x]
            if d == len(out):
                out.append([])
            out[d].append(x)
        return out

    def branch_to(self, v: int) -> list[int]:
        """Root-to-``v`` path ``a_0, ..., a_d``."""
        self._check(v)
        path = [v]
        while self.parent[path[-1]] != ROOT:
            path.append(self.parent[path[-1]])
        return path[::-1]

    def is_ancestor(self, a: int, b: int) -> bool:
        """True if ``a`` is ``b`` or lies above it."""
        return bool(self.subtree_masks[a] >> b & 1)

    def same_branch(self, a: int, b: int) -> bool:
        return self.is_ancestor(a, b) or self.is_ancestor(b, a)

    def is_leaf(self, v: int) -> bool:
        self._check(v)
        return not self.children[v]

    def is_path(self) -> bool:
        return all(len(c) <= 1 for c in self.children)

    def path_order(self) -> list[int]:
        if not self.is_path():
            raise TreeError("tree is not a path")
        return list(self.order)

    def edges(self) -> list[tuple[int, int]]:
        """Tree edges as ``(parent, child)`` in BFS order of the child."""
        return [(self.parent[v], v) for v in self.order[1:]]

    def _check(self, v: int) -> None:
        if v not in self:
            raise TreeError(f"vertex {v} is not in the tree")


# construction -----------------------------------------------------------------


def tree_from_order(G: Graph, order: Sequence[int]) -> ElimTree:
    """Search tree obtained by deleting vertices of ``G`` in ``order``.

    Built in reverse with union-find: when ``v`` is re-added, the current
    roots of its later neighbours' components become children of ``v``.
    """
    if sorted(order) != list(range(G.n)):
        raise TreeError("order is not a permutation of the vertex set")
    G.require_connected()
    uf = list(range(G.n))

    def find(x: int) -> int:
        while uf[x] != x:
            uf[x] = uf[uf[x]]
            x = uf[x]
        return x

    parent = [ROOT] * G.n
    seen = 0
    for v in reversed(order):
        for u in _bits(G.adj[v] & seen):
            r = find(u)
            if r != v:
                parent[r] = v
                uf[r] = v
        seen |= 1 << v
    return ElimTree(parent)


def path_tree(order: Sequence[int]) -> ElimTree:
    """Path tree with ``order[0]`` on top."""
    parent = [ABSENT] * (max(order) + 1)
    prev = ROOT
    for v in order:
        parent[v] = prev
        prev = v
    return ElimTree(parent)


def tree_from_children(n: int, root: int, children: dict[int, Iterable[int]]) -> ElimTree:
    parent = [ABSENT] * n
    parent[root] = ROOT
    for p, cs in children.items():
        for c in cs:
            parent[c] = p
    return ElimTree(parent)


def is_valid(G: Graph, T: ElimTree) -> bool:
    """Every non-root subtree is a component of ``G`` minus the shallower levels."""
    if T.size != G.n or len(T.vertices) != G.n:
        raise TreeError(f"tree spans {len(T.vertices)} of {T.size} ids, graph has {G.n}")
    if not G.is_connected():
        return False
    depth, sub = T.depth, T.subtree_masks
    above = [0] * (max(depth) + 2)
    for v in range(G.n):
        above[depth[v] + 1] |= 1 << v
    for d in range(1, len(above)):
        above[d] |= above[d - 1]
    for v in range(G.n):
        if v == T.root:
            continue
        within = G.full_mask & ~above[depth[v]]
        if G.component_mask(v, within) != sub[v]:
            return False
    return True


validate = is_valid


def lam(T: ElimTree, K: Iterable[int]) -> tuple[int, int]:
    """``(λ(T), v_λ)``: deepest level over ``K`` and the ``K`` vertex there."""
    ks = list(K)
    if not ks:
        raise TreeError("K must be non-empty")
    for k in ks:
        T._check(k)
    deepest = max(ks, key=lambda k: T.depth[k])
    for k in ks:
        if not T.is_ancestor(k, deepest):
            raise TreeError(f"K vertices {k} and {deepest} lie on different branches")
    return T.depth[deepest], deepest


# insertion / elimination --------------------------------------------------------


def insert(T: ElimTree, i: int, x: int, v: int) -> ElimTree:
    """``T(i, x, v)``: put ``x`` at level ``i`` of the branch to ``v``.

    ``i = 0`` makes ``x`` the new root, ``i = d+1`` hangs it below ``v``,
    otherwise ``x`` subdivides the edge ``a_{i-1} a_i``.
    """
    T._check(v)
    d = T.depth[v]
    if not 0 <= i <= d + 1:
        raise TreeError(f"level {i} out of range 0..{d + 1}")
    if x < T.size and T.parent[x] != ABSENT:
        raise TreeError(f"vertex {x} already in the tree")
    if x > T.size:
        raise TreeError(f"new vertex id {x} would leave a gap (size {T.size})")
    parent = list(T.parent) + ([ABSENT] if x == T.size else [])
    branch = T.branch_to(v)
    if i == 0:
        parent[branch[0]] = x
        parent[x] = ROOT
    elif i == d + 1:
        parent[x] = v
    else:
        parent[x] = branch[i - 1]
        parent[branch[i]] = x
    return ElimTree(parent)


def eliminate(T: ElimTree, u: int, shrink: bool = True) -> ElimTree:
    """``p(T, u)``: delete ``u``, reattaching its single child to its parent.

    With ``shrink`` the id universe drops by one when ``u`` is the largest id.
    """
    T._check(u)
    ch = T.children[u]
    if len(ch) > 1:
        raise TreeError(f"vertex {u} has {len(ch)} children; elimination undefined")
    if len(T.vertices) == 1:
        raise TreeError("cannot eliminate the only vertex")
    parent = list(T.parent)
    if ch:
        parent[ch[0]] = parent[u]
    parent[u] = ABSENT
    if shrink and u == len(parent) - 1:
        parent.pop()
    return ElimTree(parent)


def relabel(T: ElimTree, f: Sequence[int]) -> ElimTree:
    """``f*(T)``: image of ``T`` under the id bijection ``f``."""
    n = T.size
    if sorted(f) != list(range(n)):
        raise TreeError("f is not a bijection on the id universe")
    parent = [ABSENT] * n
    for v, p in enumerate(T.parent):
        if p == ABSENT:
            continue
        parent[f[v]] = ROOT if p == ROOT else f[p]
    return ElimTree(parent)


def swap_map(n: int, a: int, b: int) -> list[int]:
    """The transposition ``ρ_{a,b}`` on ``0..n-1``."""
    f = list(range(n))
    f[a], f[b] = b, a
    return f


def relative_order(T: ElimTree, u: int, v: int) -> int:
    """+1 if ``u`` is above ``v``, -1 if below, 0 if on different branches."""
    if T.is_ancestor(u, v):
        return 1
    if T.is_ancestor(v, u):
        return -1
    return 0


# enumeration / serialisation -------------------------------------------------------


def all_valid_trees_bruteforce(G: Graph) -> set[bytes]:
    """Keys of all search trees, via every elimination order (n! work)."""
    from itertools import permutations

    return {tree_from_order(G, sigma).key for sigma in permutations(range(G.n))}


def all_rooted_trees(n: int) -> Iterable[ElimTree]:
    """Every rooted spanning tree on ``0..n-1`` (n^(n-1) of them); for tiny oracles."""
    from itertools import product

    for root in range(n):
        others = [v for v in range(n) if v != root]
        for choice in product(range(n), repeat=len(others)):
            parent = [ROOT] * n
            ok = True
            for v, p in zip(others, choice):
                if p == v:
                    ok = False
                    break
                parent[v] = p
            if not ok:
                continue
            try:
                yield ElimTree(parent)
            except TreeError:
                continue


def tree_to_json(T: ElimTree) -> dict:
    return {"root": T.root, "parent": [p if p >= 0 else None for p in T.parent]}


def tree_from_json(data: dict, n: int | None = None) -> ElimTree:
    """Read ``{"root", "parent"}``; ``null`` marks the root.

    Also accepts ``{"order": [...]}`` for path trees and ``{"labels": [...]}``
    lists resolved by the caller.
    """
    if "order" in data:
        T = path_tree([int(v) for v in data["order"]])
    else:
        try:
            raw = data["parent"]
            parent = [ROOT if p is None else int(p) for p in raw]
        except (KeyError, TypeError, ValueError) as exc:
            raise TreeError(f"malformed tree JSON: {exc}") from exc
        T = ElimTree(parent)
        if "root" in data and int(data["root"]) != T.root:
            raise TreeError(f"root field {data['root']} disagrees with parent array")
    if n is not None and T.size != n:
        raise TreeError(f"tree has {T.size} ids, graph has {n}")
    return T


def tree_str(T: ElimTree, G: Graph | None = None) -> str:
    """Compact text: path trees as their order, others as nested parentheses."""
    name = (lambda v: G.label(v)) if G is not None else str
    if T.is_path():
        return "-".join(name(v) for v in T.order)

    def rec(v: int) -> str:
        ch = T.children[v]
        if not ch:
            return name(v)
        return name(v) + "(" + ",".join(rec(c) for c in ch) + ")"

    return rec(T.root)


__all__ = [
    "ABSENT",
    "ROOT",
    "DisconnectedGraphError",
    "ElimTree",
    "GraphError",
    "TreeError",
    "all_rooted_trees",
    "all_valid_trees_bruteforce",
    "eliminate",
    "insert",
    "is_valid",
    "lam",
    "path_tree",
    "relabel",
    "relative_order",
    "swap_map",
    "tree_from_children",
    "tree_from_json",
    "tree_from_order",
    "tree_str",
    "tree_to_json",
    "validate",
]
