"""Rotations of search trees and explicit rotation graphs.

The builder works directly on tree keys (parent arrays as bytes, root byte
255) because it is the hot loop: R(K_{2,8}) has about 1.7 million trees.
"""

from __future__ import annotations

import json
import logging
import struct
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .graphs import Graph
from .trees import KEY_ROOT, ElimTree, TreeError, all_valid_trees_bruteforce, tree_from_order, tree_str

log = logging.getLogger(__name__)

DEFAULT_CAP = 5_000_000


class CapExceededError(RuntimeError):
    """The tree count passed the configured cap; ``partial`` holds the count so far."""

    def __init__(self, cap: int, partial: int):
        super().__init__(f"rotation graph exceeds cap of {cap} trees (reached {partial})")
        self.cap = cap
        self.partial = partial


class RotationError(ValueError):
    """Rotation requested on a pair that is not a parent/child edge."""


# single rotations -------------------------------------------------------------------


def rotate(G: Graph, T: ElimTree, u: int, v: int) -> ElimTree:
    """The ``uv``-rotation of ``T`` where ``v`` is a child of ``u``."""
    if T.parent[v] != u:
        raise RotationError(f"{v} is not a child of {u}")
    parent = list(T.parent)
    parent[v] = T.parent[u]
    parent[u] = v
    au = G.adj[u]
    sub = T.subtree_masks
    for c in T.children[v]:
        if sub[c] & au:
            parent[c] = u
    return ElimTree(parent)


def neighbors(G: Graph, T: ElimTree) -> list[tuple[ElimTree, tuple[int, int]]]:
    """One rotated tree per tree edge, paired with ``(parent, child)``."""
    out = [(rotate(G, T, u, v), (u, v)) for u, v in T.edges()]
    keys = {S.key for S, _ in out}
    if len(keys) != len(out):
        log.warning("parallel rotations at %s", T.key.hex())
    return out


def _rotations(adj: tuple[int, ...], key: bytes, n: int) -> tuple[list[bytes], list[int]]:
    """Rotated keys of ``key`` and the unordered pair code ``min*n+max`` of each."""
    par = list(key)
    ch: list[list[int]] = [[] for _ in range(n)]
    root = -1
    for v, p in enumerate(par):
        if p == KEY_ROOT:
            root = v
        else:
            ch[p].append(v)
    order = [root]
    for x in order:
        order.extend(ch[x])
    mask = [1 << v for v in range(n)]
    for x in reversed(order):
        p = par[x]
        if p != KEY_ROOT:
            mask[p] |= mask[x]
    out = []
    pairs = []
    for v in order[1:]:
        u = par[v]
        new = par[:]
        new[v] = par[u]
        new[u] = v
        au = adj[u]
        for c in ch[v]:
            if mask[c] & au:
                new[c] = u
        out.append(bytes(new))
        pairs.append(u * n + v if u < v else v * n + u)
    return out, pairs


# the rotation graph ------------------------------------------------------------------


@dataclass
class RotationGraph:
    """All search trees of ``graph`` with CSR adjacency.

    ``rows[i]`` is the key of tree ``i`` as a uint8 vector.  ``pair_labels``
    aligns with ``indices`` and stores ``min*n+max`` of the rotated pair.
    """

    graph: Graph
    keys: list[bytes]
    index: dict[bytes, int]
    indptr: np.ndarray
    indices: np.ndarray
    pair_labels: np.ndarray | None = None
    build_seconds: float = 0.0
    parallel_rotations: int = 0
    _trees: dict[int, ElimTree] = field(default_factory=dict, repr=False)

    @property
    def n_vertices(self) -> int:
        return len(self.keys)

    def __len__(self) -> int:
        return len(self.keys)

    @property
    def n_edges(self) -> int:
        return int(self.indices.size) // 2

    @property
    def rows(self) -> np.ndarray:
        cached = self.__dict__.get("_rows")
        if cached is None:
            cached = np.frombuffer(b"".join(self.keys), dtype=np.uint8).reshape(len(self.keys), self.graph.n)
            self.__dict__["_rows"] = cached
        return cached

    def tree(self, i: int) -> ElimTree:
        T = self._trees.get(i)
        if T is None:
            T = ElimTree.from_key(self.keys[i])
            if len(self._trees) < 100_000:
                self._trees[i] = T
        return T

    def trees(self):
        return (self.tree(i) for i in range(len(self.keys)))

    def ordinal(self, T: ElimTree | bytes) -> int:
        key = T if isinstance(T, (bytes, bytearray)) else T.key
        try:
            return self.index[bytes(key)]
        except KeyError:
            raise KeyError(f"tree {bytes(key).hex()} is not a vertex of this rotation graph") from None

    def __contains__(self, T: ElimTree | bytes) -> bool:
        key = T if isinstance(T, (bytes, bytearray)) else T.key
        return bytes(key) in self.index

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    def neighbor_pairs(self, i: int) -> list[tuple[int, int]]:
        """``(neighbour, pair code)`` for tree ``i``."""
        if self.pair_labels is None:
            raise ValueError("rotation graph was built without edge labels")
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return list(zip(self.indices[lo:hi].tolist(), self.pair_labels[lo:hi].tolist()))

    def pair_code(self, u: int, v: int) -> int:
        n = self.graph.n
        return min(u, v) * n + max(u, v)

    def decode_pair(self, code: int) -> tuple[int, int]:
        return divmod(int(code), self.graph.n)

    def has_edge(self, a: int, b: int) -> bool:
        row = self.neighbors(a)
        k = int(np.searchsorted(row, b))
        return k < row.size and int(row[k]) == b

    def edge_label(self, a: int, b: int) -> tuple[int, int]:
        if self.pair_labels is None:
            raise ValueError("rotation graph was built without edge labels")
        lo = self.indptr[a]
        row = self.neighbors(a)
        k = int(np.searchsorted(row, b))
        if k >= row.size or int(row[k]) != b:
            raise KeyError(f"{a} and {b} are not adjacent")
        return self.decode_pair(self.pair_labels[lo + k])

    def edge_array(self) -> np.ndarray:
        """Undirected edges as an ``(m, 2)`` array with ``a < b``."""
        src = np.repeat(np.arange(len(self.keys), dtype=np.int32), np.diff(self.indptr))
        keep = src < self.indices
        return np.stack([src[keep], self.indices[keep]], axis=1)

    def edge_set(self) -> set[tuple[int, int]]:
        return set(map(tuple, self.edge_array().tolist()))

    def degree(self, i: int) -> int:
        return int(self.indptr[i + 1] - self.indptr[i])

    def csr_matrix(self):
        from scipy.sparse import csr_matrix

        data = np.ones(self.indices.size, dtype=np.int8)
        N = len(self.keys)
        return csr_matrix((data, self.indices, self.indptr), shape=(N, N))

    def label(self, i: int) -> str:
        """Elimination-order string for path trees, nested parentheses otherwise."""
        T = self.tree(i)
        if T.is_path() and self.graph.n <= 9:
            return "".join(self.graph.label(v) for v in T.order)
        return tree_str(T, self.graph)

    def stats(self) -> dict:
        return {
            "vertices": self.n_vertices,
            "edges": self.n_edges,
            "graph_n": self.graph.n,
            "graph_edges": self.graph.edge_count,
            "build_seconds": round(self.build_seconds, 3),
            "parallel_rotations": self.parallel_rotations,
        }

    # exports -------------------------------------------------------------------

    def to_dot(self, colors: list[int] | None = None) -> str:
        palette = ["#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00", "#a65628"]
        lines = ["graph R {"]
        for i in range(len(self.keys)):
            attrs = f'label="{self.label(i)}"'
            if colors is not None:
                attrs += f', style=filled, fillcolor="{palette[colors[i] % len(palette)]}"'
            lines.append(f"  {i} [{attrs}];")
        for a, b in self.edge_array().tolist():
            if self.pair_labels is not None:
                u, v = self.edge_label(a, b)
                lines.append(f'  {a} -- {b} [label="{self.graph.label(u)}{self.graph.label(v)}"];')
            else:
                lines.append(f"  {a} -- {b};")
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        from .trees import tree_to_json

        edges = []
        for a, b in self.edge_array().tolist():
            if self.pair_labels is not None:
                u, v = self.edge_label(a, b)
                edges.append([a, b, f"{self.graph.label(u)}{self.graph.label(v)}"])
            else:
                edges.append([a, b])
        return {"trees": [tree_to_json(self.tree(i)) for i in range(len(self.keys))], "edges": edges}

    def write_binary(self, path: str | Path) -> None:
        """Header ``RGE1``, then ``n``, ``N``, ``m`` as uint32/uint64, keys, then int32 edge pairs."""
        edges = self.edge_array().astype("<i4")
        with open(path, "wb") as fh:
            fh.write(b"RGE1")
            fh.write(struct.pack("<IQQ", self.graph.n, len(self.keys), edges.shape[0]))
            fh.write(b"".join(self.keys))
            fh.write(edges.tobytes())


def read_binary(path: str | Path) -> tuple[int, list[bytes], np.ndarray]:
    """Inverse of :meth:`RotationGraph.write_binary`: ``(n, keys, edges)``."""
    data = Path(path).read_bytes()
    if data[:4] != b"RGE1":
        raise ValueError("not a rotation-graph binary file")
    n, N, m = struct.unpack_from("<IQQ", data, 4)
    off = 4 + struct.calcsize("<IQQ")
    keys = [data[off + i * n : off + (i + 1) * n] for i in range(N)]
    off += N * n
    edges = np.frombuffer(data, dtype="<i4", count=2 * m, offset=off).reshape(m, 2)
    return n, keys, edges


def build_rotation_graph(
    G: Graph,
    cap: int = DEFAULT_CAP,
    edge_labels: bool = True,
    cross_check: bool | None = None,
) -> RotationGraph:
    """BFS over search trees from the tree of the identity order.

    Each BFS level's newly found keys are sorted before receiving ordinals,
    so ordinals are deterministic.  ``cross_check`` (default: ``n <= 7``)
    compares the vertex set with the trees of all ``n!`` elimination orders.
    """
    G.require_connected()
    if G.n > 253:
        raise ValueError("graphs above 253 vertices are not supported")
    t0 = time.perf_counter()
    n, adj = G.n, G.adj
    seed = tree_from_order(G, list(range(n))).key
    keys = [seed]
    index = {seed: 0}
    nbr_chunks: list[np.ndarray] = []
    lab_chunks: list[np.ndarray] = []
    degrees: list[int] = []
    parallel = 0
    lo = 0
    while lo < len(keys):
        hi = len(keys)
        level_nbrs: list[bytes] = []
        level_pairs: list[int] = []
        fresh: set[bytes] = set()
        for i in range(lo, hi):
            out, pairs = _rotations(adj, keys[i], n)
            if len(set(out)) != len(out):
                parallel += 1
                log.warning("parallel rotations at %s; deduplicating", keys[i].hex())
                seen: dict[bytes, int] = {}
                for k, p in zip(out, pairs):
                    seen.setdefault(k, p)
                out, pairs = list(seen), list(seen.values())
            degrees.append(len(out))
            level_nbrs.extend(out)
            level_pairs.extend(pairs)
            for k in out:
                if k not in index:
                    fresh.add(k)
        for k in sorted(fresh):
            index[k] = len(keys)
            keys.append(k)
        if len(keys) > cap:
            raise CapExceededError(cap, len(keys))
        nbr_chunks.append(np.fromiter((index[k] for k in level_nbrs), dtype=np.int32, count=len(level_nbrs)))
        if edge_labels:
            lab_chunks.append(np.asarray(level_pairs, dtype=np.uint16))
        lo = hi

    indices = np.concatenate(nbr_chunks) if nbr_chunks else np.zeros(0, np.int32)
    indptr = np.zeros(len(keys) + 1, dtype=np.int64)
    np.cumsum(np.asarray(degrees, dtype=np.int64), out=indptr[1:])
    labels = np.concatenate(lab_chunks) if edge_labels and lab_chunks else None
    # sort each row by neighbour ordinal
    src = np.repeat(np.arange(len(keys), dtype=np.int64), np.diff(indptr))
    perm = np.lexsort((indices, src))
    indices = np.ascontiguousarray(indices[perm])
    if labels is not None:
        labels = np.ascontiguousarray(labels[perm])

    RG = RotationGraph(G, keys, index, indptr, indices, labels, time.perf_counter() - t0, parallel)
    if cross_check is None:
        cross_check = n <= 7
    if cross_check:
        brute = all_valid_trees_bruteforce(G)
        if brute != set(index):
            raise AssertionError(
                f"BFS found {len(index)} trees, elimination orders give {len(brute)}"
            )
    return RG


def check_symmetric(RG: RotationGraph) -> bool:
    """Adjacency is symmetric with matching pair labels and no loops."""
    E = RG.csr_matrix()
    if (E != E.T).nnz:
        return False
    src = np.repeat(np.arange(len(RG.keys)), np.diff(RG.indptr))
    if np.any(src == RG.indices):
        return False
    if RG.pair_labels is not None:
        from scipy.sparse import csr_matrix

        N = len(RG.keys)
        L = csr_matrix((RG.pair_labels.astype(np.int64) + 1, RG.indices, RG.indptr), shape=(N, N))
        if (L != L.T).nnz:
            return False
    return True


def save_json(RG: RotationGraph, path: str | Path) -> None:
    Path(path).write_text(json.dumps(RG.to_json()) + "\n", encoding="utf-8")


__all__ = [
    "CapExceededError",
    "RotationError",
    "RotationGraph",
    "TreeError",
    "build_rotation_graph",
    "check_symmetric",
    "neighbors",
    "read_binary",
    "rotate",
    "save_json",
]
