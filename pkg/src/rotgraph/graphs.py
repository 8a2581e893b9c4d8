"""Small simple graphs with bitmask adjacency.

Vertices are the integers ``0..n-1``.  Every operation that adds a vertex
gives it id ``n`` so that tree encodings stay stable across operations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Iterable, Sequence


class GraphError(ValueError):
    """Invalid graph, vertex id or operation precondition."""


class DisconnectedGraphError(GraphError):
    """Raised by operations that need a connected graph."""


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


@dataclass(frozen=True)
class Graph:
    """Finite simple undirected graph.

    ``adj[v]`` is the open neighbourhood of ``v`` as a bitmask.
    """

    n: int
    adj: tuple[int, ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if self.n < 1:
            raise GraphError("a graph needs at least one vertex")
        if len(self.adj) != self.n:
            raise GraphError(f"adjacency has {len(self.adj)} rows for n={self.n}")
        full = (1 << self.n) - 1
        for v, mask in enumerate(self.adj):
            if mask & ~full:
                raise GraphError(f"vertex {v} has a neighbour outside 0..{self.n - 1}")
            if mask >> v & 1:
                raise GraphError(f"self-loop at vertex {v}")
            for u in _bits(mask):
                if not self.adj[u] >> v & 1:
                    raise GraphError(f"edge {v}-{u} is not symmetric")
        if self.labels is not None and len(self.labels) != self.n:
            raise GraphError("labels must have one entry per vertex")

    # construction ---------------------------------------------------------

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[tuple[int, int]],
        labels: Sequence[str] | None = None,
    ) -> Graph:
        adj = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return cls(n, tuple(adj), tuple(labels) if labels is not None else None)

    # queries ----------------------------------------------------------------

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def check_vertex(self, v: int) -> None:
        if not isinstance(v, int) or not 0 <= v < self.n:
            raise GraphError(f"invalid vertex id {v!r} for n={self.n}")

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def neighbors(self, v: int) -> list[int]:
        return _bits(self.adj[v])

    def closed_mask(self, v: int) -> int:
        return self.adj[v] | (1 << v)

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in _bits(self.adj[u]) if u < v]

    @property
    def edge_count(self) -> int:
        return sum(m.bit_count() for m in self.adj) // 2

    def label(self, v: int) -> str:
        return self.labels[v] if self.labels is not None else str(v)

    def with_labels(self, labels: Sequence[str] | None) -> Graph:
        return Graph(self.n, self.adj, tuple(labels) if labels is not None else None)

    def component_mask(self, v: int, within: int | None = None) -> int:
        """Vertex mask of the component of ``v`` in the subgraph induced by ``within``."""
        within = self.full_mask if within is None else within
        seen = 1 << v
        frontier = seen
        while frontier:
            low = frontier & -frontier
            frontier ^= low
            new = self.adj[low.bit_length() - 1] & within & ~seen
            seen |= new
            frontier |= new
        return seen

    def is_connected(self) -> bool:
        return self.component_mask(0) == self.full_mask

    def require_connected(self) -> None:
        if not self.is_connected():
            raise DisconnectedGraphError("graph is disconnected")

    def is_complete(self) -> bool:
        return all(self.closed_mask(v) == self.full_mask for v in range(self.n))

    def __str__(self) -> str:
        names = [self.label(v) for v in range(self.n)]
        es = ", ".join(f"{names[u]}{names[v]}" for u, v in self.edges())
        return f"Graph(n={self.n}, edges=[{es}])"


# predicates -----------------------------------------------------------------


def _mask_of(G: Graph, vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        G.check_vertex(v)
        mask |= 1 << v
    return mask


def is_clique(G: Graph, K: Iterable[int]) -> bool:
    mask = _mask_of(G, K)
    return all(G.closed_mask(v) & mask == mask for v in _bits(mask))


def is_true_twin_set(G: Graph, W: Iterable[int]) -> bool:
    """Every pair in ``W`` has equal closed neighbourhoods."""
    ws = _bits(_mask_of(G, W))
    return all(G.closed_mask(u) == G.closed_mask(w) for u, w in combinations(ws, 2))


def is_false_twin_set(G: Graph, W: Iterable[int]) -> bool:
    ws = _bits(_mask_of(G, W))
    return all(G.adj[u] == G.adj[w] for u, w in combinations(ws, 2))


def is_universal(G: Graph, v: int) -> bool:
    G.check_vertex(v)
    return G.closed_mask(v) == G.full_mask


def is_simplicial(G: Graph, v: int) -> bool:
    G.check_vertex(v)
    return is_clique(G, G.neighbors(v))


def connected_components(G: Graph) -> list[list[int]]:
    left = G.full_mask
    comps = []
    while left:
        v = (left & -left).bit_length() - 1
        comp = G.component_mask(v)
        comps.append(_bits(comp))
        left &= ~comp
    return comps


def universal_vertices(G: Graph) -> list[int]:
    return [v for v in range(G.n) if G.closed_mask(v) == G.full_mask]


def twin_classes(G: Graph) -> list[list[int]]:
    """Classes of true twins and classes of false twins with at least two members."""
    classes: dict[tuple[str, int], list[int]] = {}
    for v in range(G.n):
        classes.setdefault(("true", G.closed_mask(v)), []).append(v)
        classes.setdefault(("false", G.adj[v]), []).append(v)
    return [c for c in classes.values() if len(c) >= 2]


# operations -----------------------------------------------------------------


def _extend_labels(G: Graph, new_label: str) -> tuple[str, ...] | None:
    if G.labels is None:
        return None
    return G.labels + (new_label,)


def add_simplicial(G: Graph, K: Iterable[int], label: str | None = None) -> Graph:
    """Add vertex ``n`` whose open neighbourhood is the clique ``K``."""
    mask = _mask_of(G, K)
    if not mask:
        raise GraphError("K must be non-empty")
    if not is_clique(G, _bits(mask)):
        raise GraphError(f"{_bits(mask)} is not a clique")
    x = G.n
    adj = [a | (1 << x) if mask >> v & 1 else a for v, a in enumerate(G.adj)]
    adj.append(mask)
    return Graph(G.n + 1, tuple(adj), _extend_labels(G, label or "x"))


def add_true_twin(G: Graph, v: int, label: str | None = None) -> Graph:
    """Add vertex ``n`` with closed neighbourhood ``N[v]`` plus itself."""
    G.check_vertex(v)
    x = G.n
    nbrs = G.closed_mask(v)
    adj = [a | (1 << x) if nbrs >> u & 1 else a for u, a in enumerate(G.adj)]
    adj.append(nbrs)
    return Graph(G.n + 1, tuple(adj), _extend_labels(G, label or G.label(v) + "'"))


def add_false_twin(G: Graph, v: int, label: str | None = None) -> Graph:
    """Add vertex ``n`` with open neighbourhood ``N(v)``; ``v`` and ``n`` stay non-adjacent."""
    G.check_vertex(v)
    x = G.n
    nbrs = G.adj[v]
    adj = [a | (1 << x) if nbrs >> u & 1 else a for u, a in enumerate(G.adj)]
    adj.append(nbrs)
    return Graph(G.n + 1, tuple(adj), _extend_labels(G, label or G.label(v) + "'"))


def delete_twin_edges(G: Graph, W: Iterable[int]) -> Graph:
    """Remove every edge inside the true-twin set ``W``."""
    mask = _mask_of(G, W)
    if mask.bit_count() < 2:
        raise GraphError("W needs at least two vertices")
    if not is_true_twin_set(G, _bits(mask)):
        raise GraphError(f"{_bits(mask)} is not a set of true twins")
    adj = tuple(a & ~mask if mask >> v & 1 else a for v, a in enumerate(G.adj))
    return Graph(G.n, adj, G.labels)


def induced_subgraph(G: Graph, vertices: Sequence[int]) -> Graph:
    """Subgraph on ``vertices``, renumbered in the given order."""
    pos = {v: i for i, v in enumerate(vertices)}
    edges = [(pos[u], pos[v]) for u, v in G.edges() if u in pos and v in pos]
    labels = [G.label(v) for v in vertices] if G.labels is not None else None
    return Graph.from_edges(len(vertices), edges, labels)


def relabel_graph(G: Graph, f: Sequence[int]) -> Graph:
    """Image of ``G`` under the vertex bijection ``f``."""
    if sorted(f) != list(range(G.n)):
        raise GraphError("f is not a bijection on the vertex set")
    labels = None
    if G.labels is not None:
        out = [""] * G.n
        for v in range(G.n):
            out[f[v]] = G.labels[v]
        labels = out
    return Graph.from_edges(G.n, [(f[u], f[v]) for u, v in G.edges()], labels)


def is_automorphism(G: Graph, f: Sequence[int]) -> bool:
    if sorted(f) != list(range(G.n)):
        return False
    for v in range(G.n):
        image = 0
        for u in _bits(G.adj[v]):
            image |= 1 << f[u]
        if image != G.adj[f[v]]:
            return False
    return True


def same_edges(G: Graph, H: Graph) -> bool:
    return G.n == H.n and G.adj == H.adj


# families -------------------------------------------------------------------


def _positive(*params: int) -> None:
    for p in params:
        if not isinstance(p, int) or p <= 0:
            raise GraphError(f"family parameters must be positive integers, got {params}")


def complete(n: int) -> Graph:
    _positive(n)
    return Graph.from_edges(n, combinations(range(n), 2), [str(i + 1) for i in range(n)])


def path(n: int) -> Graph:
    _positive(n)
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)], [str(i + 1) for i in range(n)])


def complete_split(p: int, q: int) -> Graph:
    """SPK_{p,q}: clique ``x_1..x_p`` (ids ``0..p-1``) joined to independent ``y_1..y_q``."""
    _positive(p, q)
    edges = list(combinations(range(p), 2))
    edges += [(i, p + j) for i in range(p) for j in range(q)]
    labels = [f"x{i + 1}" for i in range(p)] + [f"y{j + 1}" for j in range(q)]
    return Graph.from_edges(p + q, edges, labels)


def complete_bipartite(p: int, q: int) -> Graph:
    """K_{p,q} with the same vertex layout as ``complete_split(p, q)``."""
    _positive(p, q)
    edges = [(i, p + j) for i in range(p) for j in range(q)]
    labels = [f"x{i + 1}" for i in range(p)] + [f"y{j + 1}" for j in range(q)]
    return Graph.from_edges(p + q, edges, labels)


def star(q: int) -> Graph:
    """K_{1,q} with the centre at id 0."""
    return complete_bipartite(1, q)


def threshold(word: str, require_connected: bool = True) -> Graph:
    """Threshold graph from a single vertex by a word over ``i`` (isolated) / ``u`` (universal).

    Vertex ``k`` is the vertex added by ``word[k-1]``; vertex 0 is the start.
    """
    word = word.strip().lower()
    if any(ch not in "iu" for ch in word):
        raise GraphError(f"threshold word must use only 'i' and 'u', got {word!r}")
    if require_connected and word and word[-1] == "i":
        raise DisconnectedGraphError(f"threshold word {word!r} ends with an isolated vertex")
    if require_connected and not word:
        # single vertex: connected, nothing to flag
        pass
    edges = []
    for k, ch in enumerate(word, start=1):
        if ch == "u":
            edges += [(j, k) for j in range(k)]
    n = len(word) + 1
    return Graph.from_edges(n, edges, [str(i + 1) for i in range(n)])


FAMILY_ALIASES = {
    "complete": "complete",
    "k": "complete",
    "path": "path",
    "p": "path",
    "star": "star",
    "complete_bipartite": "complete_bipartite",
    "kpq": "complete_bipartite",
    "complete_split": "complete_split",
    "spk": "complete_split",
    "threshold": "threshold",
}


def make_family(kind: str, params: Sequence[int] | str) -> Graph:
    """Named family constructor; ``threshold`` takes its word as ``params``."""
    name = FAMILY_ALIASES.get(kind.lower())
    if name is None:
        raise GraphError(f"unknown family {kind!r}")
    if name == "threshold":
        word = params if isinstance(params, str) else "".join(str(p) for p in params)
        return threshold(word)
    params = list(params)
    arity = {"complete": 1, "path": 1, "star": 1, "complete_bipartite": 2, "complete_split": 2}[name]
    if len(params) != arity:
        raise GraphError(f"family {name} takes {arity} parameter(s), got {params}")
    _positive(*params)
    return {
        "complete": complete,
        "path": path,
        "star": star,
        "complete_bipartite": complete_bipartite,
        "complete_split": complete_split,
    }[name](*params)


def parse_family(spec: str) -> Graph:
    """Parse ``name:params`` such as ``complete:4``, ``spk:2,3`` or ``threshold:iuu``."""
    name, _, rest = spec.partition(":")
    if not rest:
        raise GraphError(f"family spec {spec!r} needs parameters after ':'")
    if FAMILY_ALIASES.get(name.lower()) == "threshold":
        return make_family(name, rest)
    try:
        params = [int(p) for p in rest.split(",")]
    except ValueError as exc:
        raise GraphError(f"bad family parameters in {spec!r}") from exc
    return make_family(name, params)


def connected_graphs(n: int) -> list[Graph]:
    """One representative of every connected graph on ``n`` vertices up to isomorphism (n <= 5)."""
    from itertools import combinations, permutations

    if n > 5:
        raise GraphError("exhaustive enumeration is limited to n <= 5")
    pairs = list(combinations(range(n), 2))
    perms = list(permutations(range(n)))
    seen: set[int] = set()
    out = []
    for bits in range(1 << len(pairs)):
        edges = [e for k, e in enumerate(pairs) if bits >> k & 1]
        if len(edges) < n - 1:
            continue
        canon = min(sum(1 << pairs.index(tuple(sorted((f[a], f[b])))) for a, b in edges) for f in perms)
        if canon in seen:
            continue
        seen.add(canon)
        G = Graph.from_edges(n, edges)
        if G.is_connected():
            out.append(G)
    return out


# serialisation --------------------------------------------------------------


def graph_to_json(G: Graph) -> dict:
    out: dict = {"n": G.n, "edges": [list(e) for e in G.edges()]}
    if G.labels is not None:
        out["labels"] = list(G.labels)
    return out


def graph_from_json(data: dict) -> Graph:
    try:
        n = int(data["n"])
        edges = [(int(u), int(v)) for u, v in data["edges"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphError(f"malformed graph JSON: {exc}") from exc
    return Graph.from_edges(n, edges, data.get("labels"))


def edge_list_text(G: Graph) -> str:
    lines = [f"# n={G.n}"]
    lines += [f"{u} {v}" for u, v in G.edges()]
    return "\n".join(lines) + "\n"


def graph_from_edge_list(text: str, n: int | None = None) -> Graph:
    """Parse ``u v`` lines; an optional ``# n=<int>`` comment fixes the vertex count."""
    edges = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("n=") and n is None:
                n = int(body[2:])
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphError(f"bad edge line {raw!r}")
        edges.append((int(parts[0]), int(parts[1])))
    if n is None:
        n = 1 + max((max(e) for e in edges), default=0)
    return Graph.from_edges(n, edges)


def load_graph(path_: str | Path) -> Graph:
    p = Path(path_)
    text = p.read_text(encoding="utf-8")
    if p.suffix == ".json" or text.lstrip().startswith("{"):
        return graph_from_json(json.loads(text))
    return graph_from_edge_list(text)


def save_graph(G: Graph, path_: str | Path) -> None:
    p = Path(path_)
    if p.suffix == ".json":
        p.write_text(json.dumps(graph_to_json(G)) + "\n", encoding="utf-8")
    else:
        p.write_text(edge_list_text(G), encoding="utf-8")
