# backend/tools/graph_core.py
"""
Immutable simple undirected graph + the distance primitives every other tool uses.
- Vertex ids are non-negative ints; neighbors kept as sorted tuples
- Distances across components are absent from the maps (never a sentinel int)
- Q-path closure is a depth-bounded DFS; exponential, fine at desk scale (h <= 3k)
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping

import networkx as nx

from backend.errors import InputError


def _check_id(v) -> int:
    if isinstance(v, bool) or not isinstance(v, int) or v < 0:
        raise InputError(f"vertex ids must be non-negative integers, got {v!r}")
    return v


class Graph:
    """Simple undirected graph. Parallel input edges collapse; self-loops are rejected."""

    __slots__ = ("_adj", "_vertices", "_m")

    def __init__(self, vertices: Iterable[int], edges: Iterable[tuple[int, int]] = ()):
        verts = frozenset(_check_id(v) for v in vertices)
        adj: dict[int, set[int]] = {v: set() for v in verts}
        for e in edges:
            u, v = e
            _check_id(u); _check_id(v)
            if u == v:
                raise InputError(f"self-loop at {u}")
            if u not in adj or v not in adj:
                raise InputError(f"edge ({u},{v}) has an endpoint outside the vertex set")
            adj[u].add(v); adj[v].add(u)
        self._vertices = verts
        self._adj = MappingProxyType({v: tuple(sorted(ns)) for v, ns in adj.items()})
        self._m = sum(len(ns) for ns in adj.values()) // 2

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[int, int]]) -> "Graph":
        edges = list(edges)
        return cls({x for e in edges for x in e}, edges)

    @property
    def vertices(self) -> frozenset[int]:
        return self._vertices

    @property
    def adjacency(self) -> Mapping[int, tuple[int, ...]]:
        return self._adj

    @property
    def n(self) -> int:
        return len(self._vertices)

    @property
    def m(self) -> int:
        return self._m

    def neighbors(self, v: int) -> tuple[int, ...]:
        try:
            return self._adj[v]
        except KeyError:
            raise InputError(f"unknown vertex {v}") from None

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def max_degree(self) -> int:
        return max((len(ns) for ns in self._adj.values()), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        return u in self._adj and v in self._adj[u]

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in sorted(self._adj) for v in self._adj[u] if u < v]

    def subgraph(self, vertices: Iterable[int]) -> "Graph":
        keep = frozenset(vertices)
        missing = keep - self._vertices
        if missing:
            raise InputError(f"unknown vertices {sorted(missing)}")
        return Graph(keep, ((u, v) for u, v in self.edges() if u in keep and v in keep))

    def to_networkx(self) -> nx.Graph:
        nxg = nx.Graph()
        nxg.add_nodes_from(sorted(self._vertices))
        nxg.add_edges_from(self.edges())
        return nxg

    def __contains__(self, v) -> bool:
        return v in self._adj

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self._vertices))

    def __len__(self) -> int:
        return len(self._vertices)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._vertices == other._vertices and self._adj == other._adj

    def __hash__(self) -> int:
        return hash((self._vertices, tuple(self.edges())))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def _require(g: Graph, v: int) -> None:
    if v not in g:
        raise InputError(f"unknown vertex {v}")


def _require_subset(g: Graph, xs: Iterable[int], what: str = "set") -> frozenset[int]:
    xs = frozenset(xs)
    missing = xs - g.vertices
    if missing:
        raise InputError(f"{what} contains vertices outside the graph: {sorted(missing)}")
    return xs


# ---------------- distances ----------------

def multi_source_distances(g: Graph, sources: Iterable[int], limit: int | None = None) -> dict[int, int]:
    """d_G(v, sources) for every v reachable (and within `limit`, if given)."""
    dist: dict[int, int] = {}
    frontier = deque()
    for s in sorted(set(sources)):
        _require(g, s)
        dist[s] = 0
        frontier.append(s)
    while frontier:
        x = frontier.popleft()
        dx = dist[x]
        if limit is not None and dx >= limit:
            continue
        for y in g.neighbors(x):
            if y not in dist:
                dist[y] = dx + 1
                frontier.append(y)
    return dist


def bfs_distances(g: Graph, source: int) -> dict[int, int]:
    _require(g, source)
    return multi_source_distances(g, [source])


def k_ball(g: Graph, v: int, k: int) -> frozenset[int]:
    """N^k[v], v included."""
    _require(g, v)
    if k < 0:
        raise InputError(f"radius must be >= 0, got {k}")
    return frozenset(multi_source_distances(g, [v], limit=k))


def set_ball(g: Graph, xs: Iterable[int], k: int) -> frozenset[int]:
    """N^k[X]."""
    if k < 0:
        raise InputError(f"radius must be >= 0, got {k}")
    return frozenset(multi_source_distances(g, xs, limit=k))


def connected_components(g: Graph) -> list[frozenset[int]]:
    seen: set[int] = set()
    comps = []
    for v in sorted(g.vertices):
        if v in seen:
            continue
        comp = frozenset(multi_source_distances(g, [v]))
        seen |= comp
        comps.append(comp)
    return comps


def is_connected(g: Graph) -> bool:
    return g.n > 0 and len(multi_source_distances(g, [min(g.vertices)])) == g.n


def eccentricity(g: Graph, v: int) -> int:
    """Eccentricity of v inside its own component."""
    return max(bfs_distances(g, v).values())


def diameter(g: Graph) -> int | float:
    """Diameter of a connected graph; math.inf signals a disconnected one."""
    if g.n == 0:
        raise InputError("diameter of the empty graph is undefined")
    if not is_connected(g):
        return math.inf
    return max(eccentricity(g, v) for v in g.vertices)


def induced_diameter(g: Graph, vertices: Iterable[int]) -> int | float:
    return diameter(g.subgraph(vertices))


def partition_boundary(g: Graph, block_of: Mapping[int, object]) -> frozenset[int]:
    """∂(P): vertices with a neighbor in a different block."""
    return frozenset(
        v for v in g.vertices
        if any(block_of[u] != block_of[v] for u in g.neighbors(v))
    )


# ---------------- contraction ----------------

@dataclass(frozen=True)
class QuotientGraph:
    base: Graph
    block_of: Mapping[int, int]
    members: Mapping[int, frozenset[int]]
    quotient: Graph


def _induces_connected(g: Graph, block: frozenset[int]) -> bool:
    start = min(block)
    seen = {start}
    todo = [start]
    while todo:
        x = todo.pop()
        for y in g.neighbors(x):
            if y in block and y not in seen:
                seen.add(y)
                todo.append(y)
    return len(seen) == len(block)


def contract_partition(
    g: Graph,
    blocks: Iterable[Iterable[int]] | Mapping[int, Iterable[int]],
) -> QuotientGraph:
    """Contract every block to one vertex.

    Blocks given as a sequence are labelled by their minimum member id; a
    mapping supplies explicit labels (e.g. Voronoi centers).
    """
    if isinstance(blocks, Mapping):
        labelled = {_check_id(lbl): frozenset(b) for lbl, b in blocks.items()}
    else:
        labelled = {}
        for b in blocks:
            b = frozenset(b)
            if not b:
                raise InputError("empty block in partition")
            lbl = min(b)
            if lbl in labelled:
                raise InputError(f"blocks overlap at vertex {lbl}")
            labelled[lbl] = b

    block_of: dict[int, int] = {}
    for lbl in sorted(labelled):
        b = labelled[lbl]
        if not b:
            raise InputError(f"block {lbl} is empty")
        for v in b:
            if v not in g:
                raise InputError(f"block {lbl} holds unknown vertex {v}")
            if v in block_of:
                raise InputError(f"vertex {v} appears in blocks {block_of[v]} and {lbl}")
            block_of[v] = lbl
    if len(block_of) != g.n:
        raise InputError(f"blocks miss vertices {sorted(g.vertices - block_of.keys())}")
    for lbl, b in labelled.items():
        if not _induces_connected(g, b):
            raise InputError(f"block {lbl} does not induce a connected subgraph")

    q_edges = {
        (min(block_of[u], block_of[v]), max(block_of[u], block_of[v]))
        for u, v in g.edges()
        if block_of[u] != block_of[v]
    }
    return QuotientGraph(
        base=g,
        block_of=MappingProxyType(block_of),
        members=MappingProxyType(labelled),
        quotient=Graph(labelled.keys(), q_edges),
    )


# ---------------- Q-paths ----------------

def q_path_vertices(g: Graph, Q: Iterable[int], h: int) -> frozenset[int]:
    """Q_h: vertices on Q-paths of length <= h.

    A Q-path meets Q exactly in its ends: a single Q vertex, or a path between
    two distinct Q vertices whose interior avoids Q.
    """
    q = _require_subset(g, Q, "Q")
    if h < 0:
        raise InputError(f"path length bound must be >= 0, got {h}")
    found = set(q)
    if h < 2 or len(q) < 2:
        return frozenset(found)

    to_q = multi_source_distances(g, q)
    path: list[int] = []
    on_path: set[int] = set()

    def walk(x: int, length: int) -> None:
        for y in g.neighbors(x):
            if y in on_path:
                continue
            if y in q:
                if length >= 1:
                    found.update(path)
                continue
            # the interior vertex y still needs at least to_q[y] more steps
            if length + 1 + to_q[y] > h:
                continue
            path.append(y); on_path.add(y)
            walk(y, length + 1)
            path.pop(); on_path.discard(y)

    for u in sorted(q):
        path.append(u); on_path.add(u)
        walk(u, 0)
        path.pop(); on_path.discard(u)
    return frozenset(found)


def compute_U_sets(g: Graph, cell: Iterable[int], border: Iterable[int], v_C: int, k: int) -> list[frozenset[int]]:
    """U_0 = border ∪ {v_C}; U_i = vertices on U_{i-1}-paths of length <= 3k."""
    cell = _require_subset(g, cell, "cell")
    border = _require_subset(g, border, "border")
    _require(g, v_C)
    if k < 0:
        raise InputError(f"radius must be >= 0, got {k}")
    if cell and not (border | {v_C}) <= cell:
        raise InputError("border and v_C must lie inside the cell")
    us = [border | {v_C}]
    for _ in range(k):
        prev = us[-1]
        nxt = q_path_vertices(g, prev, 3 * k)
        us.append(nxt)
    return us


# ---------------- closed-form bounds ----------------

def minor_free_edge_bound(n: int, t: int) -> Fraction:
    """|E| <= (t+1)(n-1)/2 for graphs with no K_{2,t}-minor."""
    return Fraction((t + 1) * (n - 1), 2)


def within_edge_bound(g: Graph, t: int) -> bool:
    return g.n == 0 or g.m <= minor_free_edge_bound(g.n, t)


def q_path_bound(h: int, t: int) -> int:
    """alpha_{h,t} <= (t+1)^{2h} (h+1)!."""
    return (t + 1) ** (2 * h) * math.factorial(h + 1)
