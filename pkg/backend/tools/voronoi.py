# backend/tools/voronoi.py
"""
Voronoi cells around a center set, their border vertices, cell centers v_C and
the contracted cell graph H.
"""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Any, Iterable, Mapping

from backend.errors import InputError
from backend.tools.graph_core import (
    Graph,
    QuotientGraph,
    contract_partition,
    k_ball,
    minor_free_edge_bound,
    multi_source_distances,
)


@dataclass(frozen=True)
class VoronoiPartition:
    centers: frozenset[int]
    cell_of: Mapping[int, int]
    cells: Mapping[int, frozenset[int]]
    borders: Mapping[int, frozenset[int]]
    v_C: Mapping[int, int]
    k: int | None

    def to_payload(self) -> dict[str, Any]:
        return {
            "k": self.k,
            "centers": sorted(self.centers),
            "cells": {str(c): sorted(vs) for c, vs in sorted(self.cells.items())},
            "borders": {str(c): sorted(vs) for c, vs in sorted(self.borders.items())},
            "v_C": {str(c): v for c, v in sorted(self.v_C.items())},
        }


def nearest_centers(g: Graph, centers: Iterable[int]) -> tuple[dict[int, int], dict[int, int]]:
    """Level-synchronous BFS from all centers; each vertex keeps the max-id nearest center.

    The max over neighbors one level closer equals the max over all nearest
    centers, and the vertex's BFS parent always sits in the same cell.
    """
    centers = sorted(set(centers))
    owner = {c: c for c in centers}
    dist = {c: 0 for c in centers}
    frontier = centers
    d = 0
    while frontier:
        d += 1
        reached: dict[int, int] = {}
        for x in frontier:
            for y in g.neighbors(x):
                if y in dist:
                    continue
                if y not in reached or owner[x] > reached[y]:
                    reached[y] = owner[x]
        for y, c in reached.items():
            dist[y] = d
            owner[y] = c
        frontier = sorted(reached)
    return owner, dist


def _pick_v_C(g: Graph, cell: frozenset[int], k: int | None) -> int:
    """d(v_C, w) <= k for all w in C, then max |N^k[v_C]|, then max id.

    When no member reaches the whole cell within k (or k is None), the members
    of minimum eccentricity over the cell are the candidates instead, and that
    eccentricity stands in for k.
    """
    ecc = {}
    for v in cell:
        dv = multi_source_distances(g, [v])
        ecc[v] = max(dv[w] for w in cell)
    reach = min(ecc.values())
    cut = k if k is not None and reach <= k else reach
    radius = k if k is not None else reach
    cands = [v for v in cell if ecc[v] <= cut]
    return max(cands, key=lambda v: (len(k_ball(g, v, radius)), v))


def build_voronoi(g: Graph, centers: Iterable[int], k: int | None = None) -> VoronoiPartition:
    centers = frozenset(centers)
    if not centers:
        raise InputError("Voronoi cells need at least one center")
    unknown = centers - g.vertices
    if unknown:
        raise InputError(f"unknown centers {sorted(unknown)}")
    if k is not None and k < 0:
        raise InputError(f"radius must be >= 0, got {k}")
    owner, _ = nearest_centers(g, centers)
    if len(owner) != g.n:
        stray = sorted(g.vertices - owner.keys())
        raise InputError(f"vertices {stray[:10]} have no center in their component")

    members: dict[int, set[int]] = {c: set() for c in centers}
    for v, c in owner.items():
        members[c].add(v)
    cells = {c: frozenset(vs) for c, vs in members.items()}
    borders = {
        c: frozenset(v for v in vs if any(owner[u] != c for u in g.neighbors(v)))
        for c, vs in cells.items()
    }
    v_C = {c: _pick_v_C(g, vs, k) for c, vs in cells.items()}
    return VoronoiPartition(
        centers=centers,
        cell_of=MappingProxyType(owner),
        cells=MappingProxyType(cells),
        borders=MappingProxyType(borders),
        v_C=MappingProxyType(v_C),
        k=k,
    )


def border_union(p: VoronoiPartition) -> frozenset[int]:
    """V*."""
    return frozenset().union(*p.borders.values()) if p.borders else frozenset()


def cell_graph(g: Graph, p: VoronoiPartition) -> QuotientGraph:
    """H: every cell contracted to its center id."""
    return contract_partition(g, dict(p.cells))


def intercell_edge_count(g: Graph, p: VoronoiPartition, a: int, b: int) -> int:
    if a not in p.cells or b not in p.cells:
        raise InputError(f"unknown centers among {a}, {b}")
    if a == b:
        raise InputError("intercell edges need two distinct cells")
    return sum(
        1 for v in p.cells[a] for u in g.neighbors(v) if p.cell_of[u] == b
    )


def max_intercell_edges(g: Graph, p: VoronoiPartition) -> int:
    counts: dict[tuple[int, int], int] = {}
    for u, v in g.edges():
        a, b = p.cell_of[u], p.cell_of[v]
        if a != b:
            key = (min(a, b), max(a, b))
            counts[key] = counts.get(key, 0) + 1
    return max(counts.values(), default=0)


# ---------------- closed-form ceilings ----------------

def two_cluster_edge_bound(k: int, t: int) -> int:
    """Edges between two radius-k cells of a K_{2,t}-minor-free graph: k^2 t^{2k t^k}."""
    return k * k * t ** (2 * k * t ** k)


def border_bound(k: int, t: int, m: int) -> int:
    """|V*| <= k^2 t^{2k t^k} (t+1) |M| for cells built on an optimum M."""
    return two_cluster_edge_bound(k, t) * (t + 1) * m


def quotient_within_edge_bound(q: QuotientGraph, t: int) -> bool:
    h = q.quotient
    return h.m <= minor_free_edge_bound(h.n, t)
