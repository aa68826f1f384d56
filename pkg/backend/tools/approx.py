# backend/tools/approx.py
"""
(1+alpha) pipeline and its bounded-degree variant.
- seed D with DomSet, build Voronoi cells on D, contract to the cell graph H
- cut H with the low-boundary partition, lift the blocks back to G
- take every ∂(P') vertex, then solve each lifted block exactly with the
  ∂(P') vertices inside it as free anchors (distances measured in G)
- the audit records every quantity the inequality |Q| <= |∂(P')| + gamma_k needs
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Any, Iterable, Literal
from types import MappingProxyType

from backend import config
from backend.errors import InputError
from backend.tools.decomposition import ClusterPartition, low_boundary_partition, to_fraction
from backend.tools.domset import DomSetRun, delta_ceiling, domset
from backend.tools.graph_core import (
    Graph,
    QuotientGraph,
    contract_partition,
    diameter,
    is_connected,
    k_ball,
    partition_boundary,
    set_ball,
)
from backend.tools.oracle import gamma_k_exact, is_distance_k_dominating, min_cover
from backend.tools.voronoi import (
    VoronoiPartition,
    build_voronoi,
    cell_graph,
    max_intercell_edges,
    two_cluster_edge_bound,
)

log = logging.getLogger(__name__)

Mode = Literal["theoretical", "direct"]
Variant = Literal["voronoi", "bounded-degree"]


@dataclass(frozen=True)
class ApproxAudit:
    q_size: int
    added_size: int
    boundary_lift_size: int
    boundary_cells: int
    block_sizes: tuple[int, ...]
    q_block_sizes: tuple[int, ...]
    max_intercell_edges: int
    crossing_cell_edges: int
    q_valid: bool
    diameter_gate: bool
    transfer_ok: bool | None = None

    @property
    def single_block(self) -> bool:
        return len(self.block_sizes) == 1

    @property
    def cell_lift_bound(self) -> int:
        """2 * |∂(P)| * (largest edge count between two cells)."""
        return 2 * self.boundary_cells * self.max_intercell_edges

    @property
    def cell_lift_ok(self) -> bool:
        return self.boundary_lift_size <= self.cell_lift_bound

    @property
    def lift_ok(self) -> bool:
        # each crossing cell pair contributes at most two endpoints per edge
        return self.boundary_lift_size <= 2 * self.crossing_cell_edges * self.max_intercell_edges

    def to_payload(self) -> dict[str, Any]:
        return {
            "Q": self.q_size,
            "added": self.added_size,
            "boundary_lift": self.boundary_lift_size,
            "boundary_cells": self.boundary_cells,
            "blocks": list(self.block_sizes),
            "Q_blocks": list(self.q_block_sizes),
            "max_intercell_edges": self.max_intercell_edges,
            "crossing_cell_edges": self.crossing_cell_edges,
            "cell_lift_bound": self.cell_lift_bound,
            "cell_lift_ok": self.cell_lift_ok,
            "lift_ok": self.lift_ok,
            "q_valid": self.q_valid,
            "diameter_gate": self.diameter_gate,
            "transfer_ok": self.transfer_ok,
        }


@dataclass(frozen=True)
class ApproxRun:
    variant: Variant
    k: int
    t: int
    mode: Mode
    D_seed: frozenset[int]
    epsilon_used: Fraction
    cell_partition: VoronoiPartition
    H: QuotientGraph
    P: ClusterPartition
    blocks: tuple[frozenset[int], ...]
    boundary_lift: frozenset[int]
    added: frozenset[int]
    Q_blocks: tuple[frozenset[int], ...]
    Q: frozenset[int]
    audit: ApproxAudit

    def to_payload(self) -> dict[str, Any]:
        return {
            "variant": self.variant,
            "k": self.k,
            "t": self.t,
            "mode": self.mode,
            "epsilon": str(self.epsilon_used),
            "D_seed": sorted(self.D_seed),
            "cells": self.cell_partition.to_payload(),
            "H": {"n": self.H.quotient.n, "edges": [list(e) for e in self.H.quotient.edges()]},
            "P": self.P.to_payload(),
            "blocks": [sorted(b) for b in self.blocks],
            "boundary_lift": sorted(self.boundary_lift),
            "added": sorted(self.added),
            "Q_blocks": [sorted(q) for q in self.Q_blocks],
            "Q": sorted(self.Q),
            "audit": self.audit.to_payload(),
        }


def audit_inequality(run: ApproxRun, gamma: int) -> bool:
    """|Q| <= |added| + gamma_k, where `added` is ∂(P') (or the border-cell centers)."""
    return len(run.Q) <= len(run.added) + gamma


# ---------------- lifting and block solves ----------------

def lift_partition(
    g: Graph, p_cells: VoronoiPartition, P: ClusterPartition
) -> tuple[tuple[frozenset[int], ...], frozenset[int]]:
    """V_i = union of the cells whose centers lie in W_i, and ∂(P') in G."""
    labels = set(p_cells.cells)
    seen: set[int] = set()
    for w in P.blocks:
        if seen & w:
            raise InputError("cell partition blocks overlap")
        seen |= w
    if seen != labels:
        raise InputError(
            f"cell partition does not match the cells: "
            f"extra {sorted(seen - labels)[:10]}, missing {sorted(labels - seen)[:10]}"
        )
    blocks = tuple(frozenset().union(*(p_cells.cells[c] for c in w)) for w in P.blocks)
    block_of = {v: i for i, b in enumerate(blocks) for v in b}
    if len(block_of) != g.n:
        raise InputError("cells do not cover the graph")
    return blocks, partition_boundary(g, block_of)


def solve_block_exact(g: Graph, V_i: Iterable[int], anchors: Iterable[int], k: int,
                      budget: int | None = None) -> frozenset[int]:
    """Smallest Q_i ⊆ V_i with Q_i ∪ anchors distance-k dominating V_i in g.

    Ties go to the lexicographically smallest set.
    """
    V_i = frozenset(V_i)
    anchors = frozenset(anchors)
    if not V_i:
        raise InputError("block is empty")
    if not V_i <= g.vertices:
        raise InputError(f"block holds unknown vertices {sorted(V_i - g.vertices)[:10]}")
    if not anchors <= V_i:
        raise InputError("anchors must lie inside the block")
    covered = set_ball(g, anchors, k) if anchors else frozenset()
    chosen, _ = min_cover(g, V_i - covered, V_i, k, budget)
    return frozenset(chosen)


def block_is_minimal(g: Graph, V_i: Iterable[int], anchors: Iterable[int], k: int,
                     Q_i: Iterable[int]) -> bool:
    """Exhaustive check that no subset of V_i smaller than Q_i does the job."""
    V_i, anchors, Q_i = frozenset(V_i), frozenset(anchors), frozenset(Q_i)
    if not Q_i:
        return True
    covered = set_ball(g, anchors, k) if anchors else frozenset()
    targets = V_i - covered
    balls = {v: k_ball(g, v, k) & targets for v in V_i}
    for combo in combinations(sorted(V_i), len(Q_i) - 1):
        got = frozenset().union(*(balls[v] for v in combo)) if combo else frozenset()
        if got >= targets:
            return False
    return True


def _solve_blocks(g: Graph, blocks, added: frozenset[int], k: int, workers: int,
                  budget: int | None) -> tuple[frozenset[int], ...]:
    def one(b: frozenset[int]) -> frozenset[int]:
        return solve_block_exact(g, b, added & b, k, budget)

    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return tuple(pool.map(one, blocks))
    return tuple(one(b) for b in blocks)


def _crossing_cell_edges(H: QuotientGraph, P: ClusterPartition) -> int:
    w_of = P.block_of()
    return sum(1 for a, b in H.quotient.edges() if w_of[a] != w_of[b])


def _check_common(g: Graph, k: int, t: int) -> bool:
    if k < 1:
        raise InputError(f"k must be >= 1, got {k}")
    if t < 2:
        raise InputError(f"t must be >= 2, got {t}")
    if g.n == 0 or not is_connected(g):
        raise InputError("the pipeline needs a connected non-empty graph")
    gate = diameter(g) >= 4 * k
    if not gate:
        log.info("diameter below 4k=%d; the seed carries no ratio guarantee here", 4 * k)
    return gate


def _resolve_epsilon(alpha, epsilon, mode: Mode | None, theory_eps) -> tuple[Fraction, Mode]:
    if mode is None:
        mode = "direct" if epsilon is not None else "theoretical"
    if mode == "direct":
        if epsilon is None:
            raise InputError("direct mode needs epsilon")
        return to_fraction(epsilon, "epsilon"), mode
    if mode != "theoretical":
        raise InputError(f"unknown epsilon mode {mode!r}")
    if alpha is None:
        raise InputError("theoretical mode needs alpha")
    a = to_fraction(alpha, "alpha")
    if not 0 < a < 1:
        raise InputError(f"alpha must lie in (0, 1), got {a}")
    return theory_eps(a), mode


def theoretical_epsilon(alpha, k: int, t: int) -> Fraction:
    """alpha / (2 * delta * k^2 t^{2k t^k}); collapses to whole-graph blocks at any real size."""
    a = to_fraction(alpha, "alpha")
    return a / (2 * delta_ceiling(t, k) * two_cluster_edge_bound(k, t))


def _assemble(variant, g, k, t, mode, eps, seed_set, cells, H, P, blocks, boundary, added,
              q_blocks, gate, transfer_ok=None) -> ApproxRun:
    Q = added.union(*q_blocks)
    audit = ApproxAudit(
        q_size=len(Q),
        added_size=len(added),
        boundary_lift_size=len(boundary),
        boundary_cells=len(P.boundary),
        block_sizes=tuple(len(b) for b in blocks),
        q_block_sizes=tuple(len(q) for q in q_blocks),
        max_intercell_edges=max_intercell_edges(g, cells),
        crossing_cell_edges=_crossing_cell_edges(H, P),
        q_valid=is_distance_k_dominating(g, Q, k),
        diameter_gate=gate,
        transfer_ok=transfer_ok,
    )
    log.info("%s k=%d n=%d eps=%s: %d blocks, |added|=%d, |Q|=%d, valid=%s",
             variant, k, g.n, eps, len(blocks), len(added), len(Q), audit.q_valid)
    return ApproxRun(
        variant=variant, k=k, t=t, mode=mode, D_seed=seed_set, epsilon_used=eps,
        cell_partition=cells, H=H, P=P, blocks=blocks, boundary_lift=boundary,
        added=added, Q_blocks=q_blocks, Q=frozenset(Q), audit=audit,
    )


def k_domset_approx(
    g: Graph,
    k: int,
    t: int,
    alpha=None,
    epsilon=None,
    mode: Mode | None = None,
    *,
    seed: int | None = None,
    radius_cap: int | None = None,
    workers: int | None = None,
    budget: int | None = None,
    max_rounds: int | None = None,
    dom: DomSetRun | None = None,
) -> ApproxRun:
    """Seed, cluster, lift, solve blocks exactly. `dom` reuses an existing DomSet run."""
    gate = _check_common(g, k, t)
    eps, mode = _resolve_epsilon(alpha, epsilon, mode, lambda a: theoretical_epsilon(a, k, t))
    workers = config.WORKERS if workers is None else workers

    dom = dom if dom is not None else domset(g, k, max_rounds=max_rounds, budget=budget)
    cells = build_voronoi(g, dom.dominators, k)
    H = cell_graph(g, cells)
    P = low_boundary_partition(H.quotient, eps, seed=seed, radius_cap=radius_cap)
    blocks, boundary = lift_partition(g, cells, P)
    q_blocks = _solve_blocks(g, blocks, boundary, k, workers, budget)
    return _assemble("voronoi", g, k, t, mode, eps, dom.dominators, cells, H, P,
                     blocks, boundary, boundary, q_blocks, gate)


# ---------------- bounded-degree variant ----------------

def star_cells(g: Graph, S: Iterable[int]) -> VoronoiPartition:
    """S_v = {v} plus every non-member neighbor whose highest-id neighbor in S is v."""
    S = frozenset(S)
    owner: dict[int, int] = {}
    for u in sorted(g.vertices):
        if u in S:
            owner[u] = u
            continue
        near = [v for v in g.neighbors(u) if v in S]
        if not near:
            raise InputError(f"vertex {u} has no neighbor in the seed set")
        owner[u] = max(near)
    members: dict[int, set[int]] = {v: set() for v in S}
    for u, v in owner.items():
        members[v].add(u)
    cells = {v: frozenset(m) for v, m in members.items()}
    borders = {
        v: frozenset(u for u in m if any(owner[x] != v for x in g.neighbors(u)))
        for v, m in cells.items()
    }
    return VoronoiPartition(
        centers=S,
        cell_of=MappingProxyType(owner),
        cells=MappingProxyType(cells),
        borders=MappingProxyType(borders),
        v_C=MappingProxyType({v: v for v in S}),
        k=1,
    )


def transfer_holds(g: Graph, k: int, blocks, centers: frozenset[int]) -> bool:
    """Every vertex whose k-ball reaches another block is k-dominated by a center."""
    block_of = {v: i for i, b in enumerate(blocks) for v in b}
    for w in sorted(g.vertices):
        ball = k_ball(g, w, k)
        if any(block_of[x] != block_of[w] for x in ball) and not ball & centers:
            return False
    return True


def bounded_degree_epsilon(alpha, t: int, C) -> Fraction:
    """alpha / (delta(t, 1) * C): |S| <= delta * gamma_1 <= delta * C * gamma_k."""
    a = to_fraction(alpha, "alpha")
    c = to_fraction(C, "C")
    if c <= 0:
        raise InputError(f"C must be positive, got {c}")
    return a / (delta_ceiling(t, 1) * c)


def bounded_degree_approx(
    g: Graph,
    k: int,
    t: int,
    C=None,
    alpha=None,
    epsilon=None,
    mode: Mode | None = None,
    *,
    seed: int | None = None,
    radius_cap: int | None = None,
    workers: int | None = None,
    budget: int | None = None,
    max_rounds: int | None = None,
) -> ApproxRun:
    """Star cells around a k=1 DomSet seed; border-cell centers anchor the block solves."""
    gate = _check_common(g, k, t)
    if mode == "theoretical" or (mode is None and epsilon is None):
        if C is None:
            raise InputError("theoretical mode for the bounded-degree variant needs C")
    eps, mode = _resolve_epsilon(alpha, epsilon, mode, lambda a: bounded_degree_epsilon(a, t, C))
    workers = config.WORKERS if workers is None else workers

    seed_run = domset(g, 1, max_rounds=max_rounds, budget=budget)
    cells = star_cells(g, seed_run.dominators)
    H = contract_partition(g, dict(cells.cells))
    P = low_boundary_partition(H.quotient, eps, seed=seed, radius_cap=radius_cap)
    blocks, boundary = lift_partition(g, cells, P)
    centers = frozenset(P.boundary)
    q_blocks = _solve_blocks(g, blocks, centers, k, workers, budget)
    return _assemble("bounded-degree", g, k, t, mode, eps, seed_run.dominators, cells, H, P,
                     blocks, boundary, centers, q_blocks, gate,
                     transfer_ok=transfer_holds(g, k, blocks, centers))


# ---------------- (C, gamma_k)-boundedness ----------------

def degree_certificate(g: Graph, k: int) -> int:
    """C = L(L-1)^k with L = max(Delta, 3); every k-ball has at most that many vertices."""
    L = max(g.max_degree(), 3)
    return L * (L - 1) ** k


def c_gamma_bounded(g: Graph, k: int, C, budget: int | None = None) -> bool:
    """gamma_1(g) <= C * gamma_k(g), both computed exactly."""
    c = to_fraction(C, "C")
    g1 = gamma_k_exact(g, 1, budget).size
    gk = gamma_k_exact(g, k, budget).size
    return g1 <= c * gk

