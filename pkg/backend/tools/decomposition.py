# backend/tools/decomposition.py
"""
Low-boundary partition by iterated ball carving.
- Pick the unprocessed vertex of highest priority (max id, or a seeded order)
- Grow a BFS ball in the remaining graph until
  |inner boundary| + |outer boundary| <= (epsilon/2) * |ball|, or the radius cap hits
- Carve the ball as a block and repeat; every ∂(P) vertex is charged to one ball,
  so an uncapped run always lands within epsilon/2
- The result is checked from scratch; a capped run that misses the target doubles
  the cap and restarts, up to `retries` times
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Any

from backend import config
from backend.errors import ContractFailure, InputError
from backend.tools.graph_core import Graph, induced_diameter, partition_boundary
from backend.tools.prng import SplitMix64

log = logging.getLogger(__name__)


def to_fraction(x: Any, what: str = "value") -> Fraction:
    """Exact rational from an int, Fraction, decimal float or 'a/b' string."""
    try:
        if isinstance(x, (Rational, int)):
            return Fraction(x)
        return Fraction(str(x))
    except (ValueError, ZeroDivisionError) as e:
        raise InputError(f"{what} must be a rational number, got {x!r}") from e


@dataclass(frozen=True)
class ClusterPartition:
    blocks: tuple[frozenset[int], ...]
    boundary: frozenset[int]
    max_block_diameter: int
    epsilon_target: Fraction
    radius_cap: int | None = None

    def block_of(self) -> dict[int, int]:
        return {v: i for i, b in enumerate(self.blocks) for v in b}

    @property
    def boundary_fraction(self) -> Fraction:
        n = sum(len(b) for b in self.blocks)
        return Fraction(len(self.boundary), n) if n else Fraction(0)

    def to_payload(self) -> dict[str, Any]:
        return {
            "epsilon": str(self.epsilon_target),
            "blocks": [sorted(b) for b in self.blocks],
            "boundary": sorted(self.boundary),
            "boundary_fraction": float(self.boundary_fraction),
            "max_block_diameter": self.max_block_diameter,
            "radius_cap": self.radius_cap,
        }


def _check_epsilon(epsilon) -> Fraction:
    eps = to_fraction(epsilon, "epsilon")
    if not 0 < eps < 1:
        raise InputError(f"epsilon must lie in (0, 1), got {eps}")
    return eps


def _priority(h: Graph, seed: int | None) -> list[int]:
    order = sorted(h.vertices, reverse=True)
    if seed is not None:
        SplitMix64(seed).shuffle(order)
    return order


def _carve(h: Graph, remaining: set[int], root: int, eps: Fraction, cap: int | None) -> set[int]:
    ball = {root}
    frontier = [root]
    r = 0
    while True:
        outer = {u for x in frontier for u in h.neighbors(x) if u in remaining and u not in ball}
        # vertices found earlier keep their outer neighbors inside the ball by construction
        inner = {x for x in frontier if any(u in remaining and u not in ball for u in h.neighbors(x))}
        if 2 * (len(inner) + len(outer)) <= eps * len(ball):
            return ball
        if not outer or (cap is not None and r >= cap):
            return ball
        ball |= outer
        frontier = sorted(outer)
        r += 1


def _carve_all(h: Graph, eps: Fraction, cap: int | None, order: list[int]) -> list[frozenset[int]]:
    remaining = set(h.vertices)
    blocks = []
    for root in order:
        if root not in remaining:
            continue
        ball = _carve(h, remaining, root, eps, cap)
        remaining -= ball
        blocks.append(frozenset(ball))
    return blocks


def _assemble(h: Graph, blocks: list[frozenset[int]], eps: Fraction, cap: int | None) -> ClusterPartition:
    block_of = {v: i for i, b in enumerate(blocks) for v in b}
    diam = max((induced_diameter(h, b) for b in blocks), default=0)
    return ClusterPartition(
        blocks=tuple(blocks),
        boundary=partition_boundary(h, block_of),
        max_block_diameter=int(diam),
        epsilon_target=eps,
        radius_cap=cap,
    )


def low_boundary_partition(
    h: Graph,
    epsilon,
    *,
    seed: int | None = None,
    radius_cap: int | None = None,
    retries: int | None = None,
) -> ClusterPartition:
    """Blocks of bounded diameter with |∂(P)| <= epsilon * |V(h)|, or ContractFailure."""
    eps = _check_epsilon(epsilon)
    if radius_cap is not None and radius_cap < 0:
        raise InputError(f"radius_cap must be >= 0, got {radius_cap}")
    retries = config.DECOMP_RETRIES if retries is None else retries
    if h.n == 0:
        return ClusterPartition((), frozenset(), 0, eps, radius_cap)

    order = _priority(h, seed)
    cap = radius_cap
    best = None
    for attempt in range(retries + 1):
        p = _assemble(h, _carve_all(h, eps, cap, order), eps, cap)
        if p.boundary_fraction <= eps:
            log.debug("decomposition n=%d eps=%s: %d blocks, |∂|=%d, diam<=%d, cap=%s",
                      h.n, eps, len(p.blocks), len(p.boundary), p.max_block_diameter, cap)
            return p
        log.debug("decomposition attempt %d with cap %s reached %.3f > %s",
                  attempt, cap, float(p.boundary_fraction), eps)
        if best is None or p.boundary_fraction < best.boundary_fraction:
            best = p
        if cap is None:
            break
        cap = max(1, 2 * cap)
    raise ContractFailure(
        f"no partition with |∂|/n <= {eps} (best {float(best.boundary_fraction):.3f}, last cap {cap})",
        achieved=float(best.boundary_fraction),
        radius_cap=best.radius_cap,
    )


@dataclass(frozen=True)
class PartitionReport:
    covers: bool
    disjoint: bool
    connected: bool
    boundary_matches: bool
    boundary_ok: bool
    boundary_size: int
    boundary_fraction: Fraction
    diameters: tuple[int | float, ...]
    diameter_ok: bool

    @property
    def passed(self) -> bool:
        return (self.covers and self.disjoint and self.connected
                and self.boundary_matches and self.boundary_ok and self.diameter_ok)

    def to_payload(self) -> dict[str, Any]:
        return {
            "passed": self.passed,
            "covers": self.covers,
            "disjoint": self.disjoint,
            "connected": self.connected,
            "boundary_matches": self.boundary_matches,
            "boundary_ok": self.boundary_ok,
            "boundary_size": self.boundary_size,
            "boundary_fraction": float(self.boundary_fraction),
            "diameters": [d if d != float("inf") else None for d in self.diameters],
            "diameter_ok": self.diameter_ok,
        }


def verify_partition(h: Graph, p: ClusterPartition, epsilon) -> PartitionReport:
    """Recompute ∂(P) and every block diameter; never raises on a bad partition."""
    eps = to_fraction(epsilon, "epsilon")
    seen: set[int] = set()
    disjoint = True
    for b in p.blocks:
        if seen & b:
            disjoint = False
        seen |= b
    covers = seen == set(h.vertices)
    block_of: dict[int, int] = {}
    for i, b in enumerate(p.blocks):
        for v in b:
            block_of.setdefault(v, i)
    boundary = partition_boundary(h, block_of) if covers else frozenset()
    diameters = tuple(induced_diameter(h, b & h.vertices) if b & h.vertices else 0 for b in p.blocks)
    frac = Fraction(len(boundary), h.n) if h.n else Fraction(0)
    return PartitionReport(
        covers=covers,
        disjoint=disjoint,
        connected=all(d != float("inf") for d in diameters),
        boundary_matches=covers and boundary == p.boundary,
        boundary_ok=covers and frac <= eps,
        boundary_size=len(boundary),
        boundary_fraction=frac,
        diameters=diameters,
        diameter_ok=all(d <= p.max_block_diameter for d in diameters),
    )
