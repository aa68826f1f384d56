# backend/tools/oracle.py
"""
Ground truth for the workbench.
- gamma_k_exact: set-cover branch-and-bound (universe V, sets N^k[v]), greedy upper
  bound, max-coverage lower bound; returns the lexicographically smallest optimum
- has_k2t_minor: per biconnected block, hub pairs (A, B) enumerated as connected
  sets, connectors counted as vertex-disjoint A–B paths (Menger)
- Budgets end in BudgetExceeded, never in a guessed answer
"""

from __future__ import annotations

import logging
from collections import defaultdict, deque
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Mapping, Sequence

import networkx as nx

from backend import config
from backend.errors import BudgetExceeded, InputError
from backend.tools.graph_core import Graph, k_ball, minor_free_edge_bound, multi_source_distances

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class OptimalCertificate:
    dominators: frozenset[int]
    size: int
    nodes_explored: int
    k: int

    def to_payload(self) -> dict:
        return {"k": self.k, "gamma": self.size, "D_opt": sorted(self.dominators),
                "nodes_explored": self.nodes_explored}


def _check_k(k: int) -> None:
    if k < 0:
        raise InputError(f"radius must be >= 0, got {k}")


def undominated(g: Graph, D: Iterable[int], k: int) -> frozenset[int]:
    D = frozenset(D)
    missing = D - g.vertices
    if missing:
        raise InputError(f"D contains vertices outside the graph: {sorted(missing)}")
    _check_k(k)
    reached = multi_source_distances(g, D, limit=k) if D else {}
    return frozenset(v for v in g.vertices if v not in reached)


def is_distance_k_dominating(g: Graph, D: Iterable[int], k: int) -> bool:
    return not undominated(g, D, k)


# ---------------- set cover engine ----------------

def _popcount(x: int) -> int:
    return bin(x).count("1")


class CoverSearch:
    """Minimum cover of `targets` by candidate sets; deterministic lexicographic optimum."""

    def __init__(self, targets: Sequence[int], covers: Mapping[int, Iterable[int]], budget: int | None = None):
        self.bit = {x: i for i, x in enumerate(sorted(targets))}
        self.masks = {}
        for c in sorted(covers):
            m = 0
            for x in covers[c]:
                if x in self.bit:
                    m |= 1 << self.bit[x]
            self.masks[c] = m
        self.candidates = sorted(self.masks)
        self.full = (1 << len(self.bit)) - 1
        self.budget = budget if budget is not None else config.ORACLE_NODE_BUDGET
        self.nodes = 0

    def _tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceeded(f"cover search exceeded {self.budget} nodes", self.nodes)

    def _greedy(self, unc: int, allowed: Sequence[int]) -> list[int] | None:
        chosen = []
        while unc:
            best, gain = None, 0
            for c in allowed:
                cg = _popcount(self.masks[c] & unc)
                if cg > gain:
                    best, gain = c, cg
            if best is None:
                return None
            chosen.append(best)
            unc &= ~self.masks[best]
        return chosen

    def smallest(self, unc: int, allowed: Sequence[int], limit: int) -> list[int] | None:
        """A minimum-size cover of `unc` from `allowed` with at most `limit` sets, or None."""
        if unc == 0:
            return []
        if limit <= 0:
            return None
        best: list[int] | None = None
        greedy = self._greedy(unc, allowed)
        if greedy is None:
            return None
        bound = limit + 1
        if len(greedy) <= limit:
            best, bound = greedy, len(greedy)

        def rec(unc: int, chosen: list[int], pool: list[int]) -> None:
            nonlocal best, bound
            self._tick()
            if unc == 0:
                if len(chosen) < bound:
                    best, bound = list(chosen), len(chosen)
                return
            if len(chosen) + 1 >= bound:
                return
            relevant = [c for c in pool if self.masks[c] & unc]
            if not relevant:
                return
            maxcov = max(_popcount(self.masks[c] & unc) for c in relevant)
            need = -(-_popcount(unc) // maxcov)
            if len(chosen) + need >= bound:
                return
            # branch on the uncovered element with the fewest coverers (lowest id on ties)
            pick, pick_count = -1, None
            rest = unc
            while rest:
                low = rest & -rest
                rest ^= low
                cnt = sum(1 for c in relevant if self.masks[c] & low)
                if pick_count is None or cnt < pick_count:
                    pick, pick_count = low, cnt
                    if cnt <= 1:
                        break
            coverers = [c for c in relevant if self.masks[c] & pick]
            tried: set[int] = set()
            for c in coverers:
                chosen.append(c)
                rec(unc & ~self.masks[c], chosen, [d for d in relevant if d != c and d not in tried])
                chosen.pop()
                tried.add(c)

        rec(unc, [], list(allowed))
        return best

    def lexicographic_optimum(self) -> list[int]:
        """Sorted minimum cover that is smallest in lexicographic order."""
        opt = self.smallest(self.full, self.candidates, len(self.candidates))
        if opt is None:
            raise InputError("targets cannot be covered by the candidate sets")
        size = len(opt)
        chosen: list[int] = []
        unc, last = self.full, -1
        for slot in range(size):
            remaining = size - slot - 1
            for c in self.candidates:
                if c <= last or not self.masks[c] & unc:
                    continue
                nu = unc & ~self.masks[c]
                if nu == 0 or (remaining and self.smallest(nu, [d for d in self.candidates if d > c], remaining) is not None):
                    chosen.append(c)
                    unc, last = nu, c
                    break
            if unc == 0:
                break
        assert unc == 0 and len(chosen) == size
        return chosen


def min_cover(g: Graph, targets: Iterable[int], candidates: Iterable[int], k: int,
              budget: int | None = None) -> tuple[list[int], int]:
    """Lexicographically smallest minimum subset of `candidates` distance-k covering `targets` in g."""
    _check_k(k)
    targets = sorted(set(targets))
    if not targets:
        return [], 0
    search = CoverSearch(targets, {c: k_ball(g, c, k) for c in set(candidates)}, budget)
    chosen = search.lexicographic_optimum()
    return chosen, search.nodes


def gamma_k_exact(g: Graph, k: int, budget: int | None = None) -> OptimalCertificate:
    if g.n == 0:
        raise InputError("gamma_k of the empty graph is undefined")
    chosen, nodes = min_cover(g, g.vertices, g.vertices, k, budget)
    log.debug("gamma_%d exact: n=%d size=%d nodes=%d", k, g.n, len(chosen), nodes)
    return OptimalCertificate(frozenset(chosen), len(chosen), nodes, k)


def gamma_k_naive(g: Graph, k: int) -> OptimalCertificate:
    """Exhaustive subsets by increasing size; first hit is the lexicographic optimum."""
    if g.n == 0:
        raise InputError("gamma_k of the empty graph is undefined")
    _check_k(k)
    balls = {v: k_ball(g, v, k) for v in g.vertices}
    tried = 0
    for size in range(1, g.n + 1):
        for combo in combinations(sorted(g.vertices), size):
            tried += 1
            covered = frozenset().union(*(balls[v] for v in combo))
            if len(covered) == g.n:
                return OptimalCertificate(frozenset(combo), size, tried, k)
    raise AssertionError("V itself always dominates")


# ---------------- K_{2,t} minors ----------------

def _connected_sets(nbr: Sequence[int], allowed: int, max_size: int) -> Iterator[int]:
    """Every connected vertex set inside `allowed` (bitmasks), each exactly once."""
    rest = allowed
    while rest:
        low = rest & -rest
        rest ^= low
        root = low.bit_length() - 1
        yield from _grow(nbr, low, nbr[root] & rest, rest, 1, max_size)


def _grow(nbr, sub: int, frontier: int, region: int, size: int, max_size: int) -> Iterator[int]:
    yield sub
    if size >= max_size:
        return
    while frontier:
        low = frontier & -frontier
        frontier ^= low
        region &= ~low
        grown = sub | low
        i = low.bit_length() - 1
        yield from _grow(nbr, grown, (frontier | nbr[i]) & region & ~grown, region, size + 1, max_size)


def count_disjoint_paths(nbr: Sequence[int], inside: int, sources: int, sinks: int, need: int) -> int:
    """Vertex-disjoint sources→sinks paths within `inside`, stopping at `need`."""
    cap: dict = defaultdict(int)
    out: dict = defaultdict(list)

    def arc(a, b):
        out[a].append(b); out[b].append(a)
        cap[(a, b)] += 1

    rest = inside
    while rest:
        low = rest & -rest
        rest ^= low
        v = low.bit_length() - 1
        arc((v, 0), (v, 1))
        if sources & low:
            arc("s", (v, 0))
        if sinks & low:
            arc((v, 1), "t")
        nb = nbr[v] & inside
        while nb:
            lo = nb & -nb
            nb ^= lo
            arc((v, 1), (lo.bit_length() - 1, 0))

    flow = 0
    while flow < need:
        parent = {"s": None}
        todo = deque(["s"])
        while todo and "t" not in parent:
            a = todo.popleft()
            for b in out[a]:
                if b not in parent and cap[(a, b)] > 0:
                    parent[b] = a
                    todo.append(b)
        if "t" not in parent:
            break
        b = "t"
        while parent[b] is not None:
            a = parent[b]
            cap[(a, b)] -= 1
            cap[(b, a)] += 1
            b = a
        flow += 1
    return flow


class _PairCounter:
    def __init__(self, budget: int):
        self.budget = budget
        self.pairs = 0

    def tick(self) -> None:
        self.pairs += 1
        if self.pairs > self.budget:
            raise BudgetExceeded(f"minor search exceeded {self.budget} hub pairs", self.pairs)


def _block_has_k2t(block: Graph, t: int, counter: _PairCounter) -> bool:
    order = sorted(block.vertices)
    idx = {v: i for i, v in enumerate(order)}
    nbr = [0] * len(order)
    for v in order:
        for u in block.neighbors(v):
            nbr[idx[v]] |= 1 << idx[u]
    full = (1 << len(order)) - 1
    n = len(order)

    def boundary(s: int) -> int:
        acc, rest = 0, s
        while rest:
            low = rest & -rest
            rest ^= low
            acc |= nbr[low.bit_length() - 1]
        return acc & ~s

    for a in _connected_sets(nbr, full, n - t - 1):
        na = boundary(a)
        if _popcount(na) < t:
            continue
        root = (a & -a).bit_length() - 1
        # B's minimum index is above A's so each unordered hub pair is seen once
        above = full & ~((1 << (root + 1)) - 1) & ~a
        for b in _connected_sets(nbr, above, n - t - _popcount(a)):
            nb = boundary(b)
            if _popcount(nb & ~a) < t:
                continue
            counter.tick()
            rest = full & ~a & ~b
            if count_disjoint_paths(nbr, rest, na & rest, nb & rest, t) >= t:
                return True
    return False


def has_k2t_minor(g: Graph, t: int, budget: int | None = None) -> bool:
    if t < 2:
        raise InputError(f"t must be >= 2, got {t}")
    counter = _PairCounter(budget if budget is not None else config.MINOR_PAIR_BUDGET)
    blocks = sorted((frozenset(b) for b in nx.biconnected_components(g.to_networkx())), key=min)
    for verts in blocks:
        if len(verts) < t + 2:
            continue
        block = g.subgraph(verts)
        if block.m > minor_free_edge_bound(block.n, t):
            return True
        if _block_has_k2t(block, t, counter):
            log.debug("K_{2,%d} minor found in block of size %d after %d pairs", t, block.n, counter.pairs)
            return True
    return False
