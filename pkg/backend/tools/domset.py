# backend/tools/domset.py
"""
DomSet – every vertex v picks w_v in N^k[v] maximising (|N^k[w]|, ID(w)); D is the union.

Distributed schedule (2k rounds): nodes flood adjacency lists for 2k rounds, after
which each v knows the adjacency of every vertex within 2k hops, enough to
compute q_w for all w in N^k[v] locally.

Small components: a vertex that sees its whole component and finds its diameter
<= 2k solves it exactly (every vertex of such a component sees all of it, so the
decision is unanimous). Wider components use the plain selection rule.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from types import MappingProxyType
from typing import Any, Iterable, Mapping

from backend import config
from backend.errors import InputError
from backend.tools.graph_core import (
    Graph,
    compute_U_sets,
    connected_components,
    diameter,
    k_ball,
    q_path_bound,
)
from backend.tools.local_runtime import (
    ExecutionTrace,
    NodeProgram,
    RoundResult,
    FloodState,
    merge_inbox,
    ball_from_knowledge,
    induced_from_knowledge,
    run,
)
from backend.tools.oracle import gamma_k_exact, is_distance_k_dominating
from backend.tools.voronoi import build_voronoi, two_cluster_edge_bound

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DomSetRun:
    k: int
    chosen: Mapping[int, int]
    dominators: frozenset[int]
    q: Mapping[int, int]
    rounds: int
    exact_vertices: frozenset[int] = frozenset()
    trace: ExecutionTrace | None = field(default=None, compare=False, repr=False)

    def to_payload(self) -> dict[str, Any]:
        out = {
            "k": self.k,
            "D": sorted(self.dominators),
            "size": len(self.dominators),
            "rounds": self.rounds,
            "chosen": {str(v): w for v, w in sorted(self.chosen.items())},
            "exact_vertices": sorted(self.exact_vertices),
        }
        if self.trace is not None:
            out["messages"] = self.trace.message_count
        return out


@lru_cache(maxsize=64)
def _component_optimum(comp: Graph, k: int, budget: int | None = None) -> frozenset[int]:
    # every vertex of a small component solves the same instance
    return gamma_k_exact(comp, k, budget).dominators


def _select(ball: Iterable[int], q: Mapping[int, int]) -> int:
    return max(ball, key=lambda w: (q[w], w))


class DomSetProgram(NodeProgram):
    name = "domset"

    def __init__(self, k: int, exact_small: bool = True, budget: int | None = None):
        self.k = k
        self.exact_small = exact_small
        self.budget = budget

    def init(self, node_id, neighbors):
        entry = {node_id: tuple(neighbors)}
        return FloodState(node_id, 0, entry, entry)

    def on_round(self, state: FloodState, inbox):
        known, fresh = merge_inbox(state, inbox)
        if state.calls == 0:
            fresh = dict(state.fresh)
        if state.calls < 2 * self.k:
            nxt = FloodState(state.node, state.calls + 1, known, fresh)
            return RoundResult(nxt, broadcast=fresh if fresh else None)

        v, k = state.node, self.k
        ball = ball_from_knowledge(known, v, k)
        q = {w: len(ball_from_knowledge(known, w, k)) for w in ball}
        exact = False
        if self.exact_small and all(y in known for ns in known.values() for y in ns):
            comp = induced_from_knowledge(known, known.keys())
            if diameter(comp) <= 2 * k:
                opt = _component_optimum(comp, k, self.budget)
                w = _select(opt & ball.keys(), q)
                exact = True
        if not exact:
            w = _select(ball, q)
        return RoundResult(state, halt=True, output=(w, q[v], exact))


def _check(g: Graph, k: int) -> None:
    if k < 1:
        raise InputError(f"DomSet needs k >= 1, got {k}")
    if g.n == 0:
        raise InputError("DomSet needs a non-empty graph")


def domset(g: Graph, k: int, *, exact_small: bool = True, max_rounds: int | None = None,
           budget: int | None = None, **run_opts) -> DomSetRun:
    """The DomSet rule executed on the LOCAL engine.

    `max_rounds` and `budget` (oracle nodes for the small-component shortcut) fall
    back to the .env knobs when omitted.
    """
    _check(g, k)
    trace = run(g, DomSetProgram(k, exact_small, budget),
                max_rounds if max_rounds is not None else config.max_rounds_for(k), **run_opts)
    out = trace.per_node_output
    chosen = {v: out[v][0] for v in sorted(out)}
    dom = DomSetRun(
        k=k,
        chosen=MappingProxyType(chosen),
        dominators=frozenset(chosen.values()),
        q=MappingProxyType({v: out[v][1] for v in sorted(out)}),
        rounds=trace.rounds_executed,
        exact_vertices=frozenset(v for v in out if out[v][2]),
        trace=trace,
    )
    log.info("domset k=%d n=%d: |D|=%d rounds=%d messages=%d",
             k, g.n, len(dom.dominators), dom.rounds, trace.message_count)
    return dom


def domset_centralized(g: Graph, k: int, *, exact_small: bool = True,
                       budget: int | None = None) -> DomSetRun:
    """The same selection computed with a global view; must agree with `domset`."""
    _check(g, k)
    balls = {v: k_ball(g, v, k) for v in g.vertices}
    q = {v: len(b) for v, b in balls.items()}
    chosen: dict[int, int] = {}
    exact_vs: set[int] = set()
    for comp in connected_components(g):
        sub = g.subgraph(comp)
        if exact_small and diameter(sub) <= 2 * k:
            opt = _component_optimum(sub, k, budget)
            for v in comp:
                chosen[v] = _select(opt & balls[v], q)
            exact_vs |= comp
        else:
            for v in comp:
                chosen[v] = _select(balls[v], q)
    return DomSetRun(
        k=k,
        chosen=MappingProxyType(dict(sorted(chosen.items()))),
        dominators=frozenset(chosen.values()),
        q=MappingProxyType(dict(sorted(q.items()))),
        rounds=2 * k,
        exact_vertices=frozenset(exact_vs),
    )


# ---------------- ratio diagnostics ----------------

def delta_ceiling(t: int, k: int) -> int:
    """beta_{k,t} * k^2 t^{2k t^k} (t+1) with beta = 2 * alpha_{3k,t}^k.

    |U_0| <= 2|C*| for cells with a border, and every U-step multiplies by at most
    alpha_{3k,t}; nothing tighter is derived.
    """
    beta = 2 * q_path_bound(3 * k, t) ** k
    return beta * two_cluster_edge_bound(k, t) * (t + 1)


@dataclass(frozen=True)
class RatioReport:
    k: int
    t: int
    d_size: int
    opt_size: int
    ratio: Fraction
    d_valid: bool
    rounds: int
    rounds_ok: bool
    ratio_ok: bool

    @property
    def passed(self) -> bool:
        return self.d_valid and self.rounds_ok and self.ratio_ok

    def to_payload(self) -> dict[str, Any]:
        return {
            "k": self.k, "t": self.t, "D": self.d_size, "gamma": self.opt_size,
            "ratio": float(self.ratio), "d_valid": self.d_valid,
            "rounds": self.rounds, "rounds_ok": self.rounds_ok,
            "ratio_ok": self.ratio_ok, "passed": self.passed,
        }


def verify_ratio(g: Graph, k: int, t: int, dom: DomSetRun, optimum: Iterable[int]) -> RatioReport:
    optimum = frozenset(optimum)
    if not optimum or not is_distance_k_dominating(g, optimum, k):
        raise InputError("the supplied optimum is not a distance-k dominating set")
    ratio = Fraction(len(dom.dominators), len(optimum))
    return RatioReport(
        k=k,
        t=t,
        d_size=len(dom.dominators),
        opt_size=len(optimum),
        ratio=ratio,
        d_valid=is_distance_k_dominating(g, dom.dominators, k),
        rounds=dom.rounds,
        rounds_ok=dom.rounds <= 2 * k + 2,
        ratio_ok=1 <= ratio <= delta_ceiling(t, k),
    )


def check_u_containment(g: Graph, k: int, dom: DomSetRun, optimum: Iterable[int]) -> dict[int, list[int]]:
    """Cells (keyed by center) where D ∩ C escapes U_k; empty when the containment holds."""
    cells = build_voronoi(g, optimum, k)
    bad: dict[int, list[int]] = {}
    for c in sorted(cells.cells):
        cell = cells.cells[c]
        picked = dom.dominators & cell
        if not picked:
            continue
        u_k = compute_U_sets(g, cell, cells.borders[c], cells.v_C[c], k)[-1]
        escaped = picked - u_k
        if escaped:
            bad[c] = sorted(escaped)
    return bad
