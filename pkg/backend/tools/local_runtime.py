# backend/tools/local_runtime.py
"""
Round-synchronous LOCAL engine.
- Call 0 of on_round sees an empty inbox; messages sent in call r arrive in call r+1
- A node knows its own id and its neighbors' ids from init
- Inboxes are keyed by sender and filled in ascending sender order, so evaluation
  order (sequential, shuffled or threaded) can never be observed by a program
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Literal, Mapping

from backend.errors import InputError, KdomError, RoundLimitExceeded
from backend.tools.graph_core import Graph
from backend.tools.prng import SplitMix64

log = logging.getLogger(__name__)

Order = Literal["ascending", "shuffled"]


@dataclass(frozen=True)
class RoundResult:
    state: Any
    send: Mapping[int, Any] = field(default_factory=dict)
    broadcast: Any = None
    halt: bool = False
    output: Any = None

    def outgoing(self, neighbors: tuple[int, ...]) -> dict[int, Any]:
        out = {u: self.broadcast for u in neighbors} if self.broadcast is not None else {}
        out.update(self.send)
        return out


class NodeProgram(ABC):
    """Per-vertex process. Must be deterministic and keep all state in `state`."""

    name = "program"

    @abstractmethod
    def init(self, node_id: int, neighbors: tuple[int, ...]) -> Any: ...

    @abstractmethod
    def on_round(self, state: Any, inbox: Mapping[int, Any]) -> RoundResult: ...


@dataclass(frozen=True)
class ExecutionTrace:
    rounds_executed: int
    per_node_output: Mapping[int, Any]
    message_count: int
    running: frozenset[int] = frozenset()

    def to_payload(self) -> dict[str, Any]:
        return {
            "rounds": self.rounds_executed,
            "messages": self.message_count,
            "outputs": {str(v): _jsonable(o) for v, o in sorted(self.per_node_output.items())},
        }


def _jsonable(x: Any) -> Any:
    if isinstance(x, Graph):
        return {"vertices": sorted(x.vertices), "edges": [list(e) for e in x.edges()]}
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    if isinstance(x, tuple):
        return [_jsonable(y) for y in x]
    if isinstance(x, Mapping):
        return {str(k): _jsonable(v) for k, v in x.items()}
    return x


def run(
    g: Graph,
    program: NodeProgram,
    max_rounds: int,
    *,
    workers: int = 1,
    order: Order = "ascending",
    seed: int = 0,
) -> ExecutionTrace:
    if max_rounds < 0:
        raise InputError(f"max_rounds must be >= 0, got {max_rounds}")
    states = {v: program.init(v, g.neighbors(v)) for v in sorted(g.vertices)}
    inbox: dict[int, dict[int, Any]] = {v: {} for v in states}
    active = sorted(states)
    outputs: dict[int, Any] = {}
    messages = 0
    last_halt = 0
    shuffler = SplitMix64(seed) if order == "shuffled" else None
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None

    def step(v: int) -> RoundResult:
        return program.on_round(states[v], MappingProxyType(inbox[v]))

    try:
        for r in range(max_rounds + 1):
            if not active:
                break
            schedule = list(active)
            if shuffler is not None:
                shuffler.shuffle(schedule)
            results = pool.map(step, schedule) if pool else map(step, schedule)
            by_node = dict(zip(schedule, results))

            next_inbox: dict[int, dict[int, Any]] = {v: {} for v in active}
            halted = []
            for v in active:
                res = by_node[v]
                states[v] = res.state
                nbrs = g.neighbors(v)
                for u, msg in res.outgoing(nbrs).items():
                    if u not in nbrs:
                        raise KdomError(f"{program.name}: node {v} addressed non-neighbor {u}")
                    messages += 1
                    if u in next_inbox:
                        next_inbox[u][v] = msg
                if res.halt:
                    outputs[v] = res.output
                    halted.append(v)
            if halted:
                last_halt = r
                done = set(halted)
                active = [v for v in active if v not in done]
            inbox = {v: next_inbox[v] for v in active}
            log.debug("%s round %d: %d halted, %d running, %d messages so far",
                      program.name, r, len(halted), len(active), messages)
    finally:
        if pool:
            pool.shutdown(wait=True)

    trace = ExecutionTrace(
        rounds_executed=last_halt,
        per_node_output=MappingProxyType(outputs),
        message_count=messages,
        running=frozenset(active),
    )
    if active:
        raise RoundLimitExceeded(
            f"{program.name}: {len(active)} node(s) still running after {max_rounds} rounds", trace
        )
    return trace


# ---------------- k-hop gathering ----------------

@dataclass(frozen=True)
class FloodState:
    node: int
    calls: int
    known: Mapping[int, tuple[int, ...]]
    fresh: Mapping[int, tuple[int, ...]]


def merge_inbox(state: FloodState, inbox: Mapping[int, Any]) -> tuple[dict, dict]:
    known = dict(state.known)
    fresh = {}
    for sender in sorted(inbox):
        for x, nbrs in inbox[sender].items():
            if x not in known:
                known[x] = nbrs
                fresh[x] = nbrs
    return known, fresh


def ball_from_knowledge(known: Mapping[int, tuple[int, ...]], root: int, k: int) -> dict[int, int]:
    """BFS depth <= k over the adjacency lists a node has collected."""
    dist = {root: 0}
    frontier = [root]
    for d in range(1, k + 1):
        nxt = []
        for x in frontier:
            for y in known[x]:
                if y not in dist:
                    dist[y] = d
                    nxt.append(y)
        frontier = nxt
    return dist


def induced_from_knowledge(known: Mapping[int, tuple[int, ...]], vertices) -> Graph:
    vs = frozenset(vertices)
    return Graph(vs, ((x, y) for x in vs for y in known[x] if y in vs and x < y))


class GatherKHop(NodeProgram):
    """After k rounds every node outputs the subgraph induced on its k-ball."""

    name = "gather_k_hop"

    def __init__(self, k: int):
        if k < 0:
            raise InputError(f"radius must be >= 0, got {k}")
        self.k = k

    def init(self, node_id, neighbors):
        entry = {node_id: tuple(neighbors)}
        return FloodState(node_id, 0, entry, entry)

    def on_round(self, state: FloodState, inbox):
        known, fresh = merge_inbox(state, inbox)
        if state.calls == 0:
            fresh = dict(state.fresh)
        if state.calls == self.k:
            ball = ball_from_knowledge(known, state.node, self.k)
            return RoundResult(state, halt=True, output=induced_from_knowledge(known, ball))
        nxt = FloodState(state.node, state.calls + 1, known, fresh)
        return RoundResult(nxt, broadcast=fresh if fresh else None)


def gather_k_hop(g: Graph, k: int, **run_opts) -> dict[int, Graph]:
    trace = run(g, GatherKHop(k), max_rounds=k, **run_opts)
    return dict(trace.per_node_output)
