import pytest

from backend.errors import KdomError, RoundLimitExceeded
from backend.tools.domset import domset
from backend.tools.graph_core import Graph, bfs_distances
from backend.tools.local_runtime import GatherKHop, NodeProgram, RoundResult, gather_k_hop, run


class HaltNow(NodeProgram):
    name = "halt-now"

    def init(self, node_id, neighbors):
        return node_id

    def on_round(self, state, inbox):
        return RoundResult(state, halt=True, output=state)


class Spin(NodeProgram):
    name = "spin"

    def init(self, node_id, neighbors):
        return node_id

    def on_round(self, state, inbox):
        return RoundResult(state)


class WrongAddress(NodeProgram):
    def init(self, node_id, neighbors):
        return node_id

    def on_round(self, state, inbox):
        return RoundResult(state, send={state + 100: "hi"})


class SumOfNeighbors(NodeProgram):
    """Round 0 sends the own id; round 1 outputs the sum of what arrived."""

    def init(self, node_id, neighbors):
        return (node_id, 0)

    def on_round(self, state, inbox):
        v, calls = state
        if calls == 0:
            return RoundResult((v, 1), broadcast=v)
        return RoundResult(state, halt=True, output=sum(inbox.values()))


def test_halt_immediately(path):
    trace = run(path(5), HaltNow(), max_rounds=3)
    assert trace.rounds_executed == 0
    assert dict(trace.per_node_output) == {v: v for v in range(1, 6)}
    assert trace.message_count == 0


def test_messages_arrive_next_round(cycle):
    trace = run(cycle(5), SumOfNeighbors(), max_rounds=4)
    assert trace.rounds_executed == 1
    assert trace.per_node_output[0] == 1 + 4
    assert trace.message_count == 10


def test_round_limit_carries_partial_trace(path):
    with pytest.raises(RoundLimitExceeded) as err:
        run(path(3), Spin(), max_rounds=2)
    assert err.value.trace.running == {1, 2, 3}


def test_non_neighbor_message_is_rejected(path):
    with pytest.raises(KdomError):
        run(path(3), WrongAddress(), max_rounds=2)


def test_gather_on_p5(path):
    g = path(5, start=0)
    trace = run(g, GatherKHop(2), max_rounds=2)
    assert trace.rounds_executed == 2
    assert trace.per_node_output[2] == g
    assert trace.per_node_output[0].vertices == {0, 1, 2}


def test_gather_k_zero_is_self_only(cycle):
    out = gather_k_hop(cycle(6), 0)
    assert all(sub.vertices == {v} and sub.m == 0 for v, sub in out.items())


def test_gather_star_and_cycle(cycle):
    star = Graph(range(4), [(0, 1), (0, 2), (0, 3)])
    out = gather_k_hop(star, 1)
    assert out[0] == star
    assert out[2].vertices == {0, 2} and out[2].edges() == [(0, 2)]

    c6 = cycle(6)
    assert all(sub == c6 for sub in gather_k_hop(c6, 3).values())


def test_outputs_do_not_depend_on_evaluation_order(small_instances):
    for _, g in small_instances[:6]:
        base = gather_k_hop(g, 2)
        assert gather_k_hop(g, 2, order="shuffled", seed=11) == base
        assert gather_k_hop(g, 2, workers=3) == base


def _with_edge(g: Graph, a: int, b: int) -> Graph:
    return Graph(g.vertices, g.edges() + [(a, b)])


def test_p12_output_ignores_far_edge(path):
    g = path(12)
    far = _with_edge(g, 10, 12)
    assert gather_k_hop(far, 2)[1] == gather_k_hop(g, 2)[1]
    assert domset(far, 1).chosen[1] == domset(g, 1).chosen[1]


def test_output_ignores_edges_outside_the_ball(small_instances):
    # gather_k_hop(2) reads N^2[v]; DomSet with k=1 reads N^2[v] as well
    r = 2
    for read in (lambda h, v: gather_k_hop(h, 2)[v], lambda h, v: domset(h, 1).chosen[v]):
        checked = 0
        for _, g in small_instances:
            v = min(g.vertices)
            dist = bfs_distances(g, v)
            outside = sorted(u for u in g.vertices if dist.get(u, r + 1) > r)
            pairs = [(a, b) for i, a in enumerate(outside) for b in outside[i + 1:]
                     if b not in g.neighbors(a)]
            if not pairs:
                continue
            a, b = pairs[0]
            assert read(_with_edge(g, a, b), v) == read(g, v)
            checked += 1
        assert checked > 0
