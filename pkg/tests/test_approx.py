from fractions import Fraction

import pytest

from backend.errors import InputError
from backend.tools.approx import (
    audit_inequality,
    block_is_minimal,
    bounded_degree_approx,
    bounded_degree_epsilon,
    c_gamma_bounded,
    degree_certificate,
    k_domset_approx,
    lift_partition,
    theoretical_epsilon,
    solve_block_exact,
    star_cells,
    transfer_holds,
)
from backend.tools.decomposition import ClusterPartition
from backend.tools.domset import delta_ceiling, domset
from backend.tools.generators import GeneratorSpec, diameter_gate, generate
from backend.tools.graph_core import Graph
from backend.tools.oracle import gamma_k_exact
from backend.tools.voronoi import build_voronoi


def test_solve_block_exact(path):
    g = path(5)
    assert solve_block_exact(g, {3, 4, 5}, {3}, 1) == {4}
    assert solve_block_exact(g, {1, 2, 3}, {2}, 1) == frozenset()
    with pytest.raises(InputError):
        solve_block_exact(g, {3, 4, 5}, {1}, 1)
    with pytest.raises(InputError):
        solve_block_exact(g, set(), set(), 1)


def test_block_is_minimal(path):
    g = path(5)
    assert block_is_minimal(g, {3, 4, 5}, {3}, 1, {4})
    assert not block_is_minimal(g, {3, 4, 5}, {3}, 1, {4, 5})


def test_theoretical_mode_keeps_one_block(path):
    g = path(20)
    run = k_domset_approx(g, 2, 2, alpha="1/2")
    assert run.mode == "theoretical"
    assert run.epsilon_used == theoretical_epsilon("1/2", 2, 2)
    assert run.audit.single_block
    assert run.added == frozenset()
    assert run.Q == {3, 8, 13, 18}
    assert run.audit.q_valid and run.audit.diameter_gate
    assert audit_inequality(run, 4)


def test_direct_mode_on_p20(path):
    g = path(20)
    run = k_domset_approx(g, 2, 2, epsilon="1/2")
    assert run.mode == "direct"
    assert run.D_seed == frozenset(range(3, 19))
    assert run.P.blocks == (frozenset(range(11, 19)), frozenset(range(3, 11)))
    assert run.blocks == (frozenset(range(11, 21)), frozenset(range(1, 11)))
    assert run.added == {10, 11}
    assert run.Q_blocks == (frozenset({13, 18}), frozenset({1, 5}))
    assert run.Q == {1, 5, 10, 11, 13, 18}
    assert run.audit.q_valid and run.audit.lift_ok and run.audit.cell_lift_ok
    assert audit_inequality(run, gamma_k_exact(g, 2).size)
    payload = run.to_payload()
    assert payload["epsilon"] == "1/2"
    assert payload["audit"]["Q"] == 6 and payload["audit"]["added"] == 2


def test_reusing_a_domset_run(path):
    g = path(20)
    dom = domset(g, 2)
    assert k_domset_approx(g, 2, 2, epsilon="1/2", dom=dom).Q == k_domset_approx(g, 2, 2, epsilon="1/2").Q


def test_parallel_block_solves_agree():
    g = generate(GeneratorSpec(family="cactus", n=40, seed=3))
    a = k_domset_approx(g, 1, 3, epsilon="3/10")
    b = k_domset_approx(g, 1, 3, epsilon="3/10", workers=3)
    assert a.Q == b.Q


def test_pipeline_on_generated_graphs():
    for fam in ("path", "cycle", "random-tree", "maximal-outerplanar", "cactus"):
        for seed in range(2):
            g = generate(GeneratorSpec(family=fam, n=30, seed=seed))
            for k in (1, 2):
                gamma = gamma_k_exact(g, k).size
                for eps in ("1/10", "3/10"):
                    run = k_domset_approx(g, k, 3, epsilon=eps)
                    assert run.audit.q_valid
                    assert run.audit.lift_ok
                    assert audit_inequality(run, gamma)
                    assert run.audit.diameter_gate == diameter_gate(g, k)


@pytest.mark.parametrize("kwargs", [
    dict(k=0, t=2, epsilon="1/2"),
    dict(k=1, t=1, epsilon="1/2"),
    dict(k=1, t=2),
    dict(k=1, t=2, alpha="1"),
    dict(k=1, t=2, epsilon="1/2", mode="fuzzy"),
    dict(k=1, t=2, mode="direct"),
])
def test_rejects_bad_arguments(path, kwargs):
    with pytest.raises(InputError):
        k_domset_approx(path(10), **kwargs)


def test_rejects_disconnected_graph():
    with pytest.raises(InputError):
        k_domset_approx(Graph([1, 2, 3, 4], [(1, 2), (3, 4)]), 1, 2, epsilon="1/2")


def test_short_graph_runs_without_gate(path):
    run = k_domset_approx(path(5), 2, 2, epsilon="1/2")
    assert not run.audit.diameter_gate
    assert run.audit.q_valid


def test_lift_partition_checks_labels(path):
    g = path(5)
    cells = build_voronoi(g, {1, 5}, 1)
    blocks, boundary = lift_partition(
        g, cells, ClusterPartition((frozenset({1, 5}),), frozenset(), 1, Fraction(1, 2)))
    assert blocks == (frozenset(range(1, 6)),) and boundary == frozenset()
    blocks, boundary = lift_partition(
        g, cells, ClusterPartition((frozenset({1}), frozenset({5})), frozenset({1, 5}), 0, Fraction(1, 2)))
    assert boundary == {2, 3}
    with pytest.raises(InputError):
        lift_partition(g, cells, ClusterPartition((frozenset({1}),), frozenset(), 0, Fraction(1, 2)))
    with pytest.raises(InputError):
        lift_partition(g, cells, ClusterPartition((frozenset({1, 5}), frozenset({5})), frozenset(), 0, Fraction(1, 2)))


# ---------------- bounded-degree variant ----------------

def test_star_cells(path):
    p = star_cells(path(5), {2, 4})
    assert dict(p.cells) == {2: {1, 2}, 4: {3, 4, 5}}
    assert dict(p.v_C) == {2: 2, 4: 4}
    assert dict(p.borders) == {2: {2}, 4: {3}}
    with pytest.raises(InputError):
        star_cells(path(5), {1})


def test_transfer_holds(path):
    g = path(6)
    halves = (frozenset({1, 2, 3}), frozenset({4, 5, 6}))
    assert transfer_holds(g, 1, halves, frozenset({3, 4}))
    assert not transfer_holds(g, 1, halves, frozenset({1}))


def test_bounded_degree_direct_on_p20(path):
    g = path(20)
    run = bounded_degree_approx(g, 2, 2, epsilon="1/2")
    assert run.variant == "bounded-degree"
    assert run.D_seed == frozenset(range(2, 20))
    assert run.P.boundary == {3, 4, 11, 12}
    assert run.added == {3, 4, 11, 12}
    assert run.blocks == (frozenset(range(12, 21)), frozenset(range(4, 12)), frozenset({1, 2, 3}))
    assert run.Q == {3, 4, 6, 11, 12, 13, 18}
    assert run.audit.q_valid and run.audit.transfer_ok
    assert audit_inequality(run, 4)


def test_bounded_degree_theoretical_mode_needs_c(path):
    with pytest.raises(InputError):
        bounded_degree_approx(path(20), 2, 2, alpha="1/2")
    run = bounded_degree_approx(path(20), 2, 2, C=12, alpha="1/2")
    assert run.epsilon_used == bounded_degree_epsilon("1/2", 2, 12)
    assert run.audit.single_block and run.audit.q_valid


def test_bounded_degree_on_capped_trees():
    for seed in range(3):
        g = generate(GeneratorSpec(family="random-tree", n=30, seed=seed, max_degree=3))
        for k in (1, 2):
            run = bounded_degree_approx(g, k, 2, epsilon="3/10")
            assert run.audit.q_valid
            assert run.audit.transfer_ok
            assert audit_inequality(run, gamma_k_exact(g, k).size)


def test_epsilon_formulas():
    assert bounded_degree_epsilon("1/2", 3, 24) == Fraction(1, 2) / (delta_ceiling(3, 1) * 24)
    with pytest.raises(InputError):
        bounded_degree_epsilon("1/2", 3, 0)
    eps = theoretical_epsilon("1/2", 1, 2)
    assert 0 < eps < Fraction(1, 10 ** 6)


def test_degree_certificate_and_boundedness(path):
    assert degree_certificate(path(20), 2) == 12
    star = Graph(range(6), [(0, i) for i in range(1, 6)])
    assert degree_certificate(star, 1) == 5 * 4
    assert c_gamma_bounded(path(30), 3, 24)
    assert not c_gamma_bounded(path(30), 3, 1)
