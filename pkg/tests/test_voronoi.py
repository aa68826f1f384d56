import pytest

from backend.errors import InputError
from backend.tools.domset import domset
from backend.tools.generators import FAMILIES, GeneratorSpec, generate, t_family
from backend.tools.graph_core import Graph, connected_components, k_ball
from backend.tools.oracle import gamma_k_exact
from backend.tools.voronoi import (
    border_bound,
    border_union,
    build_voronoi,
    cell_graph,
    intercell_edge_count,
    max_intercell_edges,
    nearest_centers,
    quotient_within_edge_bound,
    two_cluster_edge_bound,
)


def test_p5_cells_and_borders(path):
    p = build_voronoi(path(5), {1, 5}, k=1)
    assert dict(p.cells) == {1: {1, 2}, 5: {3, 4, 5}}
    assert dict(p.borders) == {1: {2}, 5: {3}}
    assert border_union(p) == {2, 3}
    assert p.v_C[5] == 4 and p.v_C[1] == 2


def test_v_c_depends_on_k(path):
    assert build_voronoi(path(5), {1, 5}, k=2).v_C[5] == 3
    # without k the minimum-eccentricity member wins
    assert build_voronoi(path(5), {1, 5}).v_C[5] == 4


def test_ties_go_to_larger_center(path):
    owner, dist = nearest_centers(path(3), {1, 3})
    assert owner == {1: 1, 2: 3, 3: 3}
    assert dist[2] == 1


def test_c6_intercell_edges(cycle):
    g = cycle(6)
    p = build_voronoi(g, {0, 3}, k=1)
    assert dict(p.cells) == {0: {0, 1, 5}, 3: {2, 3, 4}}
    assert intercell_edge_count(g, p, 0, 3) == 2
    assert max_intercell_edges(g, p) == 2
    with pytest.raises(InputError):
        intercell_edge_count(g, p, 0, 0)
    with pytest.raises(InputError):
        intercell_edge_count(g, p, 0, 4)


def test_cell_graph(path):
    g = path(5)
    h = cell_graph(g, build_voronoi(g, {1, 5}))
    assert h.quotient.edges() == [(1, 5)]
    assert quotient_within_edge_bound(h, 2)


def test_rejects_bad_centers(path):
    with pytest.raises(InputError):
        build_voronoi(path(4), set())
    with pytest.raises(InputError):
        build_voronoi(path(4), {7})
    with pytest.raises(InputError):
        build_voronoi(Graph([1, 2, 3], [(1, 2)]), {1})


def test_cells_partition_and_stay_connected(small_instances):
    for _, g in small_instances:
        for k in (1, 2):
            opt = gamma_k_exact(g, k).dominators
            p = build_voronoi(g, opt, k)
            assert set().union(*p.cells.values()) == g.vertices
            assert sum(len(c) for c in p.cells.values()) == g.n
            for c, cell in p.cells.items():
                assert c in cell
                assert cell <= k_ball(g, c, k)
                assert p.v_C[c] in cell
                assert cell <= k_ball(g, p.v_C[c], k)
                assert len(connected_components(g.subgraph(cell))) == 1
            assert quotient_within_edge_bound(cell_graph(g, p), 3)


def test_cells_around_domset_output(small_instances):
    for _, g in small_instances:
        dom = domset(g, 1)
        p = build_voronoi(g, dom.dominators)
        assert set(p.cell_of) == g.vertices


def test_closed_forms():
    assert two_cluster_edge_bound(1, 2) == 16
    assert border_bound(1, 2, 3) == 144


@pytest.mark.parametrize("family", FAMILIES)
def test_cells_on_optimum_stay_under_ceilings(family):
    t = t_family(family)
    for seed in range(5):
        g = generate(GeneratorSpec(family=family, n=14, seed=seed))
        for k in (1, 2):
            opt = gamma_k_exact(g, k).dominators
            p = build_voronoi(g, opt, k)
            assert max_intercell_edges(g, p) <= two_cluster_edge_bound(k, t)
            assert len(border_union(p)) <= border_bound(k, t, len(opt))
