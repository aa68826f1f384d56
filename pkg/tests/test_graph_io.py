import json

import pytest

from backend.errors import InputError
from backend.tools.graph_core import Graph
from backend.tools.graph_io import dump_graph, graph_from_payload, graph_to_payload, load_graph


def test_payload_is_canonical():
    g = Graph([3, 1, 2], [(3, 2), (2, 1)])
    assert graph_to_payload(g) == {"n": 3, "vertices": [1, 2, 3], "edges": [[1, 2], [2, 3]]}


def test_payload_without_vertices_uses_endpoints():
    g = graph_from_payload({"edges": [[4, 5], [5, 6]]})
    assert g.vertices == frozenset({4, 5, 6})


def test_payload_keeps_isolated_vertices():
    g = graph_from_payload({"vertices": [1, 2, 9], "edges": [[1, 2]]})
    assert 9 in g.vertices and g.neighbors(9) == ()


@pytest.mark.parametrize("bad", [
    [],
    {"vertices": [1]},
    {"edges": [[1]]},
    {"edges": [["a", 2]]},
    {"n": 5, "edges": [[1, 2]]},
])
def test_payload_rejects_malformed(bad):
    with pytest.raises(InputError):
        graph_from_payload(bad)


def test_json_file(tmp_path, cycle):
    p = tmp_path / "sub" / "c6.json"
    dump_graph(cycle(6), str(p))
    assert json.loads(p.read_text())["n"] == 6
    assert load_graph(str(p)) == cycle(6)


def test_edge_list_file(tmp_path, path):
    p = tmp_path / "p4.txt"
    p.write_text("# a path\n1 2\n2 3\n\n3   4\n")
    assert load_graph(str(p)) == path(4)


def test_bad_files(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    with pytest.raises(InputError):
        load_graph(str(p))
    with pytest.raises(OSError):
        load_graph(str(tmp_path / "missing.json"))
