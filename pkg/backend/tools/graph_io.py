# backend/tools/graph_io.py
# Canonical graph files: JSON {"n", "vertices", "edges"} (u<v, sorted) or "u v" edge lists.

import json
import os
from typing import Any

import pandas as pd

from backend.errors import InputError
from backend.tools.graph_core import Graph


def graph_to_payload(g: Graph) -> dict[str, Any]:
    return {"n": g.n, "vertices": sorted(g.vertices), "edges": [[u, v] for u, v in g.edges()]}


def graph_from_payload(data: Any) -> Graph:
    if not isinstance(data, dict) or "edges" not in data:
        raise InputError("graph JSON must be an object with an 'edges' list")
    try:
        edges = [(int(u), int(v)) for u, v in data["edges"]]
    except (TypeError, ValueError) as e:
        raise InputError(f"malformed edge list: {e}") from None
    vertices = data.get("vertices")
    if vertices is None:
        vertices = {x for e in edges for x in e}
    g = Graph(vertices, edges)
    if "n" in data and int(data["n"]) != g.n:
        raise InputError(f"'n' says {data['n']} but {g.n} vertices were given")
    return g


def _read_edge_list(path: str) -> Graph:
    try:
        df = pd.read_csv(path, sep=r"\s+", header=None, names=["u", "v"],
                         comment="#", dtype="Int64", engine="python")
    except pd.errors.EmptyDataError:
        return Graph([], [])
    except ValueError as e:
        raise InputError(f"{os.path.basename(path)}: not a 'u v' edge list ({e})") from None
    df = df.dropna()
    return Graph.from_edges((int(u), int(v)) for u, v in zip(df["u"], df["v"]))


def load_graph(path: str) -> Graph:
    """Read canonical JSON, falling back to whitespace edge-list text."""
    with open(path, "r", encoding="utf-8") as f:
        head = f.read(1 << 12).lstrip()
    if head.startswith("{"):
        with open(path, "r", encoding="utf-8") as f:
            try:
                data = json.load(f)
            except json.JSONDecodeError as e:
                raise InputError(f"{os.path.basename(path)}: invalid JSON ({e})") from None
        return graph_from_payload(data)
    return _read_edge_list(path)


def dumps_graph(g: Graph) -> str:
    return json.dumps(graph_to_payload(g), separators=(",", ":")) + "\n"


def dump_graph(g: Graph, path: str) -> None:
    d = os.path.dirname(path)
    if d:
        os.makedirs(d, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(dumps_graph(g))
