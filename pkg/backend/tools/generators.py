# backend/tools/generators.py
"""
Seeded generators for K_{2,t}-minor-free families.
- ids are 1..n in construction order; every draw comes from SplitMix64(seed)
- t_family: trees 2; cycles, maximal outerplanar, cacti and fans 3
"""

from __future__ import annotations

from typing import Callable, Literal

from pydantic import BaseModel, Field

from backend.errors import InputError
from backend.tools.graph_core import Graph, diameter
from backend.tools.prng import SplitMix64

Family = Literal["path", "cycle", "star", "random-tree", "maximal-outerplanar", "cactus", "fan"]
FAMILIES: tuple[str, ...] = ("path", "cycle", "star", "random-tree", "maximal-outerplanar", "cactus", "fan")


class GeneratorSpec(BaseModel):
    family: Family
    n: int = Field(ge=1)
    seed: int = 0
    max_degree: int | None = Field(default=None, ge=1)

    @property
    def label(self) -> str:
        cap = f"-d{self.max_degree}" if self.max_degree is not None else ""
        return f"{self.family}-n{self.n}-s{self.seed}{cap}"


def t_family(family: str) -> int:
    if family not in FAMILIES:
        raise InputError(f"unknown family {family!r}")
    return 2 if family in ("path", "star", "random-tree") else 3


# -------- families --------

def _path(n: int, rng: SplitMix64) -> list[tuple[int, int]]:
    return [(i, i + 1) for i in range(1, n)]


def _cycle(n: int, rng: SplitMix64) -> list[tuple[int, int]]:
    return _path(n, rng) + [(n, 1)]


def _star(n: int, rng: SplitMix64) -> list[tuple[int, int]]:
    return [(1, i) for i in range(2, n + 1)]


def _fan(n: int, rng: SplitMix64) -> list[tuple[int, int]]:
    # apex 1 over the path 2..n
    return [(1, i) for i in range(2, n + 1)] + [(i, i + 1) for i in range(2, n)]


def _random_tree(n: int, rng: SplitMix64, max_degree: int | None = None) -> list[tuple[int, int]]:
    deg = [0] * (n + 1)
    edges = []
    for v in range(2, n + 1):
        if max_degree is None:
            parent = rng.between(1, v - 1)
        else:
            open_ = [u for u in range(1, v) if deg[u] < max_degree]
            parent = rng.choice(open_)
        deg[parent] += 1
        deg[v] += 1
        edges.append((parent, v))
    return edges


def _maximal_outerplanar(n: int, rng: SplitMix64) -> list[tuple[int, int]]:
    """Triangulated n-gon: clip a uniformly chosen ear until a triangle is left."""
    if n <= 2:
        return _path(n, rng)
    edges = _cycle(n, rng)
    poly = list(range(1, n + 1))
    while len(poly) > 3:
        i = rng.below(len(poly))
        a, b = poly[i - 1], poly[(i + 1) % len(poly)]
        edges.append((a, b))
        del poly[i]
    return edges


def _cactus(n: int, rng: SplitMix64) -> list[tuple[int, int]]:
    """Hang a fresh cycle or a pendant edge on a random existing vertex."""
    edges = []
    size = 1
    while size < n:
        root = rng.between(1, size)
        room = n - size
        if room >= 2 and rng.below(2) == 0:
            length = rng.between(3, min(room + 1, 8))
            ring = [root] + list(range(size + 1, size + length))
            edges += [(ring[i], ring[(i + 1) % length]) for i in range(length)]
            size += length - 1
        else:
            edges.append((root, size + 1))
            size += 1
    return edges


_BUILDERS: dict[str, Callable[[int, SplitMix64], list[tuple[int, int]]]] = {
    "path": _path,
    "cycle": _cycle,
    "star": _star,
    "random-tree": _random_tree,
    "maximal-outerplanar": _maximal_outerplanar,
    "cactus": _cactus,
    "fan": _fan,
}


def generate(spec: GeneratorSpec) -> Graph:
    if spec.family == "cycle" and spec.n < 3:
        raise InputError(f"a cycle needs n >= 3, got {spec.n}")
    if spec.max_degree is not None:
        if spec.family != "random-tree":
            raise InputError("max_degree only applies to random-tree")
        if spec.max_degree < 2 and spec.n > 2:
            raise InputError(f"a tree on {spec.n} vertices needs max_degree >= 2")
    rng = SplitMix64(spec.seed)
    if spec.family == "random-tree":
        edges = _random_tree(spec.n, rng, spec.max_degree)
    else:
        edges = _BUILDERS[spec.family](spec.n, rng)
    return Graph(range(1, spec.n + 1), edges)


def permute_ids(g: Graph, seed: int) -> Graph:
    """Relabel the vertex ids among themselves with a seeded permutation."""
    ids = sorted(g.vertices)
    image = list(ids)
    SplitMix64(seed).shuffle(image)
    relabel = dict(zip(ids, image))
    return Graph(image, ((relabel[u], relabel[v]) for u, v in g.edges()))


def diameter_gate(g: Graph, k: int) -> bool:
    """diam(g) >= 4k; the seed's ratio guarantee needs it."""
    d = diameter(g)
    if d == float("inf"):
        raise InputError("diameter_gate needs a connected graph")
    return d >= 4 * k
