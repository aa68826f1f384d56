import pytest

from backend.tools.generators import GeneratorSpec, generate
from backend.tools.graph_core import Graph


def _path(n: int, start: int = 1) -> Graph:
    return Graph(range(start, start + n), [(i, i + 1) for i in range(start, start + n - 1)])


def _cycle(n: int, start: int = 0) -> Graph:
    vs = list(range(start, start + n))
    return Graph(vs, [(vs[i], vs[(i + 1) % n]) for i in range(n)])


@pytest.fixture
def path():
    """path(n, start=1) -> P_n with consecutive ids."""
    return _path


@pytest.fixture
def cycle():
    """cycle(n, start=0) -> C_n with consecutive ids."""
    return _cycle


@pytest.fixture
def complete():
    def build(n: int) -> Graph:
        return Graph(range(n), [(u, v) for u in range(n) for v in range(u + 1, n)])
    return build


@pytest.fixture
def small_instances():
    """A few seeded instances from every family, small enough for exhaustive checks."""
    out = []
    for fam in ("path", "cycle", "star", "random-tree", "maximal-outerplanar", "cactus", "fan"):
        for n in (6, 9):
            for seed in (0, 1):
                out.append((fam, generate(GeneratorSpec(family=fam, n=n, seed=seed))))
    return out
