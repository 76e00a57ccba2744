import random

import pytest

from core.arborescence import min_storage
from core.version_graph import VersionGraph


def build_random_tree(seed: int, n: int) -> VersionGraph:
    """Árvore bidirecional com custos independentes em cada sentido."""
    rng = random.Random(seed)
    costs = [rng.randint(5, 40) for _ in range(n)]
    edges = []
    for v in range(1, n):
        u = rng.randrange(v)
        edges.append((u, v, rng.randint(1, 15), rng.randint(0, 10)))
        edges.append((v, u, rng.randint(1, 15), rng.randint(0, 10)))
    return VersionGraph.from_edges(costs, edges)


def build_random_connected(seed: int, n: int, extra: float = 0.35) -> VersionGraph:
    """Árvore aleatória mais atalhos, às vezes em um único sentido."""
    rng = random.Random(seed)
    base = build_random_tree(seed, n)
    pairs = base.undirected_pairs()
    edges = list(base.edge_tuples())
    for u in range(n):
        for v in range(u + 1, n):
            if (u, v) in pairs or rng.random() >= extra:
                continue
            mode = rng.choice(("both", "forward", "backward"))
            if mode in ("both", "forward"):
                edges.append((u, v, rng.randint(1, 15), rng.randint(0, 10)))
            if mode in ("both", "backward"):
                edges.append((v, u, rng.randint(1, 15), rng.randint(0, 10)))
    return VersionGraph.from_edges(base.node_costs, edges)


def build_width_two(seed: int, n: int) -> VersionGraph:
    """Árvore aleatória com arestas até o avô: treewidth no máximo 2."""
    rng = random.Random(seed)
    costs = [rng.randint(5, 40) for _ in range(n)]
    parent = [None] + [rng.randrange(v) for v in range(1, n)]
    edges = []

    def connect(u: int, v: int):
        edges.append((u, v, rng.randint(1, 15), rng.randint(0, 10)))
        if rng.random() < 0.7:
            edges.append((v, u, rng.randint(1, 15), rng.randint(0, 10)))

    for v in range(1, n):
        connect(parent[v], v)
        grand = parent[parent[v]]
        if grand is not None and rng.random() < 0.5:
            connect(grand, v)
    return VersionGraph.from_edges(costs, edges)


def budget_sweep(g: VersionGraph, points: int = 5) -> list[int]:
    low, high = min_storage(g), sum(g.node_costs)
    if points == 1:
        return [low]
    return sorted({low + (high - low) * i // (points - 1) for i in range(points)})


@pytest.fixture
def fig4() -> VersionGraph:
    """Cadeia A -> B -> C com a=1000, b=10, c=100."""
    return VersionGraph.from_edges([1000, 10, 100], [(0, 1, 9, 9), (1, 2, 90, 90)])


@pytest.fixture
def fig4_tree() -> VersionGraph:
    """A mesma cadeia com deltas reversos de custo igual."""
    return VersionGraph.from_edges(
        [1000, 10, 100],
        [(0, 1, 9, 9), (1, 0, 9, 9), (1, 2, 90, 90), (2, 1, 90, 90)],
    )


@pytest.fixture
def two_node() -> VersionGraph:
    return VersionGraph.from_edges([10, 8], [(0, 1, 3, 2), (1, 0, 4, 1)])


@pytest.fixture
def random_tree():
    return build_random_tree


@pytest.fixture
def random_connected():
    return build_random_connected


@pytest.fixture
def write_text(tmp_path):
    def write(name: str, content: str):
        path = tmp_path / name
        path.write_text(content, encoding="utf-8")
        return path

    return write
