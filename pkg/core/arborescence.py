"""Arborescência geradora mínima (Chu-Liu/Edmonds por contração de ciclos)."""
import logging
from enum import Enum

import networkx as nx

from core.evaluation import evaluate
from core.exceptions import UnreachableNode
from core.version_graph import SELF, ExtendedGraph, Solution, VersionGraph, extend_with_aux_root

logger = logging.getLogger(__name__)

# (origem, destino, peso, id da aresta original)
Arc = tuple[int, int, int, int]


class Weight(str, Enum):
    STORAGE = "s"
    RETRIEVAL = "r"
    COMBINED = "s+r"

    def of(self, storage: int, retrieval: int) -> int:
        if self is Weight.STORAGE:
            return storage
        if self is Weight.RETRIEVAL:
            return retrieval
        return storage + retrieval


def _chu_liu_edmonds(nodes: set[int], arcs: list[Arc], root: int) -> set[int]:
    """
    Ids das arestas da arborescência mínima enraizada em `root`.

    Cada nó escolhe a entrada mais barata; um ciclo entre as escolhas vira um
    nó contraído cujas entradas pagam a diferença para a aresta que substituem.
    Pressupõe todo nó alcançável a partir da raiz.
    """
    best: dict[int, Arc] = {}
    for arc in arcs:
        u, v, w, _ = arc
        if v == root or u == v:
            continue
        if v not in best or w < best[v][2]:
            best[v] = arc

    chosen = nx.DiGraph()
    chosen.add_edges_from((u, v) for u, v, _, _ in best.values())
    try:
        cycle = nx.find_cycle(chosen)
    except nx.NetworkXNoCycle:
        return {eid for *_, eid in best.values()}

    members = {u for u, _ in cycle}
    contracted = max(nodes) + 1
    reduced: list[Arc] = []
    enters: dict[int, int] = {}
    for u, v, w, eid in arcs:
        if u in members and v in members:
            continue
        if v in members:
            reduced.append((u, contracted, w - best[v][2], eid))
            enters[eid] = v
        elif u in members:
            reduced.append((contracted, v, w, eid))
        else:
            reduced.append((u, v, w, eid))

    picked = _chu_liu_edmonds((nodes - members) | {contracted}, reduced, root)
    broken = next(enters[eid] for eid in picked if eid in enters)
    return picked | {best[v][3] for v in members if v != broken}


def _arborescence_parents(n_nodes: int, edges: list[tuple[int, int, int]], root: int) -> dict[int, int]:
    """Pais da arborescência mínima enraizada em `root` sobre arestas (u, v, peso)."""
    usable = sorted((u, v, w) for u, v, w in edges if v != root and u != v)
    reach = nx.DiGraph()
    reach.add_nodes_from(range(n_nodes))
    reach.add_edges_from((u, v) for u, v, _ in usable)
    reachable = nx.descendants(reach, root)
    for v in range(n_nodes):
        if v != root and v not in reachable:
            raise UnreachableNode(v, root)
    if n_nodes == 1:
        return {}

    # Desempate determinístico: peso * K + posição da aresta na ordem (src, dst)
    scale = n_nodes * len(usable) + 1
    arcs = [(u, v, w * scale + rank, rank) for rank, (u, v, w) in enumerate(usable)]
    picked = _chu_liu_edmonds(set(range(n_nodes)), arcs, root)
    parents = {usable[eid][1]: usable[eid][0] for eid in picked}
    for v in range(n_nodes):
        if v != root and v not in parents:
            raise UnreachableNode(v, root)
    return parents


def min_arborescence(g: ExtendedGraph | VersionGraph, root: int | None = None,
                     weight: Weight = Weight.STORAGE) -> Solution:
    """
    Arborescência de peso mínimo interpretada como Solution.

    Para um ExtendedGraph a raiz padrão é a auxiliar e (aux, v) vira
    materialização; para um VersionGraph a raiz é obrigatória e fica
    materializada.
    """
    if isinstance(g, ExtendedGraph):
        base = g.base
        root = g.aux_root if root is None else root
        edges = [(e.src, e.dst, weight.of(e.storage, e.retrieval)) for e in g.all_edges()]
        n_nodes = g.n_nodes
    else:
        if root is None:
            raise ValueError("raiz obrigatória para grafos sem raiz auxiliar")
        base = g
        edges = [(u, v, weight.of(s, r)) for u, v, s, r in g.edge_tuples()]
        n_nodes = g.n

    parents = _arborescence_parents(n_nodes, edges, root)
    aux = base.n
    result = []
    for v in range(base.n):
        p = parents.get(v, SELF)
        result.append(SELF if p == aux or v == root else p)
    logger.debug("arborescência mínima (%s) com %d materializados", weight.value, result.count(SELF))
    return Solution(tuple(result))


def min_storage(g: VersionGraph) -> int:
    """Peso da arborescência de armazenamento mínimo do grafo estendido."""
    if g.n == 0:
        return 0
    return evaluate(g, min_arborescence(extend_with_aux_root(g))).storage_total
