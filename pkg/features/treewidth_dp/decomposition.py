"""Decomposições em árvore: validação, heurística de grau mínimo e forma "nice"."""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass

import networkx as nx
from networkx.algorithms.approximation import treewidth_min_degree

from core.exceptions import InvalidDecomposition, InvalidGraph
from core.version_graph import VersionGraph

logger = logging.getLogger(__name__)

LEAF = "leaf"
INTRODUCE = "introduce"
FORGET = "forget"
JOIN = "join"
NICE_KINDS = (LEAF, INTRODUCE, FORGET, JOIN)


@dataclass(frozen=True)
class TreeDecomposition:
    """Decomposição comum: bolsas por id e arestas da árvore de bolsas."""

    bags: dict[int, frozenset[int]]
    edges: tuple[tuple[int, int], ...]

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags.values()), default=0) - 1


@dataclass(frozen=True)
class NiceNode:
    id: int
    kind: str
    bag: frozenset[int]
    children: tuple[int, ...] = ()
    vertex: int | None = None


@dataclass(frozen=True)
class NiceTreeDecomposition:
    nodes: tuple[NiceNode, ...]
    root: int

    @property
    def width(self) -> int:
        return max(len(node.bag) for node in self.nodes) - 1

    def postorder(self) -> list[int]:
        order, stack = [], [self.root]
        while stack:
            z = stack.pop()
            order.append(z)
            stack.extend(self.nodes[z].children)
        return order[::-1]

    def parent_of(self) -> dict[int, int | None]:
        parent: dict[int, int | None] = {self.root: None}
        for node in self.nodes:
            for c in node.children:
                parent[c] = node.id
        return parent

    def as_plain(self) -> TreeDecomposition:
        edges = tuple((node.id, c) for node in self.nodes for c in node.children)
        return TreeDecomposition({node.id: node.bag for node in self.nodes}, edges)


# --- 1. VALIDAÇÃO ---

def validate_decomposition(g: VersionGraph, dec: TreeDecomposition) -> None:
    """
    Confere as três condições de decomposição sobre o grafo não dirigido.

    (i) toda versão aparece em alguma bolsa; (ii) as bolsas que contêm v
    formam uma subárvore conexa; (iii) toda aresta tem as duas pontas em
    alguma bolsa. A estrutura de bolsas também precisa ser uma árvore.

    Raises:
        InvalidDecomposition: com a condição violada.
    """
    tree = nx.Graph()
    tree.add_nodes_from(dec.bags)
    for a, b in dec.edges:
        if a not in dec.bags or b not in dec.bags:
            raise InvalidDecomposition("tree", f"aresta ({a}, {b}) usa bolsa inexistente")
        tree.add_edge(a, b)
    if not dec.bags or not nx.is_tree(tree):
        raise InvalidDecomposition("tree", "as bolsas não formam uma árvore")

    for bag_id, bag in dec.bags.items():
        outside = [v for v in bag if not 0 <= v < g.n]
        if outside:
            raise InvalidDecomposition("i", f"bolsa {bag_id} contém vértices fora do grafo: {outside}")

    holders: dict[int, list[int]] = {v: [] for v in g.nodes}
    for bag_id, bag in dec.bags.items():
        for v in bag:
            holders[v].append(bag_id)

    missing = [v for v, ids in holders.items() if not ids]
    if missing:
        raise InvalidDecomposition("i", f"vértices sem bolsa: {missing}")

    for v, ids in holders.items():
        if not nx.is_connected(tree.subgraph(ids)):
            raise InvalidDecomposition("ii", f"bolsas com o vértice {v} não são conexas")

    for u, v in sorted(g.undirected_pairs()):
        if not any(u in bag and v in bag for bag in dec.bags.values()):
            raise InvalidDecomposition("iii", f"nenhuma bolsa cobre a aresta {{{u}, {v}}}")


def validate_nice(g: VersionGraph, dec: NiceTreeDecomposition) -> None:
    """Condições de decomposição mais as regras estruturais de cada tipo de nó."""
    if any(node.id != i for i, node in enumerate(dec.nodes)):
        raise InvalidDecomposition("tree", "ids de nós devem ser 0..m-1 na ordem da tupla")
    validate_decomposition(g, dec.as_plain())
    if any(dec.root in node.children for node in dec.nodes):
        raise InvalidDecomposition("tree", f"raiz {dec.root} tem pai")

    for node in dec.nodes:
        kids = [dec.nodes[c] for c in node.children]
        if node.kind == LEAF:
            if kids or len(node.bag) != 1:
                raise InvalidDecomposition(LEAF, f"nó {node.id}: folha precisa de bolsa unitária e nenhum filho")
        elif node.kind == INTRODUCE:
            if (len(kids) != 1 or node.vertex not in node.bag
                    or kids[0].bag != node.bag - {node.vertex}):
                raise InvalidDecomposition(INTRODUCE, f"nó {node.id}: filho deve ter a bolsa sem {node.vertex}")
        elif node.kind == FORGET:
            if (len(kids) != 1 or node.vertex in node.bag
                    or kids[0].bag != node.bag | {node.vertex}):
                raise InvalidDecomposition(FORGET, f"nó {node.id}: filho deve ter a bolsa com {node.vertex}")
        elif node.kind == JOIN:
            if len(kids) != 2 or any(k.bag != node.bag for k in kids):
                raise InvalidDecomposition(JOIN, f"nó {node.id}: dois filhos com a mesma bolsa")
        else:
            raise InvalidDecomposition("kind", f"nó {node.id}: tipo desconhecido {node.kind!r}")


# --- 2. CONVERSÃO PARA FORMA NICE ---

class _NiceBuilder:
    def __init__(self):
        self.nodes: list[NiceNode] = []

    def add(self, kind: str, bag: frozenset[int], children: tuple[int, ...] = (), vertex: int | None = None) -> int:
        node = NiceNode(len(self.nodes), kind, bag, children, vertex)
        self.nodes.append(node)
        return node.id

    def leaf_chain(self, bag: frozenset[int]) -> int:
        first, *rest = sorted(bag)
        top = self.add(LEAF, frozenset({first}), vertex=first)
        return self.introduce_all(top, frozenset({first}), rest)

    def introduce_all(self, top: int, bag: frozenset[int], vertices) -> int:
        for v in vertices:
            bag = bag | {v}
            top = self.add(INTRODUCE, bag, (top,), v)
        return top

    def forget_all(self, top: int, bag: frozenset[int], vertices) -> int:
        for v in vertices:
            bag = bag - {v}
            top = self.add(FORGET, bag, (top,), v)
        return top

    def transition(self, top: int, source: frozenset[int], target: frozenset[int]) -> int:
        top = self.forget_all(top, source, sorted(source - target))
        return self.introduce_all(top, source & target, sorted(target - source))


def make_nice(dec: TreeDecomposition) -> NiceTreeDecomposition:
    """
    Converte uma decomposição válida para a forma nice de mesma largura.

    A raiz é a bolsa de menor id; a raiz nice esquece todos os vértices e
    fica com a bolsa vazia.
    """
    adjacency: dict[int, list[int]] = {b: [] for b in dec.bags}
    for a, b in dec.edges:
        adjacency[a].append(b)
        adjacency[b].append(a)

    root = min(dec.bags)
    parent = {root: None}
    order = []
    queue = deque([root])
    while queue:
        x = queue.popleft()
        order.append(x)
        for y in sorted(adjacency[x]):
            if y not in parent:
                parent[y] = x
                queue.append(y)

    builder = _NiceBuilder()
    top: dict[int, int | None] = {}
    for x in reversed(order):
        bag = dec.bags[x]
        subtrees = []
        for c in sorted(y for y in adjacency[x] if parent.get(y) == x):
            if top[c] is not None:
                subtrees.append(builder.transition(top[c], dec.bags[c], bag))
        if not subtrees:
            top[x] = builder.leaf_chain(bag) if bag else None
            continue
        current = subtrees[0]
        for other in subtrees[1:]:
            current = builder.add(JOIN, bag, (current, other))
        top[x] = current

    if top[root] is None:
        raise InvalidDecomposition("i", "decomposição sem vértices")
    final = builder.forget_all(top[root], dec.bags[root], sorted(dec.bags[root]))
    return NiceTreeDecomposition(tuple(builder.nodes), final)


# --- 3. CONSTRUÇÃO ---

def close_root(dec: NiceTreeDecomposition) -> NiceTreeDecomposition:
    """Esquece os vértices que restam na bolsa da raiz; as arestas só são decididas em nós forget."""
    bag = dec.nodes[dec.root].bag
    if not bag:
        return dec
    builder = _NiceBuilder()
    builder.nodes = list(dec.nodes)
    final = builder.forget_all(dec.root, bag, sorted(bag))
    logger.debug("raiz com %d vértices fechada por nós forget", len(bag))
    return NiceTreeDecomposition(tuple(builder.nodes), final)


def min_degree_decomposition(g: VersionGraph) -> TreeDecomposition:
    """Decomposição pela heurística de eliminação por grau mínimo do networkx."""
    width, tree = treewidth_min_degree(g.to_networkx(undirected=True))
    ids = {bag: i for i, bag in enumerate(sorted(tree.nodes, key=lambda b: (len(b), sorted(b))))}
    bags = {i: frozenset(bag) for bag, i in ids.items()}
    edges = tuple(sorted((min(ids[a], ids[b]), max(ids[a], ids[b])) for a, b in tree.edges))
    logger.debug("grau mínimo: largura %d com %d bolsas", width, len(bags))
    return TreeDecomposition(bags, edges)


def build_decomposition(g: VersionGraph,
                        provided: TreeDecomposition | NiceTreeDecomposition | None = None) -> NiceTreeDecomposition:
    """
    Decomposição nice para o grafo.

    Args:
        provided: decomposição externa; é validada e, se comum, convertida.
            Uma nice com bolsa não vazia na raiz recebe nós forget acima dela.

    Raises:
        InvalidDecomposition: com a condição violada.
    """
    if g.n == 0:
        raise InvalidGraph("grafo vazio não tem decomposição")
    if isinstance(provided, NiceTreeDecomposition):
        validate_nice(g, provided)
        return close_root(provided)
    if provided is None:
        plain = min_degree_decomposition(g)
    else:
        plain = provided
        validate_decomposition(g, plain)
    nice = make_nice(plain)
    logger.info("decomposição nice: largura %d, %d nós", nice.width, len(nice.nodes))
    return nice
