"""Árvores bidirecionais: grafo cuja versão não dirigida é uma árvore."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from core.exceptions import NotATree
from core.version_graph import SELF, VersionGraph


@dataclass(frozen=True, eq=False)
class BidirectionalTree:
    """
    Árvore enraizada com deltas independentes nos dois sentidos de cada aresta.

    `parent[root]` é SELF; `children[v]` fica em ordem crescente de id;
    `order` lista pais antes dos filhos (busca em largura).
    """

    graph: VersionGraph
    root: int
    parent: tuple[int, ...]
    children: tuple[tuple[int, ...], ...]
    order: tuple[int, ...]

    @classmethod
    def from_graph(cls, g: VersionGraph, root: int = 0) -> "BidirectionalTree":
        n = g.n
        if n == 0:
            raise NotATree("árvore vazia")
        if not 0 <= root < n:
            raise NotATree(f"raiz {root} fora do grafo")
        pairs = g.undirected_pairs()
        if len(pairs) != n - 1:
            raise NotATree(f"esperadas {n - 1} arestas não dirigidas, encontradas {len(pairs)}")
        for u, v in pairs:
            if not (g.has_edge(u, v) and g.has_edge(v, u)):
                raise NotATree(f"aresta {{{u}, {v}}} sem delta nos dois sentidos")

        parent = [None] * n
        parent[root] = SELF
        children: list[list[int]] = [[] for _ in range(n)]
        order = []
        queue = deque([root])
        while queue:
            v = queue.popleft()
            order.append(v)
            for w in sorted(set(g.successors(v))):
                if parent[w] is None:
                    parent[w] = v
                    children[v].append(w)
                    queue.append(w)
        if len(order) != n:
            raise NotATree("grafo não dirigido desconexo")
        return cls(g, root, tuple(parent), tuple(tuple(c) for c in children), tuple(order))

    @property
    def n(self) -> int:
        return self.graph.n

    def postorder(self) -> list[int]:
        return list(reversed(self.order))

    def subtree(self, v: int) -> list[int]:
        nodes, stack = [], [v]
        while stack:
            x = stack.pop()
            nodes.append(x)
            stack.extend(self.children[x])
        return nodes

    def neighbors(self, v: int) -> list[int]:
        around = list(self.children[v])
        if self.parent[v] != SELF:
            around.append(self.parent[v])
        return around

    def storage(self, u: int, v: int) -> int:
        return self.graph.deltas[(u, v)].storage

    def retrieval(self, u: int, v: int) -> int:
        return self.graph.deltas[(u, v)].retrieval

    def with_graph(self, g: VersionGraph) -> "BidirectionalTree":
        """Mesma forma, custos de outro grafo com a mesma topologia."""
        return BidirectionalTree(g, self.root, self.parent, self.children, self.order)
