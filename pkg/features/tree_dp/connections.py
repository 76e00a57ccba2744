"""
Combinação das tabelas dos filhos em uma árvore binária.

Cada nó v escolhe um dos oito tipos de conexão com seus até dois filhos:
v materializado com filhos independentes ou dependentes dele (casos 1 a 4),
ou v recuperado a partir de um filho (casos 5 a 8). Um filho dependente
precisa estar materializado na sua própria subárvore; ao pendurá-lo em v,
a materialização dele é trocada pela aresta (v, c) e todos os k_c nós que
dependiam dele passam a pagar r_{v,c} + γ_v a mais.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable, Iterable, Iterator, Sequence

from core.tree import BidirectionalTree
from core.version_graph import SELF

INDEPENDENT = "I"
DEPENDENT = "D"
SOURCE = "S"

# (caso, papéis dos filhos em ordem)
CONNECTIONS: dict[int, tuple[tuple[int, tuple[str, ...]], ...]] = {
    0: ((1, ()),),
    1: (
        (1, (INDEPENDENT,)),
        (2, (DEPENDENT,)),
        (5, (SOURCE,)),
    ),
    2: (
        (1, (INDEPENDENT, INDEPENDENT)),
        (2, (DEPENDENT, INDEPENDENT)),
        (3, (INDEPENDENT, DEPENDENT)),
        (4, (DEPENDENT, DEPENDENT)),
        (5, (SOURCE, INDEPENDENT)),
        (6, (INDEPENDENT, SOURCE)),
        (7, (DEPENDENT, SOURCE)),
        (8, (SOURCE, DEPENDENT)),
    ),
}


@dataclass(frozen=True, slots=True)
class PartialState:
    """
    Solução parcial na subárvore de v.

    k é None quando v é recuperado de um filho; senão é o número (ponderado)
    de versões recuperadas através de v, incluindo ele mesmo. gamma é o custo
    de recuperação de v dentro da subárvore, rho o total e sigma o armazenamento.
    """

    k: int | None
    gamma: int
    rho: int
    sigma: int
    case: int = 1
    refs: tuple[tuple[int, int, str], ...] = ()


def connect(tree: BidirectionalTree, v: int, tables: Sequence[Sequence[PartialState]],
            retrieval: Callable[[int, int], int]) -> Iterator[PartialState]:
    """
    Gera todos os estados de v a partir dos estados dos filhos.

    Args:
        tables: estados já calculados, indexados por nó.
        retrieval: custo de recuperação (original ou discretizado) de uma aresta.
    """
    g = tree.graph
    kids = tree.children[v]
    weight = 1 if g.counted(v) else 0
    s_v = g.node_costs[v]

    for case, roles in CONNECTIONS[len(kids)]:
        options = []
        for child, role in zip(kids, roles):
            entries = list(enumerate(tables[child]))
            if role == DEPENDENT:
                entries = [(i, st) for i, st in entries if st.k is not None]
            options.append(entries)

        for combo in product(*options):
            source = None
            for child, role, (i, st) in zip(kids, roles, combo):
                if role == SOURCE:
                    source = (child, st)

            if source is None:
                gamma, sigma, rho, k = 0, s_v, 0, weight
            else:
                child, st = source
                gamma = st.gamma + retrieval(child, v)
                sigma = st.sigma + tree.storage(child, v)
                rho = st.rho + weight * gamma
                k = None

            for child, role, (i, st) in zip(kids, roles, combo):
                if role == INDEPENDENT:
                    sigma += st.sigma
                    rho += st.rho
                elif role == DEPENDENT:
                    sigma += st.sigma - g.node_costs[child] + tree.storage(v, child)
                    rho += st.rho + st.k * (retrieval(v, child) + gamma)
                    if k is not None:
                        k += st.k

            refs = tuple((child, i, role) for child, role, (i, _) in zip(kids, roles, combo))
            yield PartialState(k, gamma, rho, sigma, case, refs)


def pareto(states: Iterable[PartialState]) -> list[PartialState]:
    """Mantém, por (k, gamma), só os estados não dominados em (rho, sigma)."""
    groups: dict[tuple, list[PartialState]] = {}
    for st in states:
        groups.setdefault((st.k is None, st.k or 0, st.gamma), []).append(st)
    kept = []
    for key in sorted(groups):
        best_sigma = None
        for st in sorted(groups[key], key=lambda x: (x.rho, x.sigma, x.case, x.refs)):
            if best_sigma is None or st.sigma < best_sigma:
                kept.append(st)
                best_sigma = st.sigma
    return kept


def slack(tree: BidirectionalTree, v: int, st: PartialState) -> int:
    """Quanto o armazenamento ainda pode cair se o pai da árvore adotar v."""
    p = tree.parent[v]
    if st.k is None or p == SELF:
        return 0
    return max(0, tree.graph.node_costs[v] - tree.storage(p, v))


def reconstruct(tree: BidirectionalTree, tables: Sequence[Sequence[PartialState]], index: int) -> list[int]:
    """Pais da solução correspondente ao estado `index` da raiz."""
    parent = [SELF] * tree.n
    stack = [(tree.root, index)]
    while stack:
        v, i = stack.pop()
        for child, j, role in tables[v][i].refs:
            if role == DEPENDENT:
                parent[child] = v
            elif role == SOURCE:
                parent[v] = child
            stack.append((child, j))
    return parent
