"""Heurísticas práticas: extrair uma árvore bidirecional e rodar as DPs de árvore nela."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

from config.settings import settings
from core.arborescence import Weight, min_arborescence, min_storage
from core.evaluation import evaluate
from core.exceptions import Infeasible
from core.tree import BidirectionalTree
from core.version_graph import SELF, Edge, Solution, VersionGraph, require_valid
from features.tree_dp.connections import PartialState, connect, pareto, reconstruct, slack
from features.tree_dp.service import TreeDPService, binarize_tree, collapse_helpers, dual_binary_search

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FrontierPoint:
    storage: int
    retrieval_sum: int
    solution: Solution


@dataclass(frozen=True)
class Frontier:
    """Pontos de Pareto: armazenamento crescente, recuperação total estritamente decrescente."""

    points: tuple[FrontierPoint, ...]

    @classmethod
    def from_candidates(cls, candidates) -> "Frontier":
        kept: list[FrontierPoint] = []
        for point in sorted(candidates, key=lambda p: (p.storage, p.retrieval_sum, p.solution.parent)):
            if kept and point.retrieval_sum >= kept[-1].retrieval_sum:
                continue
            kept.append(point)
        return cls(tuple(kept))

    def best_at(self, storage_budget: int) -> FrontierPoint:
        """Menor recuperação total com armazenamento <= 𝒮."""
        inside = [p for p in self.points if p.storage <= storage_budget]
        if not inside:
            raise Infeasible(f"nenhum ponto da fronteira com armazenamento <= {storage_budget}")
        return inside[-1]

    def cheapest_within(self, retrieval_budget: int) -> FrontierPoint:
        """Menor armazenamento com recuperação total <= ℛ."""
        inside = [p for p in self.points if p.retrieval_sum <= retrieval_budget]
        if not inside:
            raise Infeasible(f"nenhum ponto da fronteira com recuperação <= {retrieval_budget}")
        return inside[0]

    def rows(self) -> list[dict]:
        return [{"storage": p.storage, "retrieval_sum": p.retrieval_sum} for p in self.points]


@dataclass(frozen=True)
class ExtractedTree:
    tree: BidirectionalTree
    synthesized: frozenset[tuple[int, int]]


def extract_bidirectional_tree(g: VersionGraph, root: int) -> ExtractedTree:
    """
    Arborescência mínima com peso s + r a partir de `root`, completada com os
    deltas reversos. Reverso ausente vira (s_u, 0), o mesmo que materializar u.

    Raises:
        UnreachableNode: algum nó não é alcançável a partir da raiz.
    """
    arborescence = min_arborescence(g, root=root, weight=Weight.COMBINED)
    edges: list[Edge] = []
    synthesized = set()
    for v, u in enumerate(arborescence.parent):
        if u == SELF:
            continue
        forward = g.deltas[(u, v)]
        edges.append(Edge(u, v, forward.storage, forward.retrieval))
        backward = g.delta(v, u)
        if backward is None:
            synthesized.add((v, u))
            edges.append(Edge(v, u, g.node_costs[u], 0))
        else:
            edges.append(Edge(v, u, backward.storage, backward.retrieval))
    tree_graph = VersionGraph(g.node_costs, tuple(sorted(edges, key=lambda e: e.pair)), g.helpers)
    if synthesized:
        logger.debug("extração: %d deltas reversos sintetizados", len(synthesized))
    return ExtractedTree(BidirectionalTree.from_graph(tree_graph, root), frozenset(synthesized))


def map_back(extracted: ExtractedTree, sol: Solution) -> Solution:
    """Troca arestas sintetizadas por materialização do destino."""
    return Solution(tuple(
        SELF if p != SELF and (p, v) in extracted.synthesized else p
        for v, p in enumerate(sol.parent)
    ))


class ExtractedTreeService:
    """DP-MSR e DP-BMR heurísticos sobre a árvore extraída de um grafo qualquer."""

    def __init__(self, graph: VersionGraph, root: int | None = None):
        require_valid(graph)
        self.graph = graph
        self.root = settings.DEFAULT_ROOT if root is None else root
        self._extracted: ExtractedTree | None = None

    @property
    def extracted(self) -> ExtractedTree:
        if self._extracted is None:
            self._extracted = extract_bidirectional_tree(self.graph, self.root)
        return self._extracted

    # --- DP-MSR com armazenamento discretizado ---

    @staticmethod
    def _bucketer(tree: BidirectionalTree, epsilon: Fraction | None, geometric: bool):
        if not geometric or epsilon is None:
            return lambda sigma: sigma
        costs = [c for c in tree.graph.node_costs if c > 0]
        costs += [d.storage for d in tree.graph.deltas.values() if d.storage > 0]
        base = min(costs, default=1)
        ratio = math.log1p(float(epsilon))

        def bucket(sigma: int) -> int:
            if sigma < base:
                return -1
            return int(math.floor(math.log(sigma / base) / ratio))

        return bucket

    def _storage_indexed(self, tree: BidirectionalTree, bucket, limit: float) -> list[list[PartialState]]:
        tables: list[list[PartialState]] = [[] for _ in range(tree.n)]
        for v in tree.postorder():
            best: dict[tuple, PartialState] = {}
            for st in connect(tree, v, tables, tree.retrieval):
                if st.sigma - slack(tree, v, st) > limit:
                    continue
                key = (st.k is None, st.k or 0, st.gamma, bucket(st.sigma))
                current = best.get(key)
                if current is None or (st.rho, st.sigma) < (current.rho, current.sigma):
                    best[key] = st
            tables[v] = pareto(best.values())
        return tables

    def dp_msr_heuristic(self, epsilon: Fraction | None = None, prune_factor: float | None = None,
                         geometric: bool = True, compressed: bool = False) -> Frontier:
        """
        Fronteira armazenamento x recuperação total em uma única execução.

        Args:
            epsilon: razão (1+ε) dos baldes geométricos de armazenamento.
            prune_factor: descarta estados acima de fator x armazenamento mínimo
                da árvore (padrão 2, ou 10 para grafos comprimidos).
            geometric: False usa o armazenamento exato como chave.
        """
        if prune_factor is None:
            prune_factor = settings.PRUNE_COMPRESSED if compressed else settings.PRUNE_NATURAL
        if prune_factor < 1:
            raise ValueError("prune_factor deve ser >= 1")
        extracted = self.extracted
        tree = extracted.tree
        binary, owner = binarize_tree(tree)
        limit = prune_factor * min_storage(tree.graph) if math.isfinite(prune_factor) else math.inf
        tables = self._storage_indexed(binary, self._bucketer(binary, epsilon, geometric), limit)

        candidates = {}
        for index in range(len(tables[binary.root])):
            parent = reconstruct(binary, tables, index)
            sol = map_back(extracted, collapse_helpers(Solution(tuple(parent)), owner, binary, tree))
            if sol.parent not in candidates:
                report = evaluate(self.graph, sol)
                candidates[sol.parent] = FrontierPoint(report.storage_total, report.retrieval_sum, sol)
        frontier = Frontier.from_candidates(candidates.values())
        if not frontier.points:
            logger.warning("fronteira vazia após a poda (fator %s)", prune_factor)
        logger.debug("DP-MSR heurístico: %d pontos na fronteira", len(frontier.points))
        return frontier

    # --- DP-BMR ---

    def dp_bmr_heuristic(self, retrieval_budget: int) -> Solution:
        """BMR exato na árvore extraída, viável no grafo original."""
        extracted = self.extracted
        sol = TreeDPService(extracted.tree).dp_bmr_exact(retrieval_budget)
        return map_back(extracted, sol)

    def mmr_heuristic(self, storage_budget: int) -> Solution:
        """MMR pela busca binária em ℛ sobre o DP-BMR heurístico."""
        g = self.graph
        r_max = max((d.retrieval for d in g.deltas.values()), default=0)
        result = dual_binary_search(
            self.dp_bmr_heuristic,
            lambda sol: evaluate(g, sol).storage_total,
            storage_budget,
            g.n * r_max,
        )
        return result.solution
