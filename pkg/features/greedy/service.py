"""Heurísticas gulosas: LMG, LMG-All e a linha de base MP."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction

from core.arborescence import min_arborescence
from core.evaluation import evaluate, retrieval_costs
from core.exceptions import Infeasible, InputError
from core.version_graph import SELF, Solution, VersionGraph, extend_with_aux_root, require_valid

logger = logging.getLogger(__name__)

MATERIALIZE = "materialize"
SWAP = "swap"
MP_VARIANTS = ("prim",)


@dataclass(frozen=True)
class GreedyMove:
    iteration: int
    kind: str
    target: int
    source: int
    rho_num: int
    rho_den: int
    storage: int
    retrieval_sum: int

    @property
    def rho(self) -> Fraction | None:
        """Razão exata; None representa ρ infinito."""
        return None if self.rho_den == 0 else Fraction(self.rho_num, self.rho_den)


@dataclass
class GreedyTrace:
    moves: list[GreedyMove] = field(default_factory=list)

    def rows(self) -> list[dict]:
        return [
            {
                "iter": m.iteration,
                "move_kind": m.kind,
                "target": m.target,
                "rho_num": m.rho_num,
                "rho_den": m.rho_den,
                "storage": m.storage,
                "retrieval_sum": m.retrieval_sum,
            }
            for m in self.moves
        ]


def _rho_key(gain: int, cost: int) -> tuple[int, Fraction]:
    # Custo não positivo com ganho estrito: ρ infinito
    if cost <= 0:
        return (1, Fraction(0))
    return (0, Fraction(gain, cost))


def _rho_parts(key: tuple[int, Fraction]) -> tuple[int, int]:
    if key[0] == 1:
        return 1, 0
    return key[1].numerator, key[1].denominator


class GreedyService:
    """Soluções gulosas para MSR (LMG, LMG-All) e BMR (MP)."""

    def __init__(self, graph: VersionGraph):
        require_valid(graph)
        self.graph = graph

    # --- Estado da arborescência corrente ---

    def _layout(self, parent: list[int]) -> tuple[list[int], list[int], list[list[int]]]:
        """Custos de recuperação, dependentes contados por subárvore e filhos."""
        g = self.graph
        cost = retrieval_costs(g, tuple(parent))
        children: list[list[int]] = [[] for _ in g.nodes]
        for v, p in enumerate(parent):
            if p != SELF:
                children[p].append(v)
        dep = [1 if g.counted(v) else 0 for v in g.nodes]
        order = self._top_down(parent, children)
        for v in reversed(order):
            for c in children[v]:
                dep[v] += dep[c]
        return cost, dep, children

    @staticmethod
    def _top_down(parent: list[int], children: list[list[int]]) -> list[int]:
        order = [v for v, p in enumerate(parent) if p == SELF]
        i = 0
        while i < len(order):
            order.extend(children[order[i]])
            i += 1
        return order

    def _in_storage(self, v: int, p: int) -> int:
        if p == SELF:
            return self.graph.node_costs[v]
        return self.graph.deltas[(p, v)].storage

    def _start(self, storage_budget: int) -> tuple[list[int], int, int]:
        g = self.graph
        sol = min_arborescence(extend_with_aux_root(g))
        report = evaluate(g, sol)
        if report.storage_total > storage_budget:
            raise Infeasible(
                f"orçamento {storage_budget} abaixo do armazenamento mínimo {report.storage_total}"
            )
        return list(sol.parent), report.storage_total, report.retrieval_sum

    # --- LMG ---

    def lmg(self, storage_budget: int) -> tuple[Solution, GreedyTrace]:
        """
        Materializa, a cada iteração, a versão de maior ρ = ganho / custo extra.

        Returns:
            Tuple: (solução, trace das iterações)
        """
        g = self.graph
        parent, storage, total = self._start(storage_budget)
        pending = {v for v in g.nodes if parent[v] != SELF}
        trace = GreedyTrace()

        while storage < storage_budget and pending:
            cost, dep, _ = self._layout(parent)
            best = None
            for v in sorted(pending):
                extra = g.node_costs[v] - self._in_storage(v, parent[v])
                if storage + extra > storage_budget:
                    continue
                gain = dep[v] * cost[v]
                if gain <= 0:
                    continue
                key = _rho_key(gain, extra)
                if best is None or key > best[0]:
                    best = (key, v, extra, gain)
            if best is None:
                break
            key, v, extra, gain = best
            parent[v] = SELF
            pending.discard(v)
            storage += extra
            total -= gain
            num, den = _rho_parts(key)
            trace.moves.append(GreedyMove(len(trace.moves) + 1, MATERIALIZE, v, SELF, num, den, storage, total))
            logger.debug("LMG: materializa %d (ρ=%s/%s), S=%d, R=%d", v, num, den, storage, total)

        return Solution(tuple(parent)), trace

    # --- LMG-All ---

    def _descendants(self, v: int, children: list[list[int]]) -> set[int]:
        seen, stack = {v}, [v]
        while stack:
            for c in children[stack.pop()]:
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
        return seen

    def lmg_all(self, storage_budget: int) -> tuple[Solution, GreedyTrace]:
        """
        Considera trocar o pai de qualquer versão por qualquer aresta que não
        crie ciclo, além de materializações.

        Returns:
            Tuple: (solução, trace das iterações)
        """
        g = self.graph
        parent, storage, total = self._start(storage_budget)
        trace = GreedyTrace()

        while True:
            cost, dep, children = self._layout(parent)
            best = None
            for v in g.nodes:
                if dep[v] == 0:
                    continue
                below = self._descendants(v, children)
                current = self._in_storage(v, parent[v])
                sources = [u for u in g.predecessors(v) if u != parent[v] and u not in below]
                if parent[v] != SELF:
                    sources.append(SELF)
                for u in sources:
                    new_cost = 0 if u == SELF else cost[u] + g.deltas[(u, v)].retrieval
                    extra = self._in_storage(v, u) - current
                    if storage + extra > storage_budget:
                        continue
                    gain = dep[v] * (cost[v] - new_cost)
                    if gain <= 0:
                        continue
                    key = _rho_key(gain, extra)
                    if best is None or key > best[0]:
                        best = (key, v, u, extra, gain)
            if best is None:
                break
            key, v, u, extra, gain = best
            parent[v] = u
            storage += extra
            total -= gain
            num, den = _rho_parts(key)
            kind = MATERIALIZE if u == SELF else SWAP
            trace.moves.append(GreedyMove(len(trace.moves) + 1, kind, v, u, num, den, storage, total))
            logger.debug("LMG-All: %s %d <- %d (ρ=%s/%s), S=%d, R=%d", kind, v, u, num, den, storage, total)

        return Solution(tuple(parent)), trace

    # --- MP ---

    def mp_baseline(self, retrieval_budget: int, variant: str = "prim") -> Solution:
        """
        Cresce uma floresta a partir da raiz auxiliar no estilo Prim: sempre a
        aresta de menor armazenamento que mantém a recuperação do novo nó
        dentro do limite.

        Raises:
            InputError: variante fora de MP_VARIANTS.
        """
        if variant not in MP_VARIANTS:
            raise InputError(f"variante MP desconhecida: {variant!r}; opções: {', '.join(MP_VARIANTS)}")
        if retrieval_budget < 0:
            raise ValueError("limite de recuperação deve ser >= 0")
        g = self.graph
        aux = g.n
        parent = [None] * g.n
        cost = [0] * g.n
        remaining = set(g.nodes)
        while remaining:
            best = None
            for v in remaining:
                options = [(g.node_costs[v], aux, v)]
                for u in g.predecessors(v):
                    if parent[u] is None:
                        continue
                    d = g.deltas[(u, v)]
                    if cost[u] + d.retrieval <= retrieval_budget:
                        options.append((d.storage, u, v))
                choice = min(options)
                if best is None or choice < best:
                    best = choice
            _, u, v = best
            parent[v] = SELF if u == aux else u
            cost[v] = 0 if u == aux else cost[u] + g.deltas[(u, v)].retrieval
            remaining.discard(v)
        return Solution(tuple(parent))
