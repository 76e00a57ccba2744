"""FPTAS para MSR e MMR em grafos de largura em árvore limitada."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator

from config.settings import settings
from core.arborescence import min_storage
from core.evaluation import evaluate
from core.exceptions import Infeasible, TooLarge, WidthExceeded
from core.version_graph import SELF, Solution, VersionGraph, require_valid
from features.tree_dp.service import discretize_graph, storage_binary_search, zeroing_rounds
from features.treewidth_dp.decomposition import (
    FORGET,
    INTRODUCE,
    JOIN,
    LEAF,
    NiceTreeDecomposition,
    TreeDecomposition,
    build_decomposition,
)
from features.treewidth_dp.states import (
    EXTERNAL,
    DPStateTuple,
    attach,
    bit,
    compatibility,
    distribute_retrieval,
    forget_position,
    introduce_vertex,
    join_dependencies,
    join_heights,
    merge_structure,
    restrict_introduced,
)

logger = logging.getLogger(__name__)

# (estado, ρ, σ, testemunha)
Entry = tuple[DPStateTuple, int, int, tuple]


@dataclass(frozen=True)
class DPRun:
    """Resumo da última execução: objetivo em ticks, armazenamento e tamanho das tabelas."""

    objective_ticks: int
    storage: int
    tick_length: Fraction
    states: int
    graph: VersionGraph


class TreewidthDPService:
    """
    Programação dinâmica sobre uma decomposição nice.

    Os estados ficam em tabelas por nó da decomposição, com poda de Pareto
    em (ρ, σ) para cada estado e poda por limite inferior de armazenamento.
    """

    def __init__(self, graph: VersionGraph,
                 decomposition: TreeDecomposition | NiceTreeDecomposition | None = None,
                 k_max: int | None = None):
        require_valid(graph)
        self.graph = graph
        self.k_max = settings.K_MAX if k_max is None else k_max
        self.decomposition = build_decomposition(graph, decomposition)
        if self.decomposition.width > self.k_max:
            raise WidthExceeded(self.decomposition.width, self.k_max)
        self.last_run: DPRun | None = None

    # --- 1. TABELAS ---

    def _fill(self, g: VersionGraph, storage_budget: int, msr: bool) -> dict[int, list[Entry]]:
        dec = self.decomposition
        weights = [1 if g.counted(v) else 0 for v in g.nodes]
        relief = []
        for v in g.nodes:
            cheapest = min((g.deltas[(u, v)].storage for u in g.predecessors(v)), default=g.node_costs[v])
            relief.append(max(0, g.node_costs[v] - cheapest))

        tables: dict[int, list[Entry]] = {}
        bags: dict[int, tuple[int, ...]] = {}
        for z in dec.postorder():
            node = dec.nodes[z]
            bag = tuple(sorted(node.bag))
            if node.kind == LEAF:
                candidates = self._leaf(g, node.vertex, weights, msr)
            elif node.kind == INTRODUCE:
                c = node.children[0]
                candidates = self._introduce(g, bags[c], tables[c], node.vertex, weights, msr)
            elif node.kind == FORGET:
                c = node.children[0]
                candidates = self._forget(g, bags[c], tables[c], node.vertex, msr)
            else:
                a, b = node.children
                candidates = self._join(g, bag, tables[a], tables[b], weights, msr)
            tables[z] = self._prune(bag, candidates, storage_budget, relief, z)
            bags[z] = bag
        return tables

    def _leaf(self, g: VersionGraph, v: int, weights, msr: bool) -> Iterator[Entry]:
        _, state = introduce_vertex((), DPStateTuple.empty(), v, weights[v], msr)
        yield state, 0, g.node_costs[v], ()

    def _introduce(self, g: VersionGraph, bag, entries: list[Entry], v: int, weights, msr: bool) -> Iterator[Entry]:
        for idx, (state, rho, sigma, _) in enumerate(entries):
            new_bag, new = introduce_vertex(bag, state, v, weights[v], msr)
            if settings.VERIFY_DP:
                assert restrict_introduced(new_bag, new, v) == (bag, state)
            yield new, rho, sigma + g.node_costs[v], (idx,)

    def _forget(self, g: VersionGraph, bag, entries: list[Entry], v: int, msr: bool) -> Iterator[Entry]:
        """
        Decide as arestas entre v e o resto da bolsa: um pai para v (se ainda
        for raiz) e um subconjunto de raízes da bolsa que passam a depender de v.
        """
        i = bag.index(v)

        def hang(state, rho, sigma, p, c):
            src, dst = bag[p], bag[c]
            d = g.deltas[(src, dst)]
            new, gain = attach(bag, state, p, c, d.retrieval, msr)
            rho = rho + gain if msr else max(rho, gain)
            return new, rho, sigma + d.storage - g.node_costs[dst]

        for idx, (state, rho, sigma, _) in enumerate(entries):
            parents: list[int | None] = [None]
            if state.par[i] == SELF:
                parents += [
                    p for p, u in enumerate(bag)
                    if p != i and g.has_edge(u, v) and not state.anc[p] & bit(v)
                ]
            for p in parents:
                if p is None:
                    base = (state, rho, sigma)
                else:
                    base = hang(state, rho, sigma, p, i)
                ancestors = base[0].anc[i]
                roots = [
                    w for w, u in enumerate(bag)
                    if w != i and base[0].par[w] == SELF and g.has_edge(v, u) and not ancestors & bit(u)
                ]
                for size in range(len(roots) + 1):
                    for chosen in combinations(roots, size):
                        current = base
                        for w in chosen:
                            current = hang(*current, i, w)
                        _, forgotten = forget_position(bag, current[0], i)
                        witness = (idx, None if p is None else bag[p], tuple(bag[w] for w in chosen))
                        yield forgotten, current[1], current[2], witness

    def _join(self, g: VersionGraph, bag, left: list[Entry], right: list[Entry], weights, msr: bool) -> Iterator[Entry]:
        overlap = sum(g.node_costs[v] for v in bag)
        bag_weights = [weights[v] for v in bag]
        groups: dict[tuple[int, ...], list[int]] = {}
        for ib, entry in enumerate(right):
            groups.setdefault(entry[0].par, []).append(ib)

        for ia, (sa, ra, ga, _) in enumerate(left):
            for par_b, members in groups.items():
                if any(x == EXTERNAL and y == EXTERNAL for x, y in zip(sa.par, par_b)):
                    continue
                for ib in members:
                    sb, rb, gb, _ = right[ib]
                    merge = merge_structure(bag, sa, sb)
                    if merge is None:
                        continue
                    if msr:
                        state = join_dependencies(bag, merge, sa, sb, bag_weights)
                        rho = ra + rb + distribute_retrieval(bag, state, sa, sb, bag_weights)
                    else:
                        state, peak = join_heights(bag, merge, sa, sb)
                        rho = max(ra, rb, peak)
                    if settings.VERIFY_DP:
                        assert compatibility(bag, state, sa, sb, merge.sides, bag_weights if msr else None)
                    yield state, rho, ga + gb - overlap, (ia, ib)

    def _prune(self, bag, candidates: Iterable[Entry], storage_budget: int, relief: list[int], z: int) -> list[Entry]:
        groups: dict[DPStateTuple, list[Entry]] = {}
        for entry in candidates:
            state, _, sigma, _ = entry
            bound = sigma - sum(relief[bag[i]] for i in state.roots())
            if bound > storage_budget:
                continue
            groups.setdefault(state, []).append(entry)

        kept: list[Entry] = []
        for entries in groups.values():
            best = None
            for entry in sorted(entries, key=lambda e: (e[1], e[2])):
                if best is None or entry[2] < best:
                    kept.append(entry)
                    best = entry[2]
        if len(kept) > settings.STATE_GUARD:
            raise TooLarge(f"nó {z} da decomposição com {len(kept)} estados (limite {settings.STATE_GUARD})")
        return kept

    # --- 2. RECONSTRUÇÃO ---

    def _reconstruct(self, tables: dict[int, list[Entry]], index: int) -> Solution:
        dec = self.decomposition
        parent = [SELF] * self.graph.n
        stack = [(dec.root, index)]
        while stack:
            z, i = stack.pop()
            node = dec.nodes[z]
            witness = tables[z][i][3]
            if node.kind == INTRODUCE:
                stack.append((node.children[0], witness[0]))
            elif node.kind == FORGET:
                child_idx, p, chosen = witness
                if p is not None:
                    parent[node.vertex] = p
                for w in chosen:
                    parent[w] = node.vertex
                stack.append((node.children[0], child_idx))
            elif node.kind == JOIN:
                stack.append((node.children[0], witness[0]))
                stack.append((node.children[1], witness[1]))
        return Solution(tuple(parent))

    def _run(self, g: VersionGraph, storage_budget: int, epsilon: Fraction | None,
             msr: bool) -> tuple[Solution, DPRun]:
        scaled, params = discretize_graph(g, epsilon)
        tables = self._fill(scaled, storage_budget, msr)
        root = tables[self.decomposition.root]
        feasible = [(rho, sigma, i) for i, (_, rho, sigma, _) in enumerate(root) if sigma <= storage_budget]
        if not feasible:
            raise Infeasible(f"nenhuma configuração com armazenamento <= {storage_budget}")
        rho, sigma, index = min(feasible)
        states = sum(len(t) for t in tables.values())
        logger.debug("DP por decomposição (%s): ρ=%d ticks, σ=%d, %d estados",
                     "MSR" if msr else "MMR", rho, sigma, states)
        return self._reconstruct(tables, index), DPRun(rho, sigma, params.tick_length, states, scaled)

    def _solve(self, storage_budget: int, epsilon: Fraction | None, msr: bool) -> Solution:
        g = self.graph
        minimum = min_storage(g)
        if storage_budget < minimum:
            raise Infeasible(f"orçamento {storage_budget} abaixo do armazenamento mínimo {minimum}")
        runs: list[DPRun] = []

        def solve(current: VersionGraph) -> Solution:
            sol, run = self._run(current, storage_budget, epsilon, msr)
            runs.append(run)
            return sol

        measure = (lambda r: r.retrieval_sum) if msr else (lambda r: r.retrieval_max)
        sol, best_round = zeroing_rounds(g, storage_budget, epsilon, solve, measure)
        self.last_run = runs[best_round]
        return sol

    # --- 3. API ---

    def dp_msr_btw(self, storage_budget: int, epsilon: Fraction | None = None) -> Solution:
        """Menor recuperação total (em ticks) com armazenamento <= 𝒮."""
        return self._solve(storage_budget, epsilon, msr=True)

    def dp_mmr_btw(self, storage_budget: int, epsilon: Fraction | None = None) -> Solution:
        """Menor recuperação máxima (em ticks) com armazenamento <= 𝒮."""
        return self._solve(storage_budget, epsilon, msr=False)

    def bmr_btw_bicriteria(self, retrieval_budget: int, epsilon: Fraction | None = None) -> Solution:
        """
        BMR bicritério: menor 𝒮 cuja solução MMR tem recuperação máxima
        <= (1+ε)·ℛ, por busca binária em [armazenamento mínimo, Σ s_v].
        """
        g = self.graph
        slack = Fraction(1) + (Fraction(epsilon) if epsilon is not None else 0)
        tolerance = int(slack * retrieval_budget)
        result = storage_binary_search(
            lambda budget: self.dp_mmr_btw(budget, epsilon),
            lambda sol: evaluate(g, sol).retrieval_max,
            tolerance,
            min_storage(g),
            sum(g.node_costs),
        )
        logger.debug("BMR bicritério: 𝒮=%d após %d chamadas", result.bound, result.calls)
        return result.solution
