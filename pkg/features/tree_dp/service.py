"""Programação dinâmica em árvores bidirecionais: BMR exato, MMR e FPTAS para MSR."""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from core.arborescence import min_storage
from core.evaluation import evaluate, guard
from core.exceptions import DegenerateInputWarning, Infeasible
from core.tree import BidirectionalTree
from core.version_graph import SELF, CostReport, Edge, Solution, VersionGraph
from features.tree_dp.connections import PartialState, connect, pareto, reconstruct, slack

logger = logging.getLogger(__name__)


# --- 1. REDUÇÃO A ÁRVORE BINÁRIA ---

def binarize_tree(t: BidirectionalTree) -> tuple[BidirectionalTree, tuple[int, ...]]:
    """
    Garante no máximo dois filhos por nó inserindo nós auxiliares.

    O auxiliar v' herda s_v, liga-se a v por deltas de custo zero nos dois
    sentidos e recebe os filhos excedentes com os custos das arestas originais.

    Returns:
        Tuple: (árvore binária, dono original de cada nó)
    """
    if all(len(c) <= 2 for c in t.children):
        return t, tuple(range(t.n))

    g = t.graph
    costs = list(g.node_costs)
    owner = list(range(t.n))
    deltas = {pair: (d.storage, d.retrieval) for pair, d in g.deltas.items()}
    helpers = set(g.helpers)

    for v in t.order:
        current, kids = v, list(t.children[v])
        while len(kids) > 2:
            h = len(costs)
            costs.append(g.node_costs[v])
            owner.append(v)
            helpers.add(h)
            deltas[(current, h)] = (0, 0)
            deltas[(h, current)] = (0, 0)
            for c in kids[1:]:
                deltas[(h, c)] = deltas.pop((current, c))
                deltas[(c, h)] = deltas.pop((c, current))
            current, kids = h, kids[1:]

    edges = tuple(Edge(u, w, s, r) for (u, w), (s, r) in sorted(deltas.items()))
    binary = VersionGraph(tuple(costs), edges, frozenset(helpers))
    logger.debug("binarização: %d -> %d nós", t.n, binary.n)
    return BidirectionalTree.from_graph(binary, t.root), tuple(owner)


def collapse_helpers(sol: Solution, owner: tuple[int, ...], binary: BidirectionalTree,
                     original: BidirectionalTree) -> Solution:
    """
    Projeta uma solução da árvore binária de volta na árvore original.

    Cada versão v junta-se aos seus auxiliares; o grupo entra pelo membro
    materializado ou, se não houver, pelo membro de menor (custo, profundidade, id)
    cujo pai está fora do grupo. Nem armazenamento nem recuperação aumentam.
    """
    if binary is original:
        return sol
    cost = evaluate(binary.graph, sol).retrieval_per_node
    depth = [0] * binary.n
    for v in _top_down(sol):
        if sol.parent[v] != SELF:
            depth[v] = depth[sol.parent[v]] + 1

    parent = [SELF] * original.n
    best: dict[int, tuple] = {}
    for m, p in enumerate(sol.parent):
        v = owner[m]
        if p != SELF and owner[p] == v:
            continue
        key = (cost[m], depth[m], m)
        if v not in best or key < best[v][0]:
            best[v] = (key, SELF if p == SELF else owner[p])
    for v, (_, p) in best.items():
        parent[v] = p
    return Solution(tuple(parent))


def _top_down(sol: Solution) -> list[int]:
    kids = sol.children()
    order = sorted(sol.materialized)
    i = 0
    while i < len(order):
        order.extend(kids[order[i]])
        i += 1
    return order


# --- 2. DISCRETIZAÇÃO ---

@dataclass(frozen=True)
class DiscretizationParams:
    epsilon: Fraction | None
    n: int
    r_max: int
    ticks: Fraction | None
    tick_length: Fraction

    @property
    def identity(self) -> bool:
        return self.tick_length == 1

    def undiscretize(self, ticks: int) -> Fraction:
        return ticks * self.tick_length


def discretize_graph(g: VersionGraph, epsilon: Fraction | None) -> tuple[VersionGraph, DiscretizationParams]:
    """
    Arredonda cada r para cima em múltiplos de l = n²·r_max / t, t = n⁴/ε.

    Com r_max = 0 devolve o grafo inalterado (l = 1) e registra um aviso;
    com epsilon None os custos ficam exatos.
    """
    n = sum(1 for v in g.nodes if g.counted(v))
    r_max = max((d.retrieval for d in g.deltas.values()), default=0)
    if epsilon is None:
        return g, DiscretizationParams(None, n, r_max, None, Fraction(1))
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon deve ser positivo")
    ticks = Fraction(n ** 4) / epsilon
    if r_max == 0:
        warnings.warn("r_max = 0: discretização identidade", DegenerateInputWarning, stacklevel=2)
        logger.warning("discretização degenerada (r_max = 0); custos mantidos")
        return g, DiscretizationParams(epsilon, n, 0, ticks, Fraction(1))

    length = Fraction(guard(n * n * r_max)) / ticks
    scaled = {pair: (d.storage, math.ceil(Fraction(d.retrieval) / length)) for pair, d in g.deltas.items()}
    return g.with_deltas(scaled), DiscretizationParams(epsilon, n, r_max, ticks, length)


def discretize(t: BidirectionalTree, epsilon: Fraction | None) -> tuple[BidirectionalTree, DiscretizationParams]:
    scaled, params = discretize_graph(t.graph, epsilon)
    return t.with_graph(scaled), params


# --- 3. BUSCA BINÁRIA NO LIMITE DUAL ---

@dataclass(frozen=True)
class DualSearchResult:
    bound: int
    solution: Solution
    calls: int


def _smallest_feasible(lo: int, hi: int, attempt: Callable[[int], tuple[bool, Solution | None]]) -> DualSearchResult:
    calls = 1
    ok, best = attempt(hi)
    if not ok:
        raise Infeasible(f"nenhum limite em [{lo}, {hi}] atende o orçamento")
    while lo < hi:
        mid = (lo + hi) // 2
        calls += 1
        ok, candidate = attempt(mid)
        if ok:
            hi, best = mid, candidate
        else:
            lo = mid + 1
    return DualSearchResult(hi, best, calls)


def dual_binary_search(solve: Callable[[int], Solution], measure: Callable[[Solution], int],
                       budget: int, upper: int) -> DualSearchResult:
    """
    Menor limite de recuperação ℛ em [0, upper] cuja solução cabe no orçamento.

    Converte um solver BSR em MSR (upper = n²·r_max) ou BMR em MMR (n·r_max).
    Faz no máximo ⌈log₂(upper + 1)⌉ + 1 chamadas.
    """
    def attempt(bound: int):
        try:
            sol = solve(bound)
        except Infeasible:
            return False, None
        return measure(sol) <= budget, sol

    return _smallest_feasible(0, upper, attempt)


def storage_binary_search(solve: Callable[[int], Solution], measure: Callable[[Solution], int],
                          retrieval_budget: int, lo: int, hi: int) -> DualSearchResult:
    """Menor orçamento de armazenamento em [lo, hi] cujo objetivo respeita `retrieval_budget`."""
    def attempt(storage_budget: int):
        try:
            sol = solve(storage_budget)
        except Infeasible:
            return False, None
        return measure(sol) <= retrieval_budget, sol

    return _smallest_feasible(lo, hi, attempt)


# --- 4. RODADAS DE ZERAGEM ---

def zeroing_rounds(graph: VersionGraph, storage_budget: int, epsilon: Fraction | None,
                   solve: Callable[[VersionGraph], Solution],
                   objective: Callable[[CostReport], int]) -> tuple[Solution, int]:
    """
    Repete `solve` zerando, a cada rodada, a aresta de maior recuperação
    (r = 0, s = s_destino) e fica com a melhor solução nos custos originais.

    Em alguma rodada toda aresta mais cara que o ótimo já foi zerada; ali o
    erro da discretização fica abaixo de ε·OPT. Arestas zeradas usadas pela
    solução viram materialização do destino. Com epsilon None basta uma rodada.

    Args:
        solve: solver (já discretizado) aplicado ao grafo da rodada.
        objective: valor minimizado, medido no grafo original.

    Returns:
        Tuple: (melhor solução, índice da rodada que a produziu)
    """
    rounds = 1 if epsilon is None else 1 + sum(1 for d in graph.deltas.values() if d.retrieval > 0)
    current = graph
    zeroed: set[tuple[int, int]] = set()
    best = None

    for round_no in range(rounds):
        try:
            sol = solve(current)
        except Infeasible:
            if best is None:
                raise
            break
        mapped = Solution(tuple(
            SELF if p != SELF and (p, v) in zeroed else p for v, p in enumerate(sol.parent)
        ))
        report = evaluate(graph, mapped)
        key = (objective(report), report.storage_total, round_no)
        if best is None or key < best[0]:
            best = (key, mapped)

        heavy = [(-d.retrieval, pair) for pair, d in current.deltas.items() if d.retrieval > 0]
        if not heavy:
            break
        _, (u, v) = min(heavy)
        zeroed.add((u, v))
        current = current.with_deltas({(u, v): (graph.node_costs[v], 0)})
        if min_storage(current) > storage_budget:
            break
    logger.debug("rodadas de zeragem: melhor rodada %d, objetivo=%d", best[0][2], best[0][0])
    return best[1], best[0][2]


# --- 5. TABELAS ---

@dataclass
class BmrTable:
    """DP[v][u]: menor armazenamento em T[v] com v recuperado de u; OPT[v] = min_u DP[v][u]."""

    dp: list[list[float]]
    opt: list[float]
    arg: list[int]
    via: list[list[int]]

    def rows(self) -> list[dict]:
        return [
            {"v": v, "u": u, "dp": int(value)}
            for v, row in enumerate(self.dp)
            for u, value in enumerate(row)
            if value != math.inf
        ]


@dataclass
class MsrTable:
    states: list[list[PartialState]] = field(default_factory=list)

    def rows(self) -> list[dict]:
        return [
            {"v": v, "k": "" if st.k is None else st.k, "gamma": st.gamma, "rho": st.rho, "sigma": st.sigma}
            for v, entries in enumerate(self.states)
            for st in entries
        ]


# --- 6. SERVIÇO ---

class TreeDPService:
    """Algoritmos exatos e aproximados em uma árvore bidirecional."""

    def __init__(self, tree: BidirectionalTree):
        self.tree = tree
        self.last_bmr_table: BmrTable | None = None
        self.last_msr_table: MsrTable | None = None

    # BMR exato

    def _paths(self) -> tuple[list[list[int]], list[list[int]]]:
        """Recuperação ao longo do caminho u -> w e o antecessor de w nesse caminho."""
        t = self.tree
        dist = [[0] * t.n for _ in range(t.n)]
        via = [[SELF] * t.n for _ in range(t.n)]
        for u in range(t.n):
            stack = [u]
            seen = {u}
            while stack:
                x = stack.pop()
                for w in t.neighbors(x):
                    if w not in seen:
                        seen.add(w)
                        dist[u][w] = dist[u][x] + t.retrieval(x, w)
                        via[u][w] = x
                        stack.append(w)
        return dist, via

    def fill_bmr_table(self, retrieval_budget: int) -> BmrTable:
        t = self.tree
        dist, via = self._paths()
        inside = [set(t.subtree(v)) for v in range(t.n)]
        dp = [[math.inf] * t.n for _ in range(t.n)]
        opt = [math.inf] * t.n
        arg = [SELF] * t.n

        for v in t.postorder():
            for u in range(t.n):
                if dist[u][v] > retrieval_budget:
                    continue
                total = t.graph.node_costs[v] if u == v else t.storage(via[u][v], v)
                for w in t.children[v]:
                    if u in inside[w]:
                        total += dp[w][u]
                    else:
                        total += min(opt[w], dp[w][u])
                dp[v][u] = total
            opt[v], arg[v] = min((dp[v][u], u) for u in sorted(inside[v]))

        table = BmrTable(dp, opt, arg, via)
        self.last_bmr_table = table
        return table

    def reconstruct_bmr(self, table: BmrTable, v: int, u: int) -> dict[int, int]:
        """Pais da solução parcial em T[v] que realiza DP[v][u]."""
        t = self.tree
        inside = [set(t.subtree(x)) for x in range(t.n)]
        parent: dict[int, int] = {}
        stack = [(v, u)]
        while stack:
            x, source = stack.pop()
            parent[x] = SELF if source == x else table.via[source][x]
            for w in t.children[x]:
                if source in inside[w] or table.dp[w][source] < table.opt[w]:
                    stack.append((w, source))
                else:
                    stack.append((w, table.arg[w]))
        return parent

    def dp_bmr_exact(self, retrieval_budget: int) -> Solution:
        """Solução de menor armazenamento com recuperação de cada nó <= ℛ."""
        if retrieval_budget < 0:
            raise ValueError("limite de recuperação deve ser >= 0")
        t = self.tree
        table = self.fill_bmr_table(retrieval_budget)
        parent = self.reconstruct_bmr(table, t.root, table.arg[t.root])
        return Solution(tuple(parent[v] for v in range(t.n)))

    def mmr_via_bmr(self, storage_budget: int) -> Solution:
        """Menor recuperação máxima dentro do orçamento, por busca binária em ℛ."""
        g = self.tree.graph
        r_max = max((d.retrieval for d in g.deltas.values()), default=0)
        result = dual_binary_search(
            self.dp_bmr_exact,
            lambda sol: evaluate(g, sol).storage_total,
            storage_budget,
            guard(g.n * r_max),
        )
        logger.debug("MMR: ℛ* = %d após %d chamadas", result.bound, result.calls)
        return result.solution

    # MSR

    def fill_msr_table(self, tree: BidirectionalTree, storage_budget: int) -> MsrTable:
        """Tabela esparsa dos estados não dominados de cada nó (árvore binária)."""
        table = MsrTable([[] for _ in range(tree.n)])
        for v in tree.postorder():
            candidates = (
                st for st in connect(tree, v, table.states, tree.retrieval)
                if st.sigma - slack(tree, v, st) <= storage_budget
            )
            table.states[v] = pareto(candidates)
        logger.debug("MSR: %d estados no total", sum(len(s) for s in table.states))
        self.last_msr_table = table
        return table

    def _solve_msr(self, tree: BidirectionalTree, storage_budget: int, epsilon: Fraction | None) -> Solution:
        binary, owner = binarize_tree(tree)
        scaled, _ = discretize(binary, epsilon)
        table = self.fill_msr_table(scaled, storage_budget)
        feasible = [
            (st.rho, st.sigma, i) for i, st in enumerate(table.states[scaled.root])
            if st.sigma <= storage_budget
        ]
        if not feasible:
            raise Infeasible(f"nenhuma configuração com armazenamento <= {storage_budget}")
        _, _, index = min(feasible)
        parent = reconstruct(scaled, table.states, index)
        return collapse_helpers(Solution(tuple(parent)), owner, binary, tree)

    def _require_budget(self, graph: VersionGraph, storage_budget: int) -> None:
        minimum = min_storage(graph)
        if storage_budget < minimum:
            raise Infeasible(f"orçamento {storage_budget} abaixo do armazenamento mínimo {minimum}")

    def dp_msr_tree(self, storage_budget: int, epsilon: Fraction | None = None) -> Solution:
        """Recuperação total <= OPT + ε·r_max com armazenamento <= 𝒮."""
        self._require_budget(self.tree.graph, storage_budget)
        return self._solve_msr(self.tree, storage_budget, epsilon)

    def dp_msr_tree_fptas(self, storage_budget: int, epsilon: Fraction | None = None) -> Solution:
        """
        Aproximação (1+ε) para MSR: a DP discretizada dentro das rodadas de
        `zeroing_rounds`, avaliada pela recuperação total.
        """
        original = self.tree.graph
        self._require_budget(original, storage_budget)
        sol, _ = zeroing_rounds(
            original,
            storage_budget,
            epsilon,
            lambda current: self._solve_msr(self.tree.with_graph(current), storage_budget, epsilon),
            lambda report: report.retrieval_sum,
        )
        return sol
