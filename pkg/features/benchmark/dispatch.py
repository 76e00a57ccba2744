"""Matriz problema x algoritmo e execução cronometrada de um solver."""
from __future__ import annotations

import logging
import random
import time
from dataclasses import dataclass
from fractions import Fraction

from config.settings import settings
from core.arborescence import min_storage
from core.evaluation import evaluate
from core.exceptions import InputError
from core.tree import BidirectionalTree
from core.version_graph import CostReport, ProblemKind, ProblemSpec, Solution, VersionGraph
from features.extracted.service import ExtractedTreeService
from features.greedy.service import GreedyService
from features.oracle.service import brute_force
from features.tree_dp.service import TreeDPService, storage_binary_search
from features.treewidth_dp.decomposition import NiceTreeDecomposition, TreeDecomposition
from features.treewidth_dp.service import TreewidthDPService

logger = logging.getLogger(__name__)

SOLVER_MATRIX: dict[ProblemKind, tuple[str, ...]] = {
    ProblemKind.MSR: ("lmg", "lmg-all", "dp-tree", "dp-btw", "dp-extracted", "oracle"),
    ProblemKind.MMR: ("dp-tree", "dp-btw", "dp-extracted", "oracle"),
    ProblemKind.BSR: ("lmg", "lmg-all", "dp-tree", "dp-btw", "dp-extracted", "oracle"),
    ProblemKind.BMR: ("mp", "dp-tree", "dp-btw", "dp-extracted", "oracle"),
}
ALGORITHMS = ("lmg", "lmg-all", "mp", "dp-tree", "dp-btw", "dp-extracted", "oracle")


@dataclass(frozen=True)
class SolveOptions:
    epsilon: Fraction | None = None
    prune_factor: float | Fraction | None = None
    root: int | None = None
    decomposition: TreeDecomposition | NiceTreeDecomposition | None = None
    seed: int | None = None
    mp_variant: str = "prim"


@dataclass(frozen=True)
class SolveOutcome:
    solution: Solution
    report: CostReport
    objective: int
    runtime_ms: float
    details: object | None = None

    def row(self) -> dict:
        return {
            "objective": self.objective,
            "storage": self.report.storage_total,
            "retrieval_sum": self.report.retrieval_sum,
            "retrieval_max": self.report.retrieval_max,
            "runtime_ms": self.runtime_ms,
        }


def check_supported(kind: ProblemKind, algo: str) -> None:
    if algo not in SOLVER_MATRIX[kind]:
        raise InputError(f"algoritmo {algo!r} não resolve {kind.value}; opções: {', '.join(SOLVER_MATRIX[kind])}")


def extraction_root(g: VersionGraph, options: SolveOptions) -> int:
    """Raiz explícita; senão sorteada pela semente; senão a padrão."""
    if options.root is not None:
        return options.root
    if options.seed is not None and g.n:
        return random.Random(options.seed).randrange(g.n)
    return settings.DEFAULT_ROOT


def _storage_solver(g: VersionGraph, algo: str, options: SolveOptions):
    """Solver MSR como função de 𝒮."""
    eps = options.epsilon
    if algo == "lmg":
        greedy = GreedyService(g)
        return lambda budget: greedy.lmg(budget)[0]
    if algo == "lmg-all":
        greedy = GreedyService(g)
        return lambda budget: greedy.lmg_all(budget)[0]
    if algo == "dp-tree":
        tree_dp = TreeDPService(BidirectionalTree.from_graph(g, extraction_root(g, options)))
        return lambda budget: tree_dp.dp_msr_tree_fptas(budget, eps)
    if algo == "dp-btw":
        btw = TreewidthDPService(g, options.decomposition)
        return lambda budget: btw.dp_msr_btw(budget, eps)
    raise InputError(f"algoritmo {algo!r} sem variante MSR")


def _dispatch(g: VersionGraph, kind: ProblemKind, algo: str, bound: int,
              options: SolveOptions) -> tuple[Solution, object | None]:
    """Solução e, quando o solver produz, um artefato tabular (traço, tabela do DP ou fronteira)."""
    if algo == "oracle":
        return brute_force(g, ProblemSpec(kind, bound))[1], None
    eps = options.epsilon

    if algo == "dp-extracted":
        extracted = ExtractedTreeService(g, extraction_root(g, options))
        if kind is ProblemKind.MSR:
            frontier = extracted.dp_msr_heuristic(eps, options.prune_factor)
            return frontier.best_at(bound).solution, frontier
        if kind is ProblemKind.BSR:
            frontier = extracted.dp_msr_heuristic(eps, options.prune_factor)
            return frontier.cheapest_within(bound).solution, frontier
        if kind is ProblemKind.MMR:
            return extracted.mmr_heuristic(bound), None
        return extracted.dp_bmr_heuristic(bound), None

    if kind is ProblemKind.MSR:
        if algo in ("lmg", "lmg-all"):
            greedy = GreedyService(g)
            return greedy.lmg(bound) if algo == "lmg" else greedy.lmg_all(bound)
        if algo == "dp-tree":
            tree_dp = TreeDPService(BidirectionalTree.from_graph(g, extraction_root(g, options)))
            return tree_dp.dp_msr_tree_fptas(bound, eps), tree_dp.last_msr_table
        return _storage_solver(g, algo, options)(bound), None
    if kind is ProblemKind.BSR:
        # Para lmg/lmg-all o armazenamento não é monótono no orçamento: a busca
        # devolve uma solução viável, não necessariamente a de menor 𝒮.
        result = storage_binary_search(
            _storage_solver(g, algo, options),
            lambda sol: evaluate(g, sol).retrieval_sum,
            bound,
            min_storage(g),
            sum(g.node_costs),
        )
        return result.solution, None
    if kind is ProblemKind.MMR:
        if algo == "dp-tree":
            return TreeDPService(BidirectionalTree.from_graph(g, extraction_root(g, options))).mmr_via_bmr(bound), None
        return TreewidthDPService(g, options.decomposition).dp_mmr_btw(bound, eps), None

    if algo == "mp":
        return GreedyService(g).mp_baseline(bound, options.mp_variant), None
    if algo == "dp-tree":
        tree_dp = TreeDPService(BidirectionalTree.from_graph(g, extraction_root(g, options)))
        return tree_dp.dp_bmr_exact(bound), tree_dp.last_bmr_table
    return TreewidthDPService(g, options.decomposition).bmr_btw_bicriteria(bound, eps), None


def run_solver(g: VersionGraph, kind: ProblemKind, algo: str, bound: int,
               options: SolveOptions | None = None) -> SolveOutcome:
    """
    Resolve e mede o tempo apenas da chamada do solver.

    Raises:
        InputError: combinação não suportada ou entrada inválida.
        Infeasible: nenhuma configuração atende o limite.
    """
    check_supported(kind, algo)
    options = options or SolveOptions()
    start = time.perf_counter()
    solution, details = _dispatch(g, kind, algo, bound, options)
    runtime_ms = round((time.perf_counter() - start) * 1000, 3)
    report = evaluate(g, solution)
    outcome = SolveOutcome(solution, report, ProblemSpec(kind, bound).objective(report), runtime_ms, details)
    logger.debug("%s/%s limite=%d -> objetivo %d em %.3f ms", kind.value, algo, bound, outcome.objective, runtime_ms)
    return outcome
