"""Oráculo de força bruta para MSR, MMR, BSR e BMR em instâncias pequenas."""
import logging
from itertools import product

from config.settings import settings
from core.evaluation import evaluate
from core.exceptions import Infeasible, TooLarge
from core.version_graph import SELF, CostReport, ProblemKind, ProblemSpec, Solution, VersionGraph

logger = logging.getLogger(__name__)


def _acyclic(parent: tuple[int, ...]) -> bool:
    state = [0] * len(parent)  # 0 = novo, 1 = na pilha, 2 = resolvido
    for start in range(len(parent)):
        v = start
        path = []
        while v != SELF and state[v] == 0:
            state[v] = 1
            path.append(v)
            v = parent[v]
        if v != SELF and state[v] == 1:
            return False
        for w in path:
            state[w] = 2
    return True


class Oracle:
    """
    Enumera todas as escolhas de pai (aresta de entrada ou materialização)
    por nó, descarta ciclos e guarda a avaliação de cada configuração.
    """

    def __init__(self, graph: VersionGraph, limit: int | None = None, max_configs: int | None = None):
        limit = settings.ORACLE_LIMIT if limit is None else limit
        max_configs = settings.ORACLE_MAX_CONFIGS if max_configs is None else max_configs
        if graph.n > limit:
            raise TooLarge(f"oráculo limitado a {limit} nós; grafo tem {graph.n}")
        choices = [[SELF, *graph.predecessors(v)] for v in graph.nodes]
        total = 1
        for c in choices:
            total *= len(c)
        if total > max_configs:
            raise TooLarge(f"{total} configurações excedem o limite de {max_configs}")
        self.graph = graph
        self._choices = choices
        self._configs: list[tuple[CostReport, tuple[int, ...]]] | None = None

    @property
    def configurations(self) -> list[tuple[CostReport, tuple[int, ...]]]:
        """Todas as soluções válidas com seus custos (calculadas uma vez)."""
        if self._configs is None:
            found = []
            for parent in product(*self._choices):
                if not _acyclic(parent):
                    continue
                found.append((evaluate(self.graph, Solution(parent)), parent))
            logger.debug("oráculo: %d configurações válidas", len(found))
            self._configs = found
        return self._configs

    def solve(self, spec: ProblemSpec) -> tuple[int, Solution]:
        """
        Ótimo exato; desempate lexicográfico por (objetivo, quantidade limitada, pais).

        Raises:
            Infeasible: nenhuma configuração respeita o limite.
        """
        best = None
        for report, parent in self.configurations:
            if spec.bounded_value(report) > spec.bound:
                continue
            key = (spec.objective(report), spec.bounded_value(report), parent)
            if best is None or key < best:
                best = key
        if best is None:
            raise Infeasible(f"nenhuma configuração satisfaz {spec.kind.value.upper()} <= {spec.bound}")
        return best[0], Solution(best[2])

    def objective(self, kind: ProblemKind, bound: int) -> int:
        return self.solve(ProblemSpec(kind, bound))[0]


def brute_force(g: VersionGraph, spec: ProblemSpec, limit: int | None = None) -> tuple[int, Solution]:
    return Oracle(g, limit).solve(spec)


def spanning_arborescence_weights(g: VersionGraph) -> list[int]:
    """Armazenamento de cada arborescência geradora do grafo estendido."""
    return [report.storage_total for report, _ in Oracle(g).configurations]