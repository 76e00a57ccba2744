"""Varredura de limites para vários algoritmos, com linhas em ordem determinística."""
from __future__ import annotations

import asyncio
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from config.settings import settings
from core.exceptions import Infeasible, InputError, VerstoreError
from core.version_graph import ProblemKind, VersionGraph
from features.benchmark.dispatch import SolveOptions, check_supported, extraction_root, run_solver
from features.extracted.service import ExtractedTreeService

logger = logging.getLogger(__name__)

FRONTIER_SUFFIX = "-frontier"


def parse_bounds(text: str) -> list[int]:
    """`início:fim:passos` -> passos inteiros igualmente espaçados, extremos incluídos."""
    try:
        start, stop, steps = (int(part) for part in text.split(":"))
    except ValueError:
        raise InputError(f"limites devem ser 'início:fim:passos', recebido {text!r}") from None
    if steps < 1 or start < 0 or stop < start:
        raise InputError(f"intervalo de limites inválido: {text!r}")
    if steps == 1:
        return [start]
    return [start + int(Fraction((stop - start) * i, steps - 1) + Fraction(1, 2)) for i in range(steps)]


@dataclass(frozen=True)
class Cell:
    algo: str
    bound: int


def _run_cell(node_costs, edges, helpers, kind: ProblemKind, cell: Cell, options: SolveOptions) -> tuple[dict, str | None]:
    """Executa uma célula; o grafo chega como tuplas para atravessar o pool de processos."""
    g = VersionGraph.from_edges(node_costs, edges, helpers=helpers)
    row = {"algo": cell.algo, "budget": cell.bound}
    try:
        outcome = run_solver(g, kind, cell.algo, cell.bound, options)
    except Infeasible:
        return {**row, "objective": None, "runtime_ms": None, "status": "infeasible"}, None
    except VerstoreError as exc:
        return {**row, "objective": None, "runtime_ms": None, "status": "error"}, str(exc)
    return {**row, "objective": outcome.objective, "runtime_ms": outcome.runtime_ms, "status": "ok"}, None


class BenchmarkService:
    """
    Executa as células (algoritmo, limite) de uma varredura.

    O DP da árvore extraída para MSR/BSR roda uma única vez: as linhas por
    limite saem da mesma fronteira com o mesmo tempo, e cada ponto da
    fronteira vira uma linha `<algo>-frontier`.
    """

    def __init__(self, graph: VersionGraph, dataset: str, jobs: int | None = None):
        self.graph = graph
        self.dataset = dataset
        self.jobs = max(1, settings.JOBS if jobs is None else jobs)

    def _frontier_rows(self, kind: ProblemKind, bounds: list[int], options: SolveOptions) -> list[dict]:
        start = time.perf_counter()
        extracted = ExtractedTreeService(self.graph, extraction_root(self.graph, options))
        frontier = extracted.dp_msr_heuristic(options.epsilon, options.prune_factor)
        runtime_ms = round((time.perf_counter() - start) * 1000, 3)

        rows = []
        for bound in bounds:
            row = {"algo": "dp-extracted", "budget": bound, "runtime_ms": runtime_ms}
            try:
                if kind is ProblemKind.MSR:
                    objective = frontier.best_at(bound).retrieval_sum
                else:
                    objective = frontier.cheapest_within(bound).storage
                rows.append({**row, "objective": objective, "status": "ok"})
            except Infeasible:
                rows.append({**row, "objective": None, "status": "infeasible"})
        for point in frontier.points:
            budget, objective = ((point.storage, point.retrieval_sum) if kind is ProblemKind.MSR
                                 else (point.retrieval_sum, point.storage))
            rows.append({"algo": "dp-extracted" + FRONTIER_SUFFIX, "budget": budget,
                         "objective": objective, "runtime_ms": runtime_ms, "status": "frontier"})
        return rows

    async def _run_cells(self, kind: ProblemKind, cells: list[Cell], options: SolveOptions) -> list[tuple[dict, str | None]]:
        g = self.graph
        payload = (g.node_costs, g.edge_tuples(), tuple(g.helpers))
        if self.jobs == 1:
            return [_run_cell(*payload, kind, cell, options) for cell in cells]
        loop = asyncio.get_running_loop()
        with ProcessPoolExecutor(max_workers=self.jobs) as pool:
            futures = [loop.run_in_executor(pool, _run_cell, *payload, kind, cell, options) for cell in cells]
            # gather devolve na ordem de submissão
            return await asyncio.gather(*futures)

    def sweep(self, kind: ProblemKind, algos: list[str], bounds: list[int],
              options: SolveOptions | None = None) -> list[dict]:
        """
        Returns:
            Linhas `algo,dataset,budget,objective,runtime_ms,status`, na ordem
            dos algoritmos e depois dos limites. Células inviáveis têm objetivo
            vazio e status `infeasible`.
        """
        options = options or SolveOptions()
        for algo in algos:
            check_supported(kind, algo)
        frontier_algo = kind in (ProblemKind.MSR, ProblemKind.BSR)
        cells = [Cell(algo, bound) for algo in algos for bound in bounds
                 if not (frontier_algo and algo == "dp-extracted")]
        results = iter(asyncio.run(self._run_cells(kind, cells, options)))

        rows: list[dict] = []
        for algo in algos:
            if frontier_algo and algo == "dp-extracted":
                rows.extend(self._frontier_rows(kind, bounds, options))
                continue
            for _ in bounds:
                row, error = next(results)
                if error:
                    logger.warning("%s limite=%d: %s", row["algo"], row["budget"], error)
                rows.append(row)
        for row in rows:
            row["dataset"] = self.dataset
        logger.info("varredura %s: %d linhas", kind.value, len(rows))
        return rows
