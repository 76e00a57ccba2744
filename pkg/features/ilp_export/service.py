"""Exportação do MSR como programa inteiro misto no formato CPLEX-LP (pulp)."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import pulp

from core.evaluation import evaluate
from core.version_graph import SELF, Solution, VersionGraph, extend_with_aux_root

logger = logging.getLogger(__name__)


@dataclass
class IlpModel:
    """
    Modelo pulp do MSR sobre o grafo estendido.

    `x[(u, v)]` é o fluxo (quantas versões são recuperadas passando pela
    aresta) e `indicator[(u, v)]` diz se a aresta é armazenada. Arestas
    auxiliares usam a raiz n como origem.
    """

    problem: pulp.LpProblem
    x: dict[tuple[int, int], pulp.LpVariable]
    indicator: dict[tuple[int, int], pulp.LpVariable]

    def assign(self, flows: dict[tuple[int, int], int], stored: dict[tuple[int, int], int]) -> None:
        for pair, var in self.x.items():
            var.varValue = flows.get(pair, 0)
        for pair, var in self.indicator.items():
            var.varValue = stored.get(pair, 0)

    def violated(self) -> list[str]:
        """Restrições não satisfeitas pelos valores atribuídos."""
        return [name for name, constraint in self.problem.constraints.items() if not constraint.valid()]

    def objective_value(self) -> int:
        return int(round(pulp.value(self.problem.objective) or 0))


def _names(pair: tuple[int, int], aux: int) -> tuple[str, str]:
    u, v = pair
    tag = f"aux_{v}" if u == aux else f"{u}_{v}"
    return f"x_{tag}", f"I_{tag}"


def build_ilp_model(g: VersionGraph, storage_budget: int) -> IlpModel:
    """
    min Σ r_e·x_e sujeito a x_e <= n·I_e, Σ s_e·I_e <= 𝒮 e, para cada versão,
    fluxo de entrada = fluxo de saída + 1.
    """
    ext = extend_with_aux_root(g)
    n = g.n
    problem = pulp.LpProblem("verstore_msr", pulp.LpMinimize)
    x: dict[tuple[int, int], pulp.LpVariable] = {}
    indicator: dict[tuple[int, int], pulp.LpVariable] = {}
    costs: dict[tuple[int, int], tuple[int, int]] = {}
    for e in ext.all_edges():
        x_name, i_name = _names(e.pair, ext.aux_root)
        x[e.pair] = pulp.LpVariable(x_name, lowBound=0, upBound=n, cat=pulp.LpInteger)
        indicator[e.pair] = pulp.LpVariable(i_name, cat=pulp.LpBinary)
        costs[e.pair] = (e.storage, e.retrieval)

    problem += pulp.lpSum(costs[p][1] * x[p] for p in x), "retrieval_total"
    for pair in x:
        _, i_name = _names(pair, ext.aux_root)
        problem += x[pair] <= n * indicator[pair], f"ind_{i_name[2:]}"
    problem += pulp.lpSum(costs[p][0] * indicator[p] for p in indicator) <= storage_budget, "storage"
    for u in g.nodes:
        inflow = [x[p] for p in x if p[1] == u]
        outflow = [x[p] for p in x if p[0] == u]
        problem += pulp.lpSum(inflow) - pulp.lpSum(outflow) == 1, f"sink_{u}"
    return IlpModel(problem, x, indicator)


def solution_incidence(g: VersionGraph, sol: Solution) -> tuple[dict[tuple[int, int], int], dict[tuple[int, int], int]]:
    """Valores (x_e, I_e) de uma solução: x_e é o tamanho da subárvore abaixo da aresta."""
    evaluate(g, sol)
    aux = g.n
    size = [1] * g.n
    kids = sol.children()
    order: list[int] = []
    stack = [v for v in g.nodes if sol.parent[v] == SELF]
    while stack:
        v = stack.pop()
        order.append(v)
        stack.extend(kids[v])
    for v in reversed(order):
        for c in kids[v]:
            size[v] += size[c]

    flows, stored = {}, {}
    for v, p in enumerate(sol.parent):
        pair = (aux, v) if p == SELF else (p, v)
        flows[pair] = size[v]
        stored[pair] = 1
    return flows, stored


def export_ilp(g: VersionGraph, storage_budget: int, path: str | Path) -> Path:
    """Grava o arquivo LP (Minimize / Subject To / Bounds / Generals / Binaries / End)."""
    model = build_ilp_model(g, storage_budget)
    target = Path(path)
    model.problem.writeLP(str(target))
    logger.info("ILP gravado em %s: %d variáveis, %d restrições",
                target, len(model.problem.variables()), len(model.problem.constraints))
    return target
