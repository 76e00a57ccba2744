"""Avaliação de custos e checagem de viabilidade de soluções."""
from core.exceptions import CostOverflow, InvalidSolution
from core.version_graph import SELF, CostReport, ProblemSpec, Solution, VersionGraph
from config.settings import settings


def guard(value: int) -> int:
    """Custos acumulados devem caber em 64 bits."""
    if value > settings.COST_LIMIT:
        raise CostOverflow(f"custo {value} excede o limite de 64 bits")
    return value


def retrieval_costs(g: VersionGraph, parent: tuple[int, ...]) -> list[int]:
    """
    Custo de recuperação de cada nó seguindo a cadeia de pais.

    Raises:
        InvalidSolution: cadeia cíclica ou aresta inexistente.
    """
    n = g.n
    if len(parent) != n:
        raise InvalidSolution(f"solução tem {len(parent)} nós, grafo tem {n}")
    cost: list[int | None] = [None] * n
    for start in range(n):
        if cost[start] is not None:
            continue
        chain = []
        on_chain = set()
        v = start
        while cost[v] is None:
            p = parent[v]
            if p == SELF:
                cost[v] = 0
                break
            if not 0 <= p < n:
                raise InvalidSolution(f"pai inválido {p} para o nó {v}")
            if v in on_chain:
                raise InvalidSolution(f"ciclo na cadeia de recuperação passando por {v}")
            if not g.has_edge(p, v):
                raise InvalidSolution(f"aresta ({p}, {v}) não existe no grafo")
            chain.append(v)
            on_chain.add(v)
            v = p
        for w in reversed(chain):
            cost[w] = guard(cost[parent[w]] + g.deltas[(parent[w], w)].retrieval)
    return cost


def evaluate(g: VersionGraph, sol: Solution) -> CostReport:
    """Custos exatos de uma solução; nós auxiliares ficam fora da soma e do máximo."""
    per_node = retrieval_costs(g, sol.parent)
    storage = 0
    for v, p in enumerate(sol.parent):
        storage += g.node_costs[v] if p == SELF else g.deltas[(p, v)].storage
    counted = [r for v, r in enumerate(per_node) if g.counted(v)]
    return CostReport(
        storage_total=guard(storage),
        retrieval_per_node=tuple(per_node),
        retrieval_sum=guard(sum(counted)),
        retrieval_max=max(counted, default=0),
    )


def check_feasible(g: VersionGraph, sol: Solution, spec: ProblemSpec) -> bool:
    return spec.bounded_value(evaluate(g, sol)) <= spec.bound
