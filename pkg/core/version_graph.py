"""Modelo de dados do grafo de versões, soluções e especificação de problemas."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Iterable, Mapping

from core.exceptions import DuplicateEdge, InvalidGraph, InvalidSolution

SELF = -1
"""Marcador de pai para versões materializadas."""


@dataclass(frozen=True)
class Delta:
    storage: int
    retrieval: int

    def key(self) -> tuple[int, int]:
        return (self.storage, self.retrieval)


@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    storage: int
    retrieval: int

    @property
    def pair(self) -> tuple[int, int]:
        return (self.src, self.dst)


@dataclass(frozen=True, eq=False)
class VersionGraph:
    """
    Grafo de versões dirigido.

    Nós são inteiros densos 0..n-1 com custo de materialização; cada aresta
    guarda custo de armazenamento e de recuperação. `helpers` marca nós
    auxiliares criados pela binarização de árvores: eles pagam armazenamento
    mas não entram nas somas/máximos de recuperação.
    """

    node_costs: tuple[int, ...]
    edges: tuple[Edge, ...] = ()
    helpers: frozenset[int] = frozenset()
    _index: Mapping[tuple[int, int], Delta] = field(init=False, repr=False)
    _out: tuple[tuple[int, ...], ...] = field(init=False, repr=False)
    _in: tuple[tuple[int, ...], ...] = field(init=False, repr=False)

    def __post_init__(self):
        n = len(self.node_costs)
        index: dict[tuple[int, int], Delta] = {}
        out: list[set[int]] = [set() for _ in range(n)]
        inc: list[set[int]] = [set() for _ in range(n)]
        for e in self.edges:
            delta = Delta(e.storage, e.retrieval)
            current = index.get(e.pair)
            # Paralelas: fica a mais barata em ordem (s, r)
            if current is None or delta.key() < current.key():
                index[e.pair] = delta
            if 0 <= e.src < n and 0 <= e.dst < n:
                out[e.src].add(e.dst)
                inc[e.dst].add(e.src)
        object.__setattr__(self, "_index", MappingProxyType(index))
        object.__setattr__(self, "_out", tuple(tuple(sorted(s)) for s in out))
        object.__setattr__(self, "_in", tuple(tuple(sorted(s)) for s in inc))

    @classmethod
    def from_edges(cls, node_costs: Iterable[int], edges: Iterable[tuple[int, int, int, int]],
                   merge_duplicates: bool = True, helpers: Iterable[int] = ()) -> "VersionGraph":
        """
        Constrói o grafo a partir de tuplas (src, dst, s, r).

        Args:
            merge_duplicates: mantém a aresta mais barata; se False, levanta DuplicateEdge.
        """
        chosen: dict[tuple[int, int], Edge] = {}
        for src, dst, s, r in edges:
            edge = Edge(int(src), int(dst), int(s), int(r))
            current = chosen.get(edge.pair)
            if current is not None:
                if not merge_duplicates:
                    raise DuplicateEdge(src, dst)
                if (current.storage, current.retrieval) <= (edge.storage, edge.retrieval):
                    continue
            chosen[edge.pair] = edge
        ordered = tuple(chosen[k] for k in sorted(chosen))
        return cls(tuple(int(c) for c in node_costs), ordered, frozenset(helpers))

    @property
    def n(self) -> int:
        return len(self.node_costs)

    @property
    def nodes(self) -> range:
        return range(self.n)

    @property
    def deltas(self) -> Mapping[tuple[int, int], Delta]:
        return self._index

    def delta(self, src: int, dst: int) -> Delta | None:
        return self._index.get((src, dst))

    def has_edge(self, src: int, dst: int) -> bool:
        return (src, dst) in self._index

    def successors(self, v: int) -> tuple[int, ...]:
        return self._out[v]

    def predecessors(self, v: int) -> tuple[int, ...]:
        return self._in[v]

    def counted(self, v: int) -> bool:
        """Nó conta para os agregados de recuperação (não é auxiliar)."""
        return v not in self.helpers

    def edge_tuples(self) -> list[tuple[int, int, int, int]]:
        return [(u, v, d.storage, d.retrieval) for (u, v), d in sorted(self._index.items())]

    def with_deltas(self, deltas: Mapping[tuple[int, int], tuple[int, int]]) -> "VersionGraph":
        """Cópia com custos de arestas substituídos (mesma topologia)."""
        edges = []
        for (u, v), d in sorted(self._index.items()):
            s, r = deltas.get((u, v), (d.storage, d.retrieval))
            edges.append(Edge(u, v, s, r))
        return VersionGraph(self.node_costs, tuple(edges), self.helpers)

    def undirected_pairs(self) -> set[tuple[int, int]]:
        return {(min(u, v), max(u, v)) for (u, v) in self._index}

    def to_networkx(self, undirected: bool = False):
        import networkx as nx

        graph = nx.Graph() if undirected else nx.DiGraph()
        graph.add_nodes_from(self.nodes)
        for (u, v), d in self._index.items():
            graph.add_edge(u, v, storage=d.storage, retrieval=d.retrieval)
        return graph


@dataclass(frozen=True)
class ExtendedGraph:
    """Grafo com raiz auxiliar: a aresta (aux, v) custa s_v e não tem recuperação."""

    base: VersionGraph

    @property
    def aux_root(self) -> int:
        return self.base.n

    @property
    def n_nodes(self) -> int:
        return self.base.n + 1

    @property
    def aux_edges(self) -> tuple[Edge, ...]:
        return tuple(Edge(self.aux_root, v, s, 0) for v, s in enumerate(self.base.node_costs))

    def all_edges(self) -> list[Edge]:
        real = [Edge(u, v, d.storage, d.retrieval) for (u, v), d in sorted(self.base.deltas.items())]
        return real + list(self.aux_edges)

    def delta(self, src: int, dst: int) -> Delta | None:
        if src == self.aux_root:
            return Delta(self.base.node_costs[dst], 0) if 0 <= dst < self.base.n else None
        return self.base.delta(src, dst)


def extend_with_aux_root(g: VersionGraph) -> ExtendedGraph:
    return ExtendedGraph(g)


@dataclass(frozen=True)
class Solution:
    """Plano de armazenamento: pai de recuperação de cada nó (SELF = materializado)."""

    parent: tuple[int, ...]

    @classmethod
    def from_parents(cls, parents: Iterable[int]) -> "Solution":
        return cls(tuple(int(p) for p in parents))

    @classmethod
    def from_sets(cls, n: int, materialized: Iterable[int], stored_edges: Iterable[tuple[int, int]]) -> "Solution":
        parent = [None] * n
        for v in materialized:
            parent[v] = SELF
        for u, v in stored_edges:
            if parent[v] is not None:
                raise InvalidSolution(f"nó {v} recebe mais de um pai")
            parent[v] = u
        missing = [v for v, p in enumerate(parent) if p is None]
        if missing:
            raise InvalidSolution(f"nós sem pai nem materialização: {missing}")
        return cls(tuple(parent))

    @classmethod
    def materialize_all(cls, n: int) -> "Solution":
        return cls((SELF,) * n)

    @property
    def n(self) -> int:
        return len(self.parent)

    @property
    def materialized(self) -> frozenset[int]:
        return frozenset(v for v, p in enumerate(self.parent) if p == SELF)

    @property
    def stored_edges(self) -> frozenset[tuple[int, int]]:
        return frozenset((p, v) for v, p in enumerate(self.parent) if p != SELF)

    def children(self) -> list[list[int]]:
        kids: list[list[int]] = [[] for _ in self.parent]
        for v, p in enumerate(self.parent):
            if p != SELF:
                kids[p].append(v)
        return kids


@dataclass(frozen=True)
class CostReport:
    storage_total: int
    retrieval_per_node: tuple[int, ...]
    retrieval_sum: int
    retrieval_max: int


class ProblemKind(str, Enum):
    MSR = "msr"
    MMR = "mmr"
    BSR = "bsr"
    BMR = "bmr"

    @property
    def bounds_storage(self) -> bool:
        return self in (ProblemKind.MSR, ProblemKind.MMR)


@dataclass(frozen=True)
class ProblemSpec:
    kind: ProblemKind
    bound: int

    def __post_init__(self):
        if self.bound < 0:
            raise ValueError("o limite do problema deve ser >= 0")

    def objective(self, report: CostReport) -> int:
        """Quantidade otimizada."""
        if self.kind is ProblemKind.MSR:
            return report.retrieval_sum
        if self.kind is ProblemKind.MMR:
            return report.retrieval_max
        return report.storage_total

    def secondary(self, report: CostReport) -> int:
        """Critério de desempate: a quantidade limitada."""
        return self.bounded_value(report)

    def bounded_value(self, report: CostReport) -> int:
        if self.kind.bounds_storage:
            return report.storage_total
        if self.kind is ProblemKind.BSR:
            return report.retrieval_sum
        return report.retrieval_max


@dataclass
class ValidationReport:
    invalid_costs: list[str] = field(default_factory=list)
    self_loops: list[tuple[int, int]] = field(default_factory=list)
    duplicate_edges: list[tuple[int, int]] = field(default_factory=list)
    dangling_edges: list[tuple[int, int]] = field(default_factory=list)
    triangle_violations: list[tuple[int, int, int]] = field(default_factory=list)
    generalized_violations: list[tuple[int, int]] = field(default_factory=list)

    @property
    def structurally_valid(self) -> bool:
        return not (self.invalid_costs or self.self_loops or self.duplicate_edges or self.dangling_edges)

    @property
    def triangle_valid(self) -> bool:
        return not self.triangle_violations

    @property
    def generalized_valid(self) -> bool:
        return not self.generalized_violations

    @property
    def violation_count(self) -> int:
        return (len(self.invalid_costs) + len(self.self_loops) + len(self.duplicate_edges)
                + len(self.dangling_edges) + len(self.triangle_violations) + len(self.generalized_violations))


def _is_cost(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool) and value >= 0


def validate_graph(g: VersionGraph, check_triangle: bool = False) -> ValidationReport:
    """
    Verifica o grafo sem alterá-lo.

    Returns:
        ValidationReport com violações estruturais e, se pedido, as triplas
        (u, w, v) que violam a desigualdade triangular em s ou r e os pares
        (u, v) com s_u + s_{u,v} < s_v.
    """
    report = ValidationReport()
    n = g.n
    for v, s in enumerate(g.node_costs):
        if not _is_cost(s):
            report.invalid_costs.append(f"nó {v}: {s!r}")
    seen: set[tuple[int, int]] = set()
    for e in g.edges:
        if not (_is_cost(e.storage) and _is_cost(e.retrieval)):
            report.invalid_costs.append(f"aresta ({e.src}, {e.dst}): ({e.storage!r}, {e.retrieval!r})")
        if e.src == e.dst:
            report.self_loops.append(e.pair)
        if e.pair in seen and e.pair not in report.duplicate_edges:
            report.duplicate_edges.append(e.pair)
        seen.add(e.pair)
        if not (0 <= e.src < n and 0 <= e.dst < n):
            report.dangling_edges.append(e.pair)
    if not check_triangle or not report.structurally_valid:
        return report

    for (u, v), d in sorted(g.deltas.items()):
        if g.node_costs[u] + d.storage < g.node_costs[v]:
            report.generalized_violations.append((u, v))
    for u, w in sorted(g.deltas):
        first = g.deltas[(u, w)]
        for v in g.successors(w):
            if v == u or not g.has_edge(u, v):
                continue
            second = g.deltas[(w, v)]
            direct = g.deltas[(u, v)]
            if (direct.retrieval > first.retrieval + second.retrieval
                    or direct.storage > first.storage + second.storage):
                report.triangle_violations.append((u, w, v))
    return report


def require_valid(g: VersionGraph) -> None:
    report = validate_graph(g)
    if not report.structurally_valid:
        problems = report.invalid_costs + [f"laço {p}" for p in report.self_loops] \
            + [f"duplicada {p}" for p in report.duplicate_edges] + [f"fora do intervalo {p}" for p in report.dangling_edges]
        raise InvalidGraph("grafo inválido: " + "; ".join(map(str, problems)))
