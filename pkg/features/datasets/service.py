"""Construção de conjuntos de dados: histórico git, compressão aleatória, grafos ER e estatísticas."""
from __future__ import annotations

import json
import logging
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from core.exceptions import CyclicHistory, InputError, MissingDelta, UnknownNode
from core.version_graph import VersionGraph

logger = logging.getLogger(__name__)

COMPRESSION_MIN = Fraction(3, 10)
RETRIEVAL_FACTOR = Fraction(6, 5)

# (u, v, rng) -> (s_e, r_e)
DeltaModel = Callable[[int, int, random.Random], tuple[int, int]]


def round_half_up(value: Fraction | int) -> int:
    """Arredonda meio para cima (valores não negativos)."""
    return math.floor(Fraction(value) + Fraction(1, 2))


# --- ESQUEMA DO DUMP ---

class Commit(BaseModel):
    id: str
    bytes: int = Field(ge=0)
    parents: list[str] = Field(default_factory=list)


class CommitDelta(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    source: str = Field(alias="from")
    to: str
    bytes: int = Field(ge=0)


class CommitDump(BaseModel):
    commits: list[Commit]
    deltas: list[CommitDelta] = Field(default_factory=list)


def load_commit_dump(path: str | Path) -> CommitDump:
    try:
        return CommitDump.model_validate(json.loads(Path(path).read_text(encoding="utf-8")))
    except (ValidationError, json.JSONDecodeError) as exc:
        raise InputError(f"dump de commits inválido em {path}: {exc}") from exc


@dataclass(frozen=True)
class DatasetStats:
    nodes: int
    edges: int
    avg_node_cost: int
    avg_edge_cost: int

    def row(self) -> dict:
        return {
            "nodes": self.nodes,
            "edges": self.edges,
            "avg_node_cost": self.avg_node_cost,
            "avg_edge_cost": self.avg_edge_cost,
        }


class DatasetService:
    """Geradores puros: mesma entrada e mesma semente produzem o mesmo grafo."""

    def ingest_git(self, dump: CommitDump) -> VersionGraph:
        """
        Um nó por commit (s_v = bytes) e, para cada par pai-filho, as duas
        arestas com s_e = r_e = bytes do delta naquele sentido.

        Raises:
            UnknownNode: pai ou delta citando commit ausente.
            CyclicHistory: referências de pais com ciclo.
            MissingDelta: par pai-filho sem delta em algum sentido.
        """
        index: dict[str, int] = {}
        for commit in dump.commits:
            if commit.id in index:
                raise InputError(f"commit repetido no dump: {commit.id}")
            index[commit.id] = len(index)

        history = nx.DiGraph()
        history.add_nodes_from(index.values())
        for commit in dump.commits:
            for parent in commit.parents:
                if parent not in index:
                    raise UnknownNode(parent)
                history.add_edge(index[parent], index[commit.id])
        if not nx.is_directed_acyclic_graph(history):
            cycle = nx.find_cycle(history)
            raise CyclicHistory(f"histórico com ciclo entre commits {[u for u, _ in cycle]}")

        sizes: dict[tuple[int, int], int] = {}
        for delta in dump.deltas:
            for name in (delta.source, delta.to):
                if name not in index:
                    raise UnknownNode(name)
            sizes[(index[delta.source], index[delta.to])] = delta.bytes

        edges = []
        for u, v in sorted(history.edges):
            for pair in ((u, v), (v, u)):
                if pair not in sizes:
                    names = {i: c for c, i in index.items()}
                    raise MissingDelta(f"sem delta de {names[pair[0]]} para {names[pair[1]]}")
                edges.append((*pair, sizes[pair], sizes[pair]))

        g = VersionGraph.from_edges([c.bytes for c in dump.commits], edges)
        logger.info("histórico ingerido: %d commits, %d arestas", g.n, len(g.deltas))
        return g

    def random_compression(self, g: VersionGraph, seed: int) -> VersionGraph:
        """
        s' = round(s·U[0.3, 1]) limitado a [ceil(0.3·s), s]; r' = round(1.2·r).
        Custos dos nós não mudam.

        Sorteio com random.Random(seed) (Mersenne Twister), um uniform por
        aresta na ordem (origem, destino): a mesma semente reproduz o arquivo
        apenas com o gerador do Python.
        """
        rng = random.Random(seed)
        deltas = {}
        for (u, v), d in sorted(g.deltas.items()):
            factor = Fraction(rng.uniform(float(COMPRESSION_MIN), 1.0))
            low = math.ceil(COMPRESSION_MIN * d.storage)
            storage = min(d.storage, max(low, round_half_up(d.storage * factor)))
            deltas[(u, v)] = (storage, round_half_up(d.retrieval * RETRIEVAL_FACTOR))
        return g.with_deltas(deltas)

    def er_construction(self, node_costs: list[int], p: float, seed: int,
                        delta_model: DeltaModel | None = None) -> VersionGraph:
        """
        Um sorteio por par não ordenado; com probabilidade p entram os dois sentidos.

        Gerador random.Random(seed) (Mersenne Twister), não um PRNG de 64 bits:
        pares visitados em ordem (i, j) com i < j, um random() por par e, se
        aceito, o delta_model do sentido (i, j) antes do (j, i).

        Args:
            delta_model: custos (s, r) de cada sentido; o padrão sorteia
                s = r uniforme em [1, média dos nós / 10].
        """
        if not 0 <= p <= 1:
            raise ValueError("p deve estar entre 0 e 1")
        rng = random.Random(seed)
        if delta_model is None:
            average = sum(node_costs) // len(node_costs) if node_costs else 0
            top = max(1, average // 10)

            def delta_model(u: int, v: int, r: random.Random) -> tuple[int, int]:
                cost = r.randint(1, top)
                return cost, cost

        n = len(node_costs)
        edges = []
        for i in range(n):
            for j in range(i + 1, n):
                if rng.random() < p:
                    edges.append((i, j, *delta_model(i, j, rng)))
                    edges.append((j, i, *delta_model(j, i, rng)))
        logger.debug("ER: n=%d p=%s -> %d arestas", n, p, len(edges))
        return VersionGraph.from_edges(node_costs, edges)

    def stats(self, g: VersionGraph) -> DatasetStats:
        """Contagens e custos médios inteiros (arredondamento half-up)."""
        edges = list(g.deltas.values())
        avg_node = round_half_up(Fraction(sum(g.node_costs), g.n)) if g.n else 0
        avg_edge = round_half_up(Fraction(sum(d.storage for d in edges), len(edges))) if edges else 0
        return DatasetStats(g.n, len(edges), avg_node, avg_edge)
