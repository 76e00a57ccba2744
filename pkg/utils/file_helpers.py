"""Leitura e escrita dos formatos de texto: lista de arestas, decomposição e solução."""
from __future__ import annotations

import logging
from collections import deque
from pathlib import Path

from core.exceptions import DuplicateEdge, InvalidSolution, ParseError, UnknownNode
from core.version_graph import Solution, VersionGraph
from features.treewidth_dp.decomposition import (
    FORGET,
    INTRODUCE,
    LEAF,
    NICE_KINDS,
    NiceNode,
    NiceTreeDecomposition,
    TreeDecomposition,
)

logger = logging.getLogger(__name__)

PLAIN_KIND = "bag"


def _records(text: str):
    """Linhas úteis como (número da linha, tokens); '#' inicia comentário."""
    for number, line in enumerate(text.splitlines(), start=1):
        content = line.split("#", 1)[0].strip()
        if content:
            yield number, content.split()


def _cost(token: str, line: int, what: str) -> int:
    try:
        value = int(token)
    except ValueError:
        raise ParseError(line, f"{what} não é inteiro: {token!r}") from None
    if value < 0:
        raise ParseError(line, f"{what} negativo: {value}")
    return value


# --- LISTA DE ARESTAS ---

def parse_edge_list(text: str) -> VersionGraph:
    """
    Interpreta `node <id> <s_v>` e `edge <src> <dst> <s_e> <r_e>`.

    Raises:
        ParseError: token inválido, custo negativo, laço, nó repetido ou ids não densos.
        DuplicateEdge: par ordenado repetido.
        UnknownNode: aresta para nó não declarado.
    """
    costs: dict[int, int] = {}
    declared_at: dict[int, int] = {}
    edges: dict[tuple[int, int], tuple[int, int, int]] = {}

    for line, tokens in _records(text):
        kind = tokens[0]
        if kind == "node":
            if len(tokens) != 3:
                raise ParseError(line, "esperado 'node <id> <s_v>'")
            v = _cost(tokens[1], line, "id")
            if v in costs:
                raise ParseError(line, f"nó {v} declarado duas vezes")
            costs[v] = _cost(tokens[2], line, "custo do nó")
            declared_at[v] = line
        elif kind == "edge":
            if len(tokens) != 5:
                raise ParseError(line, "esperado 'edge <src> <dst> <s_e> <r_e>'")
            u = _cost(tokens[1], line, "origem")
            v = _cost(tokens[2], line, "destino")
            if u == v:
                raise ParseError(line, f"laço no nó {u}")
            if (u, v) in edges:
                raise DuplicateEdge(u, v, line)
            edges[(u, v)] = (_cost(tokens[3], line, "s_e"), _cost(tokens[4], line, "r_e"), line)
        else:
            raise ParseError(line, f"registro desconhecido {kind!r}")

    n = len(costs)
    for v, line in sorted(declared_at.items()):
        if v >= n:
            raise ParseError(line, f"ids de nós devem ser densos 0..{n - 1}; encontrado {v}")
    for (u, v), (_, _, line) in edges.items():
        for x in (u, v):
            if x not in costs:
                raise UnknownNode(x, line)

    return VersionGraph.from_edges(
        [costs[v] for v in range(n)],
        [(u, v, s, r) for (u, v), (s, r, _) in edges.items()],
        merge_duplicates=False,
    )


def load_edge_list(path: str | Path) -> VersionGraph:
    g = parse_edge_list(Path(path).read_text(encoding="utf-8"))
    logger.info("grafo %s: %d nós, %d arestas", path, g.n, len(g.deltas))
    return g


def format_edge_list(g: VersionGraph) -> str:
    lines = [f"node {v} {s}" for v, s in enumerate(g.node_costs)]
    lines += [f"edge {u} {v} {s} {r}" for u, v, s, r in g.edge_tuples()]
    return "\n".join(lines) + "\n"


def save_edge_list(g: VersionGraph, path: str | Path) -> None:
    Path(path).write_text(format_edge_list(g), encoding="utf-8")


# --- SOLUÇÃO ---

def format_solution(sol: Solution) -> str:
    lines = [f"materialize {v}" for v in sorted(sol.materialized)]
    lines += [f"store {u} {v}" for u, v in sorted(sol.stored_edges)]
    return "\n".join(lines) + "\n"


def save_solution(sol: Solution, path: str | Path) -> None:
    Path(path).write_text(format_solution(sol), encoding="utf-8")


def load_solution(path: str | Path, n: int) -> Solution:
    materialized, stored = [], []
    for line, tokens in _records(Path(path).read_text(encoding="utf-8")):
        if tokens[0] == "materialize" and len(tokens) == 2:
            materialized.append(_cost(tokens[1], line, "nó"))
        elif tokens[0] == "store" and len(tokens) == 3:
            stored.append((_cost(tokens[1], line, "origem"), _cost(tokens[2], line, "destino")))
        else:
            raise ParseError(line, "esperado 'materialize <v>' ou 'store <u> <v>'")
    for v in materialized + [v for _, v in stored]:
        if v >= n:
            raise InvalidSolution(f"nó {v} fora do grafo com {n} nós")
    return Solution.from_sets(n, materialized, stored)


# --- DECOMPOSIÇÃO ---

def parse_decomposition(text: str) -> TreeDecomposition | NiceTreeDecomposition:
    """
    Linhas `bag <id> <tipo> <pai|-> <v1> <v2> ...`.

    Tipo `bag` em todas as linhas descreve uma decomposição comum; os tipos
    leaf/introduce/forget/join descrevem uma nice (ids renumerados em ordem).
    """
    rows = []
    for line, tokens in _records(text):
        if tokens[0] != "bag" or len(tokens) < 4:
            raise ParseError(line, "esperado 'bag <id> <tipo> <pai|-> <vértices...>'")
        bag_id = _cost(tokens[1], line, "id da bolsa")
        kind = tokens[2]
        if kind != PLAIN_KIND and kind not in NICE_KINDS:
            raise ParseError(line, f"tipo de bolsa desconhecido {kind!r}")
        parent = None if tokens[3] == "-" else _cost(tokens[3], line, "pai")
        vertices = frozenset(_cost(t, line, "vértice") for t in tokens[4:])
        rows.append((line, bag_id, kind, parent, vertices))

    if not rows:
        raise ParseError(0, "decomposição vazia")
    ids = [r[1] for r in rows]
    if len(set(ids)) != len(ids):
        raise ParseError(rows[-1][0], "ids de bolsa repetidos")
    known = set(ids)
    for line, _, _, parent, _ in rows:
        if parent is not None and parent not in known:
            raise ParseError(line, f"pai {parent} inexistente")

    kinds = {r[2] for r in rows}
    if kinds == {PLAIN_KIND}:
        bags = {bag_id: vertices for _, bag_id, _, _, vertices in rows}
        edges = tuple((parent, bag_id) for _, bag_id, _, parent, _ in rows if parent is not None)
        return TreeDecomposition(bags, edges)
    if PLAIN_KIND in kinds:
        raise ParseError(rows[0][0], "tipos 'bag' e nice misturados")

    roots = [r for r in rows if r[3] is None]
    if len(roots) != 1:
        raise ParseError(rows[0][0], f"esperada uma raiz, encontradas {len(roots)}")
    index = {bag_id: i for i, bag_id in enumerate(sorted(ids))}
    by_id = {r[1]: r for r in rows}
    children: dict[int, list[int]] = {bag_id: [] for bag_id in ids}
    for _, bag_id, _, parent, _ in rows:
        if parent is not None:
            children[parent].append(bag_id)

    nodes = []
    for bag_id in sorted(ids):
        _, _, kind, _, bag = by_id[bag_id]
        kids = tuple(index[c] for c in sorted(children[bag_id]))
        vertex = None
        if kind == LEAF and len(bag) == 1:
            vertex = next(iter(bag))
        elif kind in (INTRODUCE, FORGET) and len(kids) == 1:
            other = by_id[sorted(children[bag_id])[0]][4]
            diff = bag - other if kind == INTRODUCE else other - bag
            if len(diff) == 1:
                vertex = next(iter(diff))
        nodes.append(NiceNode(index[bag_id], kind, bag, kids, vertex))
    return NiceTreeDecomposition(tuple(nodes), index[roots[0][1]])


def load_decomposition(path: str | Path) -> TreeDecomposition | NiceTreeDecomposition:
    return parse_decomposition(Path(path).read_text(encoding="utf-8"))


def format_decomposition(dec: TreeDecomposition | NiceTreeDecomposition) -> str:
    def line(bag_id, kind, parent, bag):
        vertices = " ".join(str(v) for v in sorted(bag))
        return f"bag {bag_id} {kind} {'-' if parent is None else parent} {vertices}".rstrip()

    if isinstance(dec, NiceTreeDecomposition):
        parent = dec.parent_of()
        return "\n".join(line(n.id, n.kind, parent[n.id], n.bag) for n in dec.nodes) + "\n"

    adjacency: dict[int, list[int]] = {b: [] for b in dec.bags}
    for a, b in dec.edges:
        adjacency[a].append(b)
        adjacency[b].append(a)
    root = min(dec.bags)
    parent: dict[int, int | None] = {root: None}
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for y in sorted(adjacency[x]):
            if y not in parent:
                parent[y] = x
                queue.append(y)
    return "\n".join(line(b, PLAIN_KIND, parent.get(b), dec.bags[b]) for b in sorted(dec.bags)) + "\n"


def save_decomposition(dec: TreeDecomposition | NiceTreeDecomposition, path: str | Path) -> None:
    Path(path).write_text(format_decomposition(dec), encoding="utf-8")
