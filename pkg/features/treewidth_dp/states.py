"""
Estados da DP sobre decomposições e as transformações entre eles.

Um estado descreve, para cada vértice da bolsa (em ordem crescente de id),
a solução parcial já fixada abaixo do nó da decomposição:

- par: SELF se o vértice ainda é raiz da sua árvore parcial (paga s_v e
  pode ganhar um pai depois), EXTERNAL se o pai já foi fixado em um vértice
  esquecido;
- dep: quantos vértices contados dependem dele (MSR) ou a maior distância
  de recuperação até um dependente (MMR);
- ret: custo de recuperação a partir da raiz parcial, em ticks;
- anc: máscara de bits (1 << id) dos ancestrais que estão na bolsa.

Arestas só são decididas quando a primeira ponta é esquecida, então duas
pontas na mesma bolsa nunca estão ligadas diretamente.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

from core.exceptions import CyclicAnc
from core.version_graph import SELF

EXTERNAL = -2


def bit(v: int) -> int:
    return 1 << v


@dataclass(frozen=True, slots=True)
class DPStateTuple:
    par: tuple[int, ...]
    dep: tuple[int, ...]
    ret: tuple[int, ...]
    anc: tuple[int, ...]

    @classmethod
    def empty(cls) -> "DPStateTuple":
        return cls((), (), (), ())

    def roots(self) -> list[int]:
        return [i for i, p in enumerate(self.par) if p == SELF]


# --- 1. ESTRUTURA DENTRO DA BOLSA ---

def topological_order(bag: Sequence[int], state: DPStateTuple) -> list[int]:
    """
    Posições da bolsa com ancestrais antes dos descendentes.

    Raises:
        CyclicAnc: Anc não é uma ordem parcial (ciclo ou cadeia inconsistente).
    """
    index = {v: i for i, v in enumerate(bag)}
    for i, v in enumerate(bag):
        mask = state.anc[i]
        if mask & bit(v):
            raise CyclicAnc(f"vértice {v} é ancestral de si mesmo")
        for u in bag:
            if mask & bit(u):
                j = index[u]
                if state.anc[j] & ~mask or state.anc[j] & bit(v):
                    raise CyclicAnc(f"ancestrais de {u} e {v} inconsistentes")
    return sorted(range(len(bag)), key=lambda i: (bin(state.anc[i]).count("1"), bag[i]))


def nearest_ancestor(bag: Sequence[int], state: DPStateTuple, i: int) -> int | None:
    """Posição do ancestral mais próximo na bolsa (o de maior Anc)."""
    best = None
    for j, u in enumerate(bag):
        if state.anc[i] & bit(u):
            if best is None or bin(state.anc[j]).count("1") > bin(state.anc[best]).count("1"):
                best = j
    return best


def external_dependency(bag: Sequence[int], state: DPStateTuple, weights: Sequence[int]) -> tuple[int, ...]:
    """
    Dependentes de cada vértice que já foram esquecidos e cujo ancestral
    mais próximo na bolsa é ele: Dep(v) - peso(v) - soma de Dep dos filhos na bolsa.
    """
    order = topological_order(bag, state)
    ext = [state.dep[i] - weights[i] for i in range(len(bag))]
    for i in order:
        up = nearest_ancestor(bag, state, i)
        if up is not None:
            ext[up] -= state.dep[i]
    return tuple(ext)


# --- 2. TRANSFORMAÇÕES PARA FRENTE ---

def introduce_vertex(bag: tuple[int, ...], state: DPStateTuple, v: int,
                     weight: int, msr: bool = True) -> tuple[tuple[int, ...], DPStateTuple]:
    """Novo vértice entra como raiz isolada; σ cresce s_v e ρ não muda."""
    new_bag = tuple(sorted(bag + (v,)))
    i = new_bag.index(v)

    def put(values, value):
        return values[:i] + (value,) + values[i:]

    return new_bag, DPStateTuple(
        put(state.par, SELF),
        put(state.dep, weight if msr else 0),
        put(state.ret, 0),
        put(state.anc, 0),
    )


def restrict_introduced(bag: tuple[int, ...], state: DPStateTuple,
                        v: int) -> tuple[tuple[int, ...], DPStateTuple]:
    """Transformação inversa da introdução: retira v, que deve ser raiz isolada."""
    i = bag.index(v)
    if state.par[i] != SELF or state.ret[i] != 0 or state.anc[i] != 0:
        raise ValueError(f"vértice {v} não é uma raiz recém-introduzida")
    if any(mask & bit(v) for mask in state.anc):
        raise ValueError(f"vértice {v} já tem dependentes na bolsa")

    def drop(values):
        return values[:i] + values[i + 1:]

    return drop(bag), DPStateTuple(drop(state.par), drop(state.dep), drop(state.ret), drop(state.anc))


def attach(bag: Sequence[int], state: DPStateTuple, p: int, c: int, r: int,
           msr: bool = True) -> tuple[DPStateTuple, int]:
    """
    Pendura a raiz parcial da posição c sob a posição p por uma aresta de recuperação r.

    Returns:
        Tuple: (novo estado, acréscimo de ρ no MSR ou candidato a máximo no MMR)
    """
    vc = bag[c]
    shift = state.ret[p] + r
    lineage = bit(bag[p]) | state.anc[p]
    ret, anc, dep = list(state.ret), list(state.anc), list(state.dep)
    par = list(state.par)
    par[c] = EXTERNAL

    for y in range(len(bag)):
        if y == c or state.anc[y] & bit(vc):
            ret[y] += shift
            anc[y] |= lineage

    if msr:
        gain = state.dep[c] * shift
        for a in range(len(bag)):
            if lineage & bit(bag[a]):
                dep[a] += state.dep[c]
    else:
        gain = shift + state.dep[c]
        for a in range(len(bag)):
            if lineage & bit(bag[a]):
                dep[a] = max(dep[a], state.ret[p] - state.ret[a] + r + state.dep[c])

    return DPStateTuple(tuple(par), tuple(dep), tuple(ret), tuple(anc)), gain


def forget_position(bag: tuple[int, ...], state: DPStateTuple, i: int) -> tuple[tuple[int, ...], DPStateTuple]:
    v = bag[i]

    def drop(values):
        return values[:i] + values[i + 1:]

    anc = tuple(mask & ~bit(v) for mask in drop(state.anc))
    return drop(bag), DPStateTuple(drop(state.par), drop(state.dep), drop(state.ret), anc)


# --- 3. JUNÇÃO ---

@dataclass(frozen=True)
class Merge:
    state: DPStateTuple
    sides: tuple[str | None, ...]
    up: tuple[int | None, ...]
    dist: tuple[int, ...]


def merge_structure(bag: Sequence[int], a: DPStateTuple, b: DPStateTuple) -> Merge | None:
    """
    Une Par, Ret e Anc de dois estados sobre a mesma bolsa.

    Cada vértice recebe o pai do lado que já o fixou; se os dois lados
    fixaram, ou se a união forma ciclo, os estados são incompatíveis (None).
    Dep fica por conta de quem chama.
    """
    k = len(bag)
    sides: list[str | None] = []
    up: list[int | None] = []
    dist: list[int] = []
    for i in range(k):
        ext_a, ext_b = a.par[i] == EXTERNAL, b.par[i] == EXTERNAL
        if ext_a and ext_b:
            return None
        if not (ext_a or ext_b):
            sides.append(None)
            up.append(None)
            dist.append(0)
            continue
        side, st = ("a", a) if ext_a else ("b", b)
        j = nearest_ancestor(bag, st, i)
        sides.append(side)
        up.append(j)
        dist.append(st.ret[i] - (st.ret[j] if j is not None else 0))

    ret: list[int | None] = [None] * k
    anc: list[int] = [0] * k
    for start in range(k):
        chain, seen = [], set()
        i = start
        while i is not None and ret[i] is None:
            if i in seen:
                return None
            seen.add(i)
            chain.append(i)
            i = up[i]
        for i in reversed(chain):
            j = up[i]
            if j is None:
                ret[i], anc[i] = dist[i], 0
            else:
                ret[i], anc[i] = dist[i] + ret[j], bit(bag[j]) | anc[j]

    par = tuple(EXTERNAL if s is not None else SELF for s in sides)
    state = DPStateTuple(par, tuple([0] * k), tuple(ret), tuple(anc))
    return Merge(state, tuple(sides), tuple(up), tuple(dist))


def join_dependencies(bag: Sequence[int], merge: Merge, a: DPStateTuple, b: DPStateTuple,
                      weights: Sequence[int]) -> DPStateTuple:
    """Dep da união: peso + dependentes externos dos dois lados + Dep dos filhos na bolsa."""
    ext_a = external_dependency(bag, a, weights)
    ext_b = external_dependency(bag, b, weights)
    dep = [weights[i] + ext_a[i] + ext_b[i] for i in range(len(bag))]
    for i in sorted(range(len(bag)), key=lambda x: -bin(merge.state.anc[x]).count("1")):
        if merge.up[i] is not None:
            dep[merge.up[i]] += dep[i]
    return replace(merge.state, dep=tuple(dep))


def join_heights(bag: Sequence[int], merge: Merge, a: DPStateTuple, b: DPStateTuple) -> tuple[DPStateTuple, int]:
    """
    Versão MMR: altura de cada vértice na união e o maior custo de
    recuperação que a junção pode ter criado.
    """
    height = [max(a.dep[i], b.dep[i]) for i in range(len(bag))]
    for i in sorted(range(len(bag)), key=lambda x: -bin(merge.state.anc[x]).count("1")):
        j = merge.up[i]
        if j is not None:
            height[j] = max(height[j], merge.dist[i] + height[i])
    peak = max(
        (merge.state.ret[i] + max(a.dep[i], b.dep[i]) for i in range(len(bag))),
        default=0,
    )
    return replace(merge.state, dep=tuple(height)), peak


def distribute_retrieval(bag: Sequence[int], merged: DPStateTuple, a: DPStateTuple, b: DPStateTuple,
                         weights: Sequence[int]) -> int:
    """
    ρ_Δ tal que ρ_z = ρ_a + ρ_b + ρ_Δ: cada vértice da bolsa e seus
    dependentes externos de cada lado passam a pagar o Ret da união.
    """
    ext_a = external_dependency(bag, a, weights)
    ext_b = external_dependency(bag, b, weights)
    delta = 0
    for i in range(len(bag)):
        w = weights[i]
        delta += (w + ext_a[i] + ext_b[i]) * merged.ret[i]
        delta -= (w + ext_a[i]) * a.ret[i] + (w + ext_b[i]) * b.ret[i]
    return delta


# --- 4. CHECAGENS ---

def external_retrieval(bag: Sequence[int], merged: DPStateTuple,
                       sides: Sequence[str | None]) -> tuple[DPStateTuple, DPStateTuple]:
    """
    Restrições verdadeiras de um estado unido a cada lado.

    Em cada lado, o vértice cujo pai veio do outro lado volta a ser raiz:
    seus descendentes na bolsa perdem o Ret e os ancestrais dele.
    """
    order = topological_order(bag, merged)
    restricted = []
    for side in ("a", "b"):
        par = [SELF] * len(bag)
        ret = list(merged.ret)
        anc = list(merged.anc)
        for i in order:
            if sides[i] == side:
                par[i] = EXTERNAL
                continue
            if sides[i] is None:
                continue
            base_ret, base_anc = ret[i], anc[i]
            for y in range(len(bag)):
                if merged.anc[y] & bit(bag[i]):
                    ret[y] -= base_ret
                    anc[y] &= ~base_anc
            ret[i], anc[i] = 0, 0
        restricted.append(DPStateTuple(tuple(par), merged.dep, tuple(ret), tuple(anc)))
    return restricted[0], restricted[1]


def compatibility(bag: Sequence[int], merged: DPStateTuple, a: DPStateTuple, b: DPStateTuple,
                  sides: Sequence[str | None], weights: Sequence[int] | None = None) -> bool:
    """
    Os lados são as restrições verdadeiras da união (Par, Ret, Anc) e, com
    `weights`, os dependentes externos da união somam os dos lados.
    """
    res_a, res_b = external_retrieval(bag, merged, sides)
    for res, side in ((res_a, a), (res_b, b)):
        if (res.par, res.ret, res.anc) != (side.par, side.ret, side.anc):
            return False
    if weights is None:
        return True
    ext_z = external_dependency(bag, merged, weights)
    ext_a = external_dependency(bag, a, weights)
    ext_b = external_dependency(bag, b, weights)
    return all(ext_z[i] == ext_a[i] + ext_b[i] for i in range(len(bag)))
