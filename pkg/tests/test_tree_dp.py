from fractions import Fraction

import pytest

from core.evaluation import evaluate
from core.exceptions import DegenerateInputWarning, Infeasible
from core.tree import BidirectionalTree
from core.version_graph import SELF, ProblemKind, Solution, VersionGraph
from features.oracle.service import Oracle
from features.tree_dp.service import (
    TreeDPService,
    binarize_tree,
    discretize_graph,
    dual_binary_search,
)
from tests.conftest import budget_sweep, build_random_tree


def star(leaves: int) -> VersionGraph:
    edges = []
    for v in range(1, leaves + 1):
        edges.append((0, v, 2 + v, v % 3))
        edges.append((v, 0, 4 + v, 1 + v % 2))
    return VersionGraph.from_edges([30] + [20 + v for v in range(1, leaves + 1)], edges)


def caterpillar(spine: int, legs: int) -> VersionGraph:
    """Espinha 0..spine-1 com `legs` folhas em cada nó."""
    pairs = [(v, v + 1) for v in range(spine - 1)]
    leaf = spine
    for v in range(spine):
        for _ in range(legs):
            pairs.append((v, leaf))
            leaf += 1
    return _from_pairs(leaf, pairs)


def broom(handle: int, bristles: int) -> VersionGraph:
    """Caminho 0..handle-1 com uma estrela no fim."""
    pairs = [(v, v + 1) for v in range(handle - 1)]
    pairs += [(handle - 1, handle + b) for b in range(bristles)]
    return _from_pairs(handle + bristles, pairs)


def _from_pairs(n: int, pairs: list[tuple[int, int]]) -> VersionGraph:
    edges = []
    for u, v in pairs:
        edges.append((u, v, 2 + (3 * u + v) % 5, 1 + (u + 2 * v) % 4))
        edges.append((v, u, 3 + (u + v) % 4, 1 + (2 * u + v) % 3))
    return VersionGraph.from_edges([20 + (7 * v) % 13 for v in range(n)], edges)


def service(g: VersionGraph) -> TreeDPService:
    return TreeDPService(BidirectionalTree.from_graph(g))


# --- BMR ---

def test_two_node_bmr(two_node):
    dp = service(two_node)
    sol = dp.dp_bmr_exact(1)
    assert sol.parent == (1, SELF)
    assert evaluate(two_node, sol).storage_total == 12
    assert dp.last_bmr_table.rows() == [
        {"v": 0, "u": 0, "dp": 18},
        {"v": 0, "u": 1, "dp": 12},
        {"v": 1, "u": 1, "dp": 8},
    ]


def test_bmr_with_zero_bound_materializes_everything(fig4_tree):
    sol = service(fig4_tree).dp_bmr_exact(0)
    assert sol.materialized == {0, 1, 2}


def test_bmr_rejects_negative_bound(two_node):
    with pytest.raises(ValueError):
        service(two_node).dp_bmr_exact(-1)


@pytest.mark.parametrize("seed", range(200))
def test_bmr_matches_oracle(seed):
    g = build_random_tree(seed, 2 + seed % 7)
    dp, oracle = service(g), Oracle(g)
    for bound in (0, 4, 9, 20):
        report = evaluate(g, dp.dp_bmr_exact(bound))
        assert report.retrieval_max <= bound
        assert report.storage_total == oracle.objective(ProblemKind.BMR, bound)


# --- MMR ---

def test_two_node_mmr(two_node):
    dp = service(two_node)
    assert evaluate(two_node, dp.mmr_via_bmr(12)).retrieval_max == 1
    report = evaluate(two_node, dp.mmr_via_bmr(17))
    assert (report.retrieval_max, report.storage_total) == (1, 12)
    assert evaluate(two_node, dp.mmr_via_bmr(18)).retrieval_max == 0


def test_mmr_below_min_storage_is_infeasible(two_node):
    with pytest.raises(Infeasible):
        service(two_node).mmr_via_bmr(11)


@pytest.mark.parametrize("seed", range(30))
def test_mmr_matches_oracle(seed):
    g = build_random_tree(seed, 3 + seed % 4)
    dp, oracle = service(g), Oracle(g)
    for budget in budget_sweep(g, 4):
        report = evaluate(g, dp.mmr_via_bmr(budget))
        assert report.storage_total <= budget
        assert report.retrieval_max == oracle.objective(ProblemKind.MMR, budget)


@pytest.mark.parametrize("seed", range(40))
def test_dual_search_over_bmr_matches_mmr_oracle(seed):
    g = build_random_tree(seed, 2 + seed % 7)
    dp, oracle = service(g), Oracle(g)
    upper = g.n * max(d.retrieval for d in g.deltas.values())
    for budget in budget_sweep(g, 3):
        result = dual_binary_search(
            dp.dp_bmr_exact, lambda sol: evaluate(g, sol).storage_total, budget, upper
        )
        assert result.bound == oracle.objective(ProblemKind.MMR, budget)
        assert result.calls <= upper.bit_length() + 1


# --- MSR ---

def test_two_node_msr(two_node):
    dp = service(two_node)
    assert evaluate(two_node, dp.dp_msr_tree(13)).retrieval_sum == 1
    assert evaluate(two_node, dp.dp_msr_tree(18)).retrieval_sum == 0
    with pytest.raises(Infeasible):
        dp.dp_msr_tree(11)


def test_fig4_tree_msr(fig4_tree):
    sol = service(fig4_tree).dp_msr_tree(1109)
    assert evaluate(fig4_tree, sol).retrieval_sum == 9


@pytest.mark.parametrize("seed", range(40))
def test_exact_msr_matches_oracle(seed):
    g = build_random_tree(seed, 2 + seed % 6)
    dp, oracle = service(g), Oracle(g)
    for budget in budget_sweep(g, 3):
        report = evaluate(g, dp.dp_msr_tree(budget))
        assert report.storage_total <= budget
        assert report.retrieval_sum == oracle.objective(ProblemKind.MSR, budget)


@pytest.mark.parametrize("seed", range(100))
def test_fptas_is_within_one_plus_epsilon(seed):
    g = build_random_tree(seed, 4 + seed % 5)
    dp, oracle = service(g), Oracle(g)
    for budget in budget_sweep(g, 5):
        report = evaluate(g, dp.dp_msr_tree_fptas(budget, Fraction(1, 4)))
        best = oracle.objective(ProblemKind.MSR, budget)
        assert report.storage_total <= budget
        assert best <= report.retrieval_sum <= Fraction(5, 4) * best


@pytest.mark.parametrize("seed", range(30))
def test_rounded_msr_stays_within_additive_error(seed):
    g = build_random_tree(seed, 3 + seed % 5)
    dp, oracle = service(g), Oracle(g)
    epsilon = Fraction(1, 4)
    r_max = max(d.retrieval for d in g.deltas.values())
    for budget in budget_sweep(g, 3):
        report = evaluate(g, dp.dp_msr_tree(budget, epsilon))
        assert report.storage_total <= budget
        assert report.retrieval_sum <= oracle.objective(ProblemKind.MSR, budget) + epsilon * r_max


@pytest.mark.parametrize("seed", range(10))
def test_fptas_without_rounding_is_exact(seed):
    g = build_random_tree(seed + 100, 5)
    budget = budget_sweep(g, 3)[1]
    report = evaluate(g, service(g).dp_msr_tree_fptas(budget))
    assert report.retrieval_sum == Oracle(g).objective(ProblemKind.MSR, budget)


def test_msr_table_rows(two_node):
    dp = service(two_node)
    dp.dp_msr_tree(18)
    rows = dp.last_msr_table.rows()
    assert {r["v"] for r in rows} == {0, 1}
    assert set(rows[0]) == {"v", "k", "gamma", "rho", "sigma"}


# --- BINARIZAÇÃO ---

def test_binary_tree_is_left_alone(fig4_tree):
    tree = BidirectionalTree.from_graph(fig4_tree)
    binary, owner = binarize_tree(tree)
    assert binary is tree
    assert owner == (0, 1, 2)


def test_star_gets_helper_chain():
    tree = BidirectionalTree.from_graph(star(5))
    binary, owner = binarize_tree(tree)
    assert binary.n == 9
    assert binary.n <= 2 * tree.n
    assert binary.graph.helpers == {6, 7, 8}
    assert owner[6:] == (0, 0, 0)
    assert all(len(c) <= 2 for c in binary.children)
    assert binary.graph.delta(0, 6).key() == (0, 0)
    assert binary.graph.node_costs[6] == 30


@pytest.mark.parametrize("leaves", [3, 4, 5])
def test_binarization_keeps_optimum(leaves):
    g = star(leaves)
    oracle = Oracle(g)
    dp = service(g)
    for budget in budget_sweep(g, 4):
        sol = dp.dp_msr_tree(budget)
        assert sol.n == g.n
        report = evaluate(g, sol)
        assert report.storage_total <= budget
        assert report.retrieval_sum == oracle.objective(ProblemKind.MSR, budget)


@pytest.mark.parametrize("builder", [lambda: caterpillar(3, 2), lambda: broom(5, 3)], ids=["caterpillar", "broom"])
def test_binarized_shapes_keep_dp_optimum(builder):
    g = builder()
    tree = BidirectionalTree.from_graph(g)
    binary, _ = binarize_tree(tree)
    assert binary.graph.helpers
    assert binary.n <= 2 * tree.n
    assert all(len(c) <= 2 for c in binary.children)
    dp, oracle = service(g), Oracle(g, limit=g.n)
    for budget in budget_sweep(g, 4):
        report = evaluate(g, dp.dp_msr_tree(budget))
        assert report.storage_total <= budget
        assert report.retrieval_sum == oracle.objective(ProblemKind.MSR, budget)
    for bound in (0, 3, 6, 12):
        report = evaluate(g, dp.dp_bmr_exact(bound))
        assert report.retrieval_max <= bound
        assert report.storage_total == oracle.objective(ProblemKind.BMR, bound)


@pytest.mark.parametrize("seed", range(100))
def test_binarization_keeps_oracle_optima(seed):
    g = build_random_tree(seed, 3 + seed % 4)
    binary, _ = binarize_tree(BidirectionalTree.from_graph(g))
    assert binary.n <= 2 * g.n
    before, after = Oracle(g), Oracle(binary.graph, limit=2 * g.n)
    for budget in budget_sweep(g, 3):
        assert after.objective(ProblemKind.MSR, budget) == before.objective(ProblemKind.MSR, budget)
    for bound in (0, 5, 12):
        assert after.objective(ProblemKind.BMR, bound) == before.objective(ProblemKind.BMR, bound)


# --- DISCRETIZAÇÃO E BUSCA ---

@pytest.mark.parametrize("seed", range(30))
def test_discretized_sum_is_close_for_every_solution(seed):
    g = build_random_tree(seed, 3 + seed % 4)
    scaled, params = discretize_graph(g, Fraction(1, 4))
    slack = params.n ** 2 * params.tick_length
    for report, parent in Oracle(g).configurations:
        rounded = params.undiscretize(evaluate(scaled, Solution(parent)).retrieval_sum)
        assert 0 <= rounded - report.retrieval_sum <= slack



def test_discretization_constants_small():
    _, params = discretize_graph(VersionGraph.from_edges([1000, 10, 100], [(0, 1, 9, 9), (1, 2, 90, 90)]),
                                 Fraction(1, 10))
    assert params.ticks == 810
    assert params.tick_length == 1
    assert params.identity


def test_discretization_rounds_up():
    edges = [(0, 1, 1, 1000), (1, 2, 1, 12)] + [(v, v + 1, 1, 1) for v in range(2, 9)]
    scaled, params = discretize_graph(VersionGraph.from_edges([5] * 10, edges), Fraction(1, 2))
    assert params.ticks == 20000
    assert params.tick_length == 5
    assert scaled.delta(1, 2).retrieval == 3
    assert scaled.delta(0, 1).retrieval == 200
    assert scaled.delta(4, 5).retrieval == 1
    assert params.undiscretize(3) == 15


def test_zero_retrieval_is_degenerate():
    g = VersionGraph.from_edges([3, 3], [(0, 1, 1, 0), (1, 0, 1, 0)])
    with pytest.warns(DegenerateInputWarning):
        scaled, params = discretize_graph(g, Fraction(1, 4))
    assert scaled is g
    assert params.identity


def test_exact_costs_skip_discretization(two_node):
    scaled, params = discretize_graph(two_node, None)
    assert scaled is two_node
    assert params.epsilon is None


def test_dual_search_finds_smallest_bound_in_few_calls():
    result = dual_binary_search(lambda bound: bound, lambda value: 100 - value, 37, 100)
    assert result.bound == 63
    assert result.calls <= 8


def test_dual_search_without_feasible_bound():
    with pytest.raises(Infeasible):
        dual_binary_search(lambda bound: bound, lambda value: 1000, 37, 100)
