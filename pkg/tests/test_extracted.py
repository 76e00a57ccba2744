import math
from fractions import Fraction

import pytest

from core.evaluation import evaluate
from core.exceptions import Infeasible, UnreachableNode
from core.version_graph import SELF, ProblemKind, Solution, VersionGraph
from features.extracted.service import ExtractedTreeService, extract_bidirectional_tree, map_back
from features.oracle.service import Oracle
from tests.conftest import budget_sweep, build_random_connected, build_random_tree


def shortcut_triangle() -> VersionGraph:
    return VersionGraph.from_edges([20, 30, 40], [(0, 1, 1, 1), (1, 2, 1, 1), (0, 2, 50, 50)])


def exact_frontier(g: VersionGraph):
    return ExtractedTreeService(g).dp_msr_heuristic(epsilon=None, prune_factor=math.inf, geometric=False)


# --- EXTRAÇÃO ---

def test_tree_input_is_extracted_unchanged(fig4_tree):
    extracted = extract_bidirectional_tree(fig4_tree, 0)
    assert extracted.tree.graph.edge_tuples() == fig4_tree.edge_tuples()
    assert extracted.synthesized == frozenset()


def test_shortcut_is_left_out_and_reverses_are_synthesized():
    extracted = extract_bidirectional_tree(shortcut_triangle(), 0)
    assert not extracted.tree.graph.has_edge(0, 2)
    assert extracted.synthesized == {(1, 0), (2, 1)}
    assert extracted.tree.graph.delta(1, 0).key() == (20, 0)
    assert extracted.tree.graph.delta(2, 1).key() == (30, 0)


def test_synthesized_edges_map_back_to_materialization():
    extracted = extract_bidirectional_tree(shortcut_triangle(), 0)
    sol = map_back(extracted, Solution((1, SELF, 1)))
    assert sol.parent == (SELF, SELF, 1)


def test_unreachable_root_is_reported():
    g = VersionGraph.from_edges([1, 1], [(0, 1, 1, 1)])
    with pytest.raises(UnreachableNode):
        ExtractedTreeService(g, root=1).dp_bmr_heuristic(3)


# --- FRONTEIRA MSR ---

def test_fig4_tree_frontier(fig4_tree):
    frontier = exact_frontier(fig4_tree)
    assert frontier.rows() == [
        {"storage": 109, "retrieval_sum": 99},
        {"storage": 119, "retrieval_sum": 9},
        {"storage": 1110, "retrieval_sum": 0},
    ]
    assert frontier.best_at(1109).retrieval_sum == 9
    assert frontier.cheapest_within(9).storage == 119
    with pytest.raises(Infeasible):
        frontier.best_at(108)
    with pytest.raises(Infeasible):
        exact_frontier(fig4_tree).cheapest_within(-1)


def test_default_pruning_drops_expensive_points(fig4_tree):
    frontier = ExtractedTreeService(fig4_tree).dp_msr_heuristic(geometric=False)
    assert max(p.storage for p in frontier.points) <= 2 * 109


def test_prune_factor_below_one_is_rejected(fig4_tree):
    with pytest.raises(ValueError):
        ExtractedTreeService(fig4_tree).dp_msr_heuristic(prune_factor=0.5)


@pytest.mark.parametrize("seed", range(15))
def test_exact_frontier_on_trees_matches_oracle(seed):
    g = build_random_tree(seed, 3 + seed % 5)
    frontier, oracle = exact_frontier(g), Oracle(g)
    for budget in budget_sweep(g, 4):
        assert frontier.best_at(budget).retrieval_sum == oracle.objective(ProblemKind.MSR, budget)


@pytest.mark.parametrize("seed", range(15))
def test_frontier_points_are_feasible_and_ordered(seed):
    g = build_random_connected(seed, 5)
    frontier = ExtractedTreeService(g).dp_msr_heuristic(Fraction(1, 4), prune_factor=math.inf)
    storages = [p.storage for p in frontier.points]
    totals = [p.retrieval_sum for p in frontier.points]
    assert storages == sorted(storages)
    assert totals == sorted(totals, reverse=True)
    assert len(set(totals)) == len(totals)
    oracle = Oracle(g)
    for point in frontier.points:
        report = evaluate(g, point.solution)
        assert (report.storage_total, report.retrieval_sum) == (point.storage, point.retrieval_sum)
        assert point.retrieval_sum >= oracle.objective(ProblemKind.MSR, point.storage)


# --- BMR E MMR ---

@pytest.mark.parametrize("seed", range(15))
def test_bmr_heuristic_is_exact_on_trees(seed):
    g = build_random_tree(seed, 3 + seed % 5)
    service, oracle = ExtractedTreeService(g), Oracle(g)
    for bound in (0, 5, 12):
        report = evaluate(g, service.dp_bmr_heuristic(bound))
        assert report.storage_total == oracle.objective(ProblemKind.BMR, bound)


@pytest.mark.parametrize("seed", range(15))
def test_bmr_heuristic_is_feasible_and_monotone(seed):
    g = build_random_connected(seed, 6)
    service = ExtractedTreeService(g)
    storages = []
    for bound in (0, 3, 6, 12, 30):
        report = evaluate(g, service.dp_bmr_heuristic(bound))
        assert report.retrieval_max <= bound
        storages.append(report.storage_total)
    assert storages == sorted(storages, reverse=True)


def test_synthesized_reverse_still_gives_feasible_bmr():
    g = shortcut_triangle()
    report = evaluate(g, ExtractedTreeService(g).dp_bmr_heuristic(1))
    assert report.retrieval_max <= 1


@pytest.mark.parametrize("seed", range(10))
def test_mmr_heuristic_on_trees_matches_oracle(seed):
    g = build_random_tree(seed, 4 + seed % 3)
    service, oracle = ExtractedTreeService(g), Oracle(g)
    for budget in budget_sweep(g, 3):
        report = evaluate(g, service.mmr_heuristic(budget))
        assert report.storage_total <= budget
        assert report.retrieval_max == oracle.objective(ProblemKind.MMR, budget)


def test_random_tree_nine_is_extracted_whole():
    g = build_random_tree(9, 4)
    extracted = extract_bidirectional_tree(g, 0)
    assert extracted.tree.graph.edge_tuples() == g.edge_tuples()
    service, oracle = ExtractedTreeService(g), Oracle(g)
    for budget in budget_sweep(g, 3):
        report = evaluate(g, service.mmr_heuristic(budget))
        assert report.storage_total <= budget
        assert report.retrieval_max == oracle.objective(ProblemKind.MMR, budget)
