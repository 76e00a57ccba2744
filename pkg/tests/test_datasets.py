import json
import math
import random
from fractions import Fraction

import pytest

from core.exceptions import CyclicHistory, InputError, MissingDelta, UnknownNode
from core.version_graph import VersionGraph
from features.datasets.service import (
    Commit,
    CommitDelta,
    CommitDump,
    DatasetService,
    load_commit_dump,
    round_half_up,
)
from tests.conftest import build_random_connected


def chain_dump(**overrides) -> CommitDump:
    data = {
        "commits": [
            {"id": "a1", "bytes": 100, "parents": []},
            {"id": "b2", "bytes": 120, "parents": ["a1"]},
            {"id": "c3", "bytes": 130, "parents": ["b2"]},
        ],
        "deltas": [
            {"from": "a1", "to": "b2", "bytes": 5},
            {"from": "b2", "to": "a1", "bytes": 7},
            {"from": "b2", "to": "c3", "bytes": 9},
            {"from": "c3", "to": "b2", "bytes": 11},
        ],
    }
    data.update(overrides)
    return CommitDump.model_validate(data)


# --- HISTÓRICO GIT ---

def test_ingest_builds_both_directions():
    g = DatasetService().ingest_git(chain_dump())
    assert g.node_costs == (100, 120, 130)
    assert len(g.deltas) == 4
    assert g.delta(0, 1).key() == (5, 5)
    assert g.delta(1, 0).key() == (7, 7)
    assert g.delta(2, 1).key() == (11, 11)
    assert not g.has_edge(0, 2)


def test_merge_commit_gets_edges_to_every_parent():
    dump = CommitDump(
        commits=[
            Commit(id="root", bytes=10),
            Commit(id="left", bytes=11, parents=["root"]),
            Commit(id="right", bytes=12, parents=["root"]),
            Commit(id="merge", bytes=13, parents=["left", "right"]),
        ],
        deltas=[
            CommitDelta(source=u, to=v, bytes=1)
            for a, b in (("root", "left"), ("root", "right"), ("left", "merge"), ("right", "merge"))
            for u, v in ((a, b), (b, a))
        ],
    )
    g = DatasetService().ingest_git(dump)
    assert g.undirected_pairs() == {(0, 1), (0, 2), (1, 3), (2, 3)}


def test_missing_reverse_delta_is_an_error():
    dump = chain_dump(deltas=[
        {"from": "a1", "to": "b2", "bytes": 5},
        {"from": "b2", "to": "a1", "bytes": 7},
        {"from": "b2", "to": "c3", "bytes": 9},
    ])
    with pytest.raises(MissingDelta, match="c3"):
        DatasetService().ingest_git(dump)


def test_unknown_parent_and_delta_endpoint():
    dump = chain_dump(commits=[{"id": "a1", "bytes": 1, "parents": ["zz"]}], deltas=[])
    with pytest.raises(UnknownNode) as err:
        DatasetService().ingest_git(dump)
    assert err.value.node == "zz"

    dump = chain_dump(deltas=[{"from": "a1", "to": "nope", "bytes": 1}])
    with pytest.raises(UnknownNode):
        DatasetService().ingest_git(dump)


def test_cyclic_history_is_rejected():
    dump = chain_dump(commits=[
        {"id": "a1", "bytes": 1, "parents": ["c3"]},
        {"id": "b2", "bytes": 1, "parents": ["a1"]},
        {"id": "c3", "bytes": 1, "parents": ["b2"]},
    ])
    with pytest.raises(CyclicHistory):
        DatasetService().ingest_git(dump)


def test_repeated_commit_is_rejected():
    dump = chain_dump(commits=[{"id": "a1", "bytes": 1}, {"id": "a1", "bytes": 2}], deltas=[])
    with pytest.raises(InputError, match="a1"):
        DatasetService().ingest_git(dump)


def test_load_commit_dump_reads_from_alias(write_text):
    path = write_text("dump.json", json.dumps(chain_dump().model_dump(by_alias=True)))
    dump = load_commit_dump(path)
    assert dump.deltas[0].source == "a1"
    assert DatasetService().ingest_git(dump).n == 3


@pytest.mark.parametrize("content", ["{not json", json.dumps({"commits": [{"id": "x", "bytes": -1}]})])
def test_load_commit_dump_rejects_bad_files(write_text, content):
    with pytest.raises(InputError):
        load_commit_dump(write_text("bad.json", content))


# --- COMPRESSÃO ---

@pytest.mark.parametrize("seed", range(5))
def test_compression_stays_within_bounds(seed):
    g = build_random_connected(seed, 8)
    compressed = DatasetService().random_compression(g, seed)
    assert compressed.node_costs == g.node_costs
    assert set(compressed.deltas) == set(g.deltas)
    for pair, d in g.deltas.items():
        new = compressed.deltas[pair]
        assert math.ceil(Fraction(3, 10) * d.storage) <= new.storage <= d.storage
        assert new.retrieval == round_half_up(Fraction(6, 5) * d.retrieval)


def test_compression_is_deterministic():
    g = build_random_connected(3, 8)
    service = DatasetService()
    first = service.random_compression(g, 42)
    assert first.edge_tuples() == service.random_compression(g, 42).edge_tuples()


def test_compression_draws_one_uniform_per_edge_in_pair_order():
    g = build_random_connected(5, 6)
    rng = random.Random(11)
    expected = []
    for (u, v), d in sorted(g.deltas.items()):
        factor = Fraction(rng.uniform(0.3, 1.0))
        storage = min(d.storage, max(math.ceil(Fraction(3, 10) * d.storage), round_half_up(d.storage * factor)))
        expected.append((u, v, storage))
    compressed = DatasetService().random_compression(g, 11)
    assert [(u, v, s) for u, v, s, _ in compressed.edge_tuples()] == expected


def test_round_half_up():
    assert [round_half_up(x) for x in (0, 2.5, 3.5, 4.4)] == [0, 3, 4, 4]


# --- ER ---

def test_er_complete_graph_has_every_pair():
    g = DatasetService().er_construction([1000] * 246, 1.0, seed=7)
    assert len(g.deltas) == 60270


def test_er_empty_and_reproducible():
    service = DatasetService()
    assert len(service.er_construction([50] * 20, 0.0, seed=1).deltas) == 0
    first = service.er_construction([50] * 20, 0.3, seed=9)
    assert first.edge_tuples() == service.er_construction([50] * 20, 0.3, seed=9).edge_tuples()
    assert all(1 <= s == r <= 5 for _, _, s, r in first.edge_tuples())


def test_er_uses_custom_delta_model():
    g = DatasetService().er_construction([5, 5, 5], 1.0, seed=0, delta_model=lambda u, v, rng: (u + 1, v))
    assert g.delta(2, 0).key() == (3, 0)
    assert g.delta(0, 2).key() == (1, 2)


def test_er_draw_order_follows_pairs():
    calls = []

    def model(u, v, rng):
        calls.append((u, v))
        return 1, 1

    DatasetService().er_construction([5, 5, 5], 1.0, seed=0, delta_model=model)
    assert calls == [(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)]


def test_er_replays_with_python_generator():
    rng = random.Random(4)
    expected = set()
    for i in range(6):
        for j in range(i + 1, 6):
            if rng.random() < 0.5:
                forward = rng.randint(1, 5)
                backward = rng.randint(1, 5)
                expected |= {(i, j, forward, forward), (j, i, backward, backward)}
    g = DatasetService().er_construction([50] * 6, 0.5, seed=4)
    assert set(g.edge_tuples()) == expected


def test_er_rejects_bad_probability():
    with pytest.raises(ValueError):
        DatasetService().er_construction([1, 1], 1.5, seed=0)


# --- ESTATÍSTICAS ---

def test_stats(two_node):
    stats = DatasetService().stats(two_node)
    assert stats.row() == {"nodes": 2, "edges": 2, "avg_node_cost": 9, "avg_edge_cost": 4}


def test_stats_of_graph_without_edges():
    stats = DatasetService().stats(VersionGraph.from_edges([3, 4], []))
    assert (stats.edges, stats.avg_node_cost, stats.avg_edge_cost) == (0, 4, 0)
