import json

import pandas as pd
import pytest

from main import App
from utils.file_helpers import load_edge_list, load_solution

FIG4 = "node 0 1000\nnode 1 10\nnode 2 100\nedge 0 1 9 9\nedge 1 2 90 90\n"
TWO = "node 0 10\nnode 1 8\nedge 0 1 3 2\nedge 1 0 4 1\n"


@pytest.fixture
def graphs(write_text):
    return {"fig4": write_text("fig4.el", FIG4), "two": write_text("two.el", TWO)}


def run(*argv) -> int:
    return App().run([str(a) for a in argv])


def solve_row(capsys) -> dict:
    header, values = capsys.readouterr().out.strip().splitlines()
    return dict(zip(header.split(","), values.split(",")))


def test_solve_msr_with_oracle(graphs, capsys, tmp_path):
    out = tmp_path / "sol.txt"
    code = run("solve", "--graph", graphs["fig4"], "--problem", "msr", "--algo", "oracle",
               "--bound", 1109, "--out", out)
    assert code == 0
    row = solve_row(capsys)
    assert (row["objective"], row["storage"], row["retrieval_max"]) == ("9", "1109", "9")
    assert load_solution(out, 3).materialized == {0, 2}


def test_solve_bmr_on_tree_with_details(graphs, capsys, tmp_path):
    details = tmp_path / "bmr.csv"
    code = run("solve", "--graph", graphs["two"], "--problem", "bmr", "--algo", "dp-tree",
               "--bound", 1, "--details", details)
    assert code == 0
    assert solve_row(capsys)["objective"] == "12"
    assert list(pd.read_csv(details).columns) == ["v", "u", "dp"]


def test_solve_writes_greedy_trace(graphs, capsys, tmp_path):
    details = tmp_path / "trace.csv"
    assert run("solve", "--graph", graphs["fig4"], "--problem", "msr", "--algo", "lmg",
               "--bound", 1109, "--details", details) == 0
    assert solve_row(capsys)["objective"] == "90"
    trace = pd.read_csv(details)
    assert trace.loc[0, "move_kind"] == "materialize"
    assert (trace.loc[0, "rho_num"], trace.loc[0, "rho_den"]) == (18, 1)


def test_infeasible_exits_with_two(graphs, capsys):
    assert run("solve", "--graph", graphs["fig4"], "--problem", "msr", "--algo", "oracle", "--bound", 1000) == 2
    assert "erro" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        ["solve", "--problem", "msr", "--algo", "oracle", "--bound", "1"],
        ["solve", "--graph", "x.el", "--problem", "xyz", "--algo", "oracle", "--bound", "1"],
        ["solve", "--graph", "missing.el", "--problem", "msr", "--algo", "oracle", "--bound", "1"],
        ["frobnicate"],
    ],
)
def test_usage_and_input_errors_exit_with_one(argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert App().run(argv) == 1


def test_unsupported_pair_and_too_large_oracle(graphs, write_text):
    assert run("solve", "--graph", graphs["fig4"], "--problem", "msr", "--algo", "mp", "--bound", 1) == 1
    big = write_text("big.el", "".join(f"node {v} 1\n" for v in range(9)))
    assert run("solve", "--graph", big, "--problem", "msr", "--algo", "oracle", "--bound", 9) == 1


def test_mp_variant_and_seed_flags(graphs, capsys):
    assert run("solve", "--graph", graphs["fig4"], "--problem", "bmr", "--algo", "mp",
               "--bound", 99, "--mp-variant", "prim") == 0
    assert int(solve_row(capsys)["retrieval_max"]) <= 99
    assert run("solve", "--graph", graphs["fig4"], "--problem", "bmr", "--algo", "mp",
               "--bound", 99, "--mp-variant", "kruskal") == 1
    assert run("solve", "--graph", graphs["two"], "--problem", "msr", "--algo", "dp-extracted",
               "--bound", 13, "--seed", 3) == 0


def test_bad_epsilon_is_an_input_error(graphs):
    assert run("solve", "--graph", graphs["two"], "--problem", "msr", "--algo", "dp-tree",
               "--bound", 13, "--epsilon", "-1/2") == 1


def test_bench_to_csv(graphs, tmp_path):
    out = tmp_path / "bench.csv"
    code = run("bench", "--graph", graphs["fig4"], "--problem", "msr", "--algos", "lmg,oracle",
               "--bounds", "1098:1109:2", "--out", out)
    assert code == 0
    df = pd.read_csv(out)
    assert list(df.columns) == ["algo", "dataset", "budget", "objective", "runtime_ms", "status"]
    assert list(df["status"]) == ["infeasible", "ok", "infeasible", "ok"]
    assert set(df["dataset"]) == {"fig4.el"}
    assert df.loc[3, "objective"] == 9


def test_bench_rejects_unknown_algorithm(graphs):
    assert run("bench", "--graph", graphs["fig4"], "--problem", "msr", "--algos", "magic",
               "--bounds", "1:2:2") == 1


def test_ingest(write_text, tmp_path):
    dump = {
        "commits": [{"id": "a", "bytes": 10, "parents": []}, {"id": "b", "bytes": 12, "parents": ["a"]}],
        "deltas": [{"from": "a", "to": "b", "bytes": 3}, {"from": "b", "to": "a", "bytes": 4}],
    }
    out = tmp_path / "repo.el"
    assert run("ingest", "--dump", write_text("dump.json", json.dumps(dump)), "--out", out) == 0
    g = load_edge_list(out)
    assert g.node_costs == (10, 12)
    assert g.delta(1, 0).key() == (4, 4)


def test_transform_is_deterministic(graphs, tmp_path):
    first, second = tmp_path / "a.el", tmp_path / "b.el"
    assert run("transform", "--compress", "--seed", 3, graphs["fig4"], first) == 0
    assert run("transform", "--compress", "--seed", 3, graphs["fig4"], second) == 0
    assert first.read_text() == second.read_text()
    assert run("transform", "--er", "1", "--seed", 3, graphs["fig4"], first) == 0
    assert len(load_edge_list(first).deltas) == 6
    assert run("transform", "--er", "3/2", "--seed", 3, graphs["fig4"], first) == 1


def test_stats_prints_one_row(graphs, capsys):
    assert run("stats", "--graph", graphs["two"]) == 0
    header, values = capsys.readouterr().out.strip().splitlines()
    assert header == "nodes,edges,avg_node_cost,avg_edge_cost"
    assert values == "2,2,9,4"


def test_export_ilp(graphs, tmp_path):
    out = tmp_path / "fig4.lp"
    assert run("export-ilp", "--graph", graphs["fig4"], "--budget", 1109, "--out", out) == 0
    assert "Subject To" in out.read_text()
