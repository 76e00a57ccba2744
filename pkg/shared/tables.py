"""Tabelas de saída (CSV ou Excel) montadas com pandas."""
from __future__ import annotations

import pandas as pd

RESULT_COLUMNS = ["algo", "dataset", "budget", "objective", "runtime_ms", "status"]
TRACE_COLUMNS = ["iter", "move_kind", "target", "rho_num", "rho_den", "storage", "retrieval_sum"]
FRONTIER_COLUMNS = ["storage", "retrieval_sum"]
BMR_DUMP_COLUMNS = ["v", "u", "dp"]
MSR_DUMP_COLUMNS = ["v", "k", "gamma", "rho", "sigma"]
STATS_COLUMNS = ["nodes", "edges", "avg_node_cost", "avg_edge_cost"]
SOLVE_COLUMNS = ["objective", "storage", "retrieval_sum", "retrieval_max", "runtime_ms"]


def frame(rows: list[dict], columns: list[str]) -> pd.DataFrame:
    return pd.DataFrame(rows, columns=columns)


def trace_frame(trace) -> pd.DataFrame:
    return frame(trace.rows(), TRACE_COLUMNS)


def frontier_frame(frontier) -> pd.DataFrame:
    return frame(frontier.rows(), FRONTIER_COLUMNS)


def bmr_table_frame(table) -> pd.DataFrame:
    return frame(table.rows(), BMR_DUMP_COLUMNS)


def msr_table_frame(table) -> pd.DataFrame:
    return frame(table.rows(), MSR_DUMP_COLUMNS)


def stats_frame(stats) -> pd.DataFrame:
    return frame([stats.row()], STATS_COLUMNS)


def results_frame(rows: list[dict]) -> pd.DataFrame:
    df = frame(rows, RESULT_COLUMNS)
    # Objetivo vazio nas células inviáveis
    df["objective"] = df["objective"].astype("Int64")
    return df


def export_table(df: pd.DataFrame, output_path: str | None = None) -> str:
    """
    Exporta a tabela sem índice.

    Args:
        output_path: arquivo de saída; `.xlsx` grava Excel, o resto CSV UTF-8.
            Sem caminho, devolve o CSV como texto.

    Returns:
        O texto CSV, ou o caminho gravado.
    """
    if output_path is None:
        return df.to_csv(index=False, lineterminator="\n")
    if str(output_path).endswith(".xlsx"):
        df.to_excel(output_path, index=False)
    else:
        df.to_csv(output_path, index=False, encoding="utf-8", lineterminator="\n")
    return str(output_path)
