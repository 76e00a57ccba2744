"""
main.py - verstore (linha de comando)
"""

import argparse
import logging
import sys
from pathlib import Path

from config.settings import settings
from core.exceptions import InputError, VerstoreError
from core.version_graph import ProblemKind
from features.benchmark.dispatch import ALGORITHMS, SolveOptions, run_solver
from features.benchmark.service import BenchmarkService, parse_bounds
from features.datasets.service import DatasetService, load_commit_dump
from features.extracted.service import Frontier
from features.greedy.service import MP_VARIANTS, GreedyTrace
from features.ilp_export.service import export_ilp
from features.tree_dp.service import BmrTable, MsrTable
from shared.rationals import parse_positive, parse_rational
from shared.tables import (
    SOLVE_COLUMNS,
    bmr_table_frame,
    export_table,
    frame,
    frontier_frame,
    msr_table_frame,
    results_frame,
    stats_frame,
    trace_frame,
)
from utils.file_helpers import load_decomposition, load_edge_list, save_edge_list, save_solution

logger = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    """Erros de uso viram InputError (código 1), não o código 2 do argparse."""

    def error(self, message):
        raise InputError(message)


class App:
    """Aplicação principal - monta o parser e despacha os subcomandos."""

    def __init__(self):
        self.datasets = DatasetService()
        self.parser = self._build_parser()

    # --- Parser ---

    def _build_parser(self) -> argparse.ArgumentParser:
        parser = _Parser(prog="verstore", description="Armazenamento de versões com custo mínimo.")
        parser.add_argument("--log-level", default=settings.LOG_LEVEL)
        commands = parser.add_subparsers(dest="command", required=True)

        def solver_flags(p):
            p.add_argument("--graph", required=True)
            p.add_argument("--problem", required=True, choices=[k.value for k in ProblemKind])
            p.add_argument("--epsilon", default=settings.EPSILON)
            p.add_argument("--prune")
            p.add_argument("--root", type=int)
            p.add_argument("--seed", type=int)
            p.add_argument("--mp-variant", default="prim", choices=MP_VARIANTS)
            p.add_argument("--decomposition")

        solve = commands.add_parser("solve")
        solver_flags(solve)
        solve.add_argument("--algo", required=True, choices=ALGORITHMS)
        solve.add_argument("--bound", required=True, type=int)
        solve.add_argument("--out")
        solve.add_argument("--details")
        solve.set_defaults(handler=self._cmd_solve)

        bench = commands.add_parser("bench")
        solver_flags(bench)
        bench.add_argument("--algos", required=True)
        bench.add_argument("--bounds", required=True)
        bench.add_argument("--jobs", type=int, default=settings.JOBS)
        bench.add_argument("--out")
        bench.set_defaults(handler=self._cmd_bench)

        ingest = commands.add_parser("ingest")
        ingest.add_argument("--dump", required=True)
        ingest.add_argument("--out", required=True)
        ingest.set_defaults(handler=self._cmd_ingest)

        transform = commands.add_parser("transform")
        mode = transform.add_mutually_exclusive_group(required=True)
        mode.add_argument("--compress", action="store_true")
        mode.add_argument("--er")
        transform.add_argument("--seed", type=int, required=True)
        transform.add_argument("input")
        transform.add_argument("output")
        transform.set_defaults(handler=self._cmd_transform)

        ilp = commands.add_parser("export-ilp")
        ilp.add_argument("--graph", required=True)
        ilp.add_argument("--budget", required=True, type=int)
        ilp.add_argument("--out", required=True)
        ilp.set_defaults(handler=self._cmd_export_ilp)

        stats = commands.add_parser("stats")
        stats.add_argument("--graph", required=True)
        stats.add_argument("--out")
        stats.set_defaults(handler=self._cmd_stats)
        return parser

    def _options(self, args) -> SolveOptions:
        epsilon = None if args.epsilon in (None, "", "exact") else parse_positive(args.epsilon)
        prune = None if args.prune is None else parse_positive(args.prune, allow_infinite=True)
        decomposition = load_decomposition(args.decomposition) if args.decomposition else None
        return SolveOptions(epsilon, prune, args.root, decomposition, args.seed, args.mp_variant)

    @staticmethod
    def _emit(df, path=None):
        text = export_table(df, path)
        if path is None:
            sys.stdout.write(text)

    # --- Subcomandos ---

    def _cmd_solve(self, args) -> int:
        g = load_edge_list(args.graph)
        outcome = run_solver(g, ProblemKind(args.problem), args.algo, args.bound, self._options(args))
        self._emit(frame([outcome.row()], SOLVE_COLUMNS))
        if args.out:
            save_solution(outcome.solution, args.out)
        if args.details:
            self._write_details(outcome.details, args.details)
        return 0

    def _write_details(self, details, path: str) -> None:
        if isinstance(details, GreedyTrace):
            df = trace_frame(details)
        elif isinstance(details, Frontier):
            df = frontier_frame(details)
        elif isinstance(details, BmrTable):
            df = bmr_table_frame(details)
        elif isinstance(details, MsrTable):
            df = msr_table_frame(details)
        else:
            logger.warning("o algoritmo escolhido não produz detalhes; %s não foi gravado", path)
            return
        export_table(df, path)

    def _cmd_bench(self, args) -> int:
        g = load_edge_list(args.graph)
        algos = [a.strip() for a in args.algos.split(",") if a.strip()]
        unknown = [a for a in algos if a not in ALGORITHMS]
        if unknown:
            raise InputError(f"algoritmos desconhecidos: {', '.join(unknown)}")
        service = BenchmarkService(g, dataset=Path(args.graph).name, jobs=args.jobs)
        rows = service.sweep(ProblemKind(args.problem), algos, parse_bounds(args.bounds), self._options(args))
        self._emit(results_frame(rows), args.out)
        return 0

    def _cmd_ingest(self, args) -> int:
        g = self.datasets.ingest_git(load_commit_dump(args.dump))
        save_edge_list(g, args.out)
        return 0

    def _cmd_transform(self, args) -> int:
        g = load_edge_list(args.input)
        if args.compress:
            result = self.datasets.random_compression(g, args.seed)
        else:
            p = parse_rational(args.er)
            if not 0 <= p <= 1:
                raise InputError(f"p deve estar entre 0 e 1: {args.er}")
            result = self.datasets.er_construction(list(g.node_costs), float(p), args.seed)
        save_edge_list(result, args.output)
        return 0

    def _cmd_export_ilp(self, args) -> int:
        export_ilp(load_edge_list(args.graph), args.budget, args.out)
        return 0

    def _cmd_stats(self, args) -> int:
        self._emit(stats_frame(self.datasets.stats(load_edge_list(args.graph))), args.out)
        return 0

    # --- Execução ---

    def run(self, argv=None) -> int:
        try:
            args = self.parser.parse_args(argv)
            logging.basicConfig(level=args.log_level.upper(), stream=sys.stderr,
                                format="%(levelname)s %(name)s: %(message)s")
            return args.handler(args)
        except VerstoreError as exc:
            print(f"erro: {exc}", file=sys.stderr)
            return exc.exit_code
        except (ValueError, OSError) as exc:
            print(f"erro: {exc}", file=sys.stderr)
            return 1


def main(argv=None) -> int:
    return App().run(argv)


if __name__ == "__main__":
    sys.exit(main())
