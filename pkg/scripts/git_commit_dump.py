"""
Gera o dump de commits (JSON) de um repositório git local.

Tamanho de um commit: soma dos blobs da árvore (`git ls-tree -r -l`).
Delta entre pai e filho: bytes da saída de `git diff --binary <origem> <destino>`,
calculado nos dois sentidos.

Uso:
    python scripts/git_commit_dump.py <repo> <saida.json> [--rev HEAD]
"""
import argparse
import logging
import subprocess
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from features.datasets.service import Commit, CommitDelta, CommitDump  # noqa: E402

logger = logging.getLogger(__name__)


def _git(repo: Path, *args: str) -> bytes:
    return subprocess.run(["git", "-C", str(repo), *args], check=True, capture_output=True).stdout


def commit_size(repo: Path, sha: str) -> int:
    total = 0
    for line in _git(repo, "ls-tree", "-r", "-l", sha).decode("utf-8", "replace").splitlines():
        size = line.split()[3]
        if size.isdigit():
            total += int(size)
    return total


def diff_size(repo: Path, source: str, target: str) -> int:
    return len(_git(repo, "diff", "--binary", source, target))


def build_dump(repo: Path, rev: str = "HEAD") -> CommitDump:
    listing = _git(repo, "rev-list", "--topo-order", "--reverse", "--parents", rev).decode().split("\n")
    commits, deltas = [], []
    for line in filter(None, listing):
        sha, *parents = line.split()
        commits.append(Commit(id=sha, bytes=commit_size(repo, sha), parents=parents))
        for parent in parents:
            deltas.append(CommitDelta(source=parent, to=sha, bytes=diff_size(repo, parent, sha)))
            deltas.append(CommitDelta(source=sha, to=parent, bytes=diff_size(repo, sha, parent)))
        logger.debug("commit %s: %d pais", sha[:10], len(parents))
    return CommitDump(commits=commits, deltas=deltas)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("repo", type=Path)
    parser.add_argument("output", type=Path)
    parser.add_argument("--rev", default="HEAD")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO)

    try:
        dump = build_dump(args.repo, args.rev)
    except subprocess.CalledProcessError as exc:
        print(f"erro: git falhou: {exc.stderr.decode(errors='replace').strip()}", file=sys.stderr)
        return 1
    args.output.write_text(dump.model_dump_json(by_alias=True, indent=2), encoding="utf-8")
    logger.info("%d commits e %d deltas gravados em %s", len(dump.commits), len(dump.deltas), args.output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
