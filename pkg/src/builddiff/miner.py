"""Walk a git history and extract build changes from every modified pom.xml."""
from __future__ import annotations

import json
import logging
import subprocess
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable, Iterable, Optional, Union

from .changedb import NULL_COMMIT, ChangeRecord, dumps_record
from .classifier import diff_trees
from .differ import MatcherConfig
from .pom import PomError, parse_pom

__all__ = ["NotARepository", "Commit", "MiningSummary", "GitRepo", "mine", "mine_to_file"]

log = logging.getLogger(__name__)

POM_NAME = "pom.xml"


class NotARepository(Exception):
    pass


@dataclass(frozen=True)
class Commit:
    sha: str
    parents: tuple[str, ...]
    author_time: int
    committer_time: int

    @property
    def is_merge(self) -> bool:
        return len(self.parents) > 1


@dataclass
class MiningSummary:
    commits_total: int = 0
    commits_with_build_change: int = 0
    commits_without: int = 0
    changes_total: int = 0
    merges_skipped: int = 0
    malformed_files: int = 0

    @property
    def bcc_ratio(self) -> float:
        return self.commits_with_build_change / self.commits_total if self.commits_total else 0.0

    def to_dict(self) -> dict:
        return asdict(self)


class GitRepo:
    """Thin wrapper over the git command line."""

    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)
        try:
            out = self._run("rev-parse", "--git-dir")
        except (subprocess.CalledProcessError, FileNotFoundError, NotADirectoryError) as exc:
            raise NotARepository(str(path)) from exc
        if not out.strip():
            raise NotARepository(str(path))
        self._batch: Optional[subprocess.Popen] = None
        self._lock = threading.Lock()

    def _run(self, *args: str) -> str:
        return subprocess.run(["git", "-C", str(self.path), *args], check=True,
                              capture_output=True, text=True).stdout

    def commits(self) -> list[Commit]:
        """All commits reachable from any ref, parents before children."""
        try:
            out = self._run("log", "--all", "--topo-order", "--reverse",
                            "--format=%H %at %ct %P")
        except subprocess.CalledProcessError:
            return []  # no commits yet
        commits = []
        for line in out.splitlines():
            parts = line.split()
            if parts:
                commits.append(Commit(parts[0], tuple(parts[3:]), int(parts[1]), int(parts[2])))
        return commits

    def pom_paths(self, sha: str) -> list[str]:
        out = self._run("ls-tree", "-r", "--name-only", "-z", sha)
        return sorted(p for p in out.split("\0") if p and p.rsplit("/", 1)[-1] == POM_NAME)

    def modified_poms(self, parent: str, sha: str) -> list[str]:
        """Pom files present in both commits whose content differs (no rename detection)."""
        out = self._run("diff-tree", "-r", "--no-renames", "--name-status", "-z", parent, sha)
        fields = [f for f in out.split("\0") if f]
        paths = []
        for status, path in zip(fields[::2], fields[1::2]):
            if status == "M" and path.rsplit("/", 1)[-1] == POM_NAME:
                paths.append(path)
        return sorted(paths)

    def read_blob(self, sha: str, path: str) -> bytes:
        with self._lock:
            if self._batch is None:
                self._batch = subprocess.Popen(
                    ["git", "-C", str(self.path), "cat-file", "--batch"],
                    stdin=subprocess.PIPE, stdout=subprocess.PIPE)
            assert self._batch.stdin and self._batch.stdout
            self._batch.stdin.write(f"{sha}:{path}\n".encode())
            self._batch.stdin.flush()
            header = self._batch.stdout.readline().split()
            if len(header) < 3 or header[1] != b"blob":
                raise KeyError(f"{sha}:{path}")
            size = int(header[2])
            data = self._batch.stdout.read(size)
            self._batch.stdout.read(1)
            return data

    def close(self) -> None:
        if self._batch is not None:
            assert self._batch.stdin
            self._batch.stdin.close()
            self._batch.wait()
            self._batch = None

    def __enter__(self) -> GitRepo:
        return self

    def __exit__(self, *exc) -> None:
        self.close()


@dataclass
class _CommitResult:
    records: list[ChangeRecord]
    malformed: int


def _process_commit(repo: GitRepo, commit: Commit, cfg: MatcherConfig,
                    include_initial: bool, use_committer_time: bool) -> _CommitResult:
    stamp = commit.committer_time if use_committer_time else commit.author_time
    records: list[ChangeRecord] = []
    malformed = 0
    if not commit.parents:
        if not include_initial:
            return _CommitResult(records, 0)
        jobs = [(None, path) for path in repo.pom_paths(commit.sha)]
        parent = NULL_COMMIT
    else:
        parent = commit.parents[0]
        jobs = [(parent, path) for path in repo.modified_poms(parent, commit.sha)]
    for old_sha, path in jobs:
        try:
            old = None if old_sha is None else parse_pom(repo.read_blob(old_sha, path),
                                                         f"{old_sha}:{path}")
            new = parse_pom(repo.read_blob(commit.sha, path), f"{commit.sha}:{path}")
        except PomError as exc:
            log.warning("skipping %s in %s: %s", path, commit.sha, exc)
            malformed += 1
            continue
        for change in diff_trees(old, new, cfg):
            records.append(ChangeRecord.from_change(
                change, commit=commit.sha, parent=parent, timestamp=stamp,
                file_path=path, initial=old_sha is None))
    return _CommitResult(records, malformed)


def mine(repo_path: Union[str, Path], cfg: MatcherConfig = MatcherConfig(),
         sink: Optional[Callable[[ChangeRecord], None]] = None, *,
         include_initial: bool = False, use_committer_time: bool = False,
         workers: int = 1) -> MiningSummary:
    """Mine every non-merge commit reachable from any ref.

    Records go to ``sink`` in topological commit order, whatever ``workers``
    is.  Root commits are diffed against an empty tree only when
    ``include_initial`` is set; their records carry ``initial=True``.
    """
    summary = MiningSummary()
    with GitRepo(repo_path) as repo:
        commits = repo.commits()
        todo = [c for c in commits if not c.is_merge]
        summary.commits_total = len(commits)
        summary.merges_skipped = len(commits) - len(todo)

        def work(c: Commit) -> _CommitResult:
            return _process_commit(repo, c, cfg, include_initial, use_committer_time)

        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results: Iterable[_CommitResult] = list(pool.map(work, todo))
        else:
            results = map(work, todo)
        for result in results:
            summary.malformed_files += result.malformed
            if result.records:
                summary.commits_with_build_change += 1
            else:
                summary.commits_without += 1
            summary.changes_total += len(result.records)
            if sink is not None:
                for rec in result.records:
                    sink(rec)
    return summary


def mine_to_file(repo_path: Union[str, Path], out: Union[str, Path],
                 cfg: MatcherConfig = MatcherConfig(), *, summary_path: Union[str, Path, None] = None,
                 **kwargs) -> MiningSummary:
    """Mine into a JSONL ChangeDB and write the summary next to it."""
    out = Path(out)
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        summary = mine(repo_path, cfg, lambda rec: fh.write(dumps_record(rec) + "\n"), **kwargs)
    target = Path(summary_path) if summary_path else out.with_name("summary.json")
    target.write_text(json.dumps(summary.to_dict(), indent=2) + "\n", encoding="utf-8")
    return summary

