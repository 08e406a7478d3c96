"""ChangeDB: classified changes joined with commit metadata, as JSON Lines."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Iterator, Optional, Union

from .classifier import BuildChange

__all__ = ["FIELDS", "NULL_COMMIT", "ChangeRecord", "read_changedb", "write_changedb",
           "dumps_record"]

FIELDS = ("commit", "parent", "timestamp", "file_path", "change_type", "category",
          "node_path", "old_value", "new_value", "initial")

# parent of a root commit
NULL_COMMIT = "0" * 40


@dataclass(frozen=True)
class ChangeRecord:
    commit: str
    parent: str
    timestamp: int
    file_path: str
    change_type: str
    category: str
    node_path: str
    old_value: Optional[str] = None
    new_value: Optional[str] = None
    initial: bool = False

    def __post_init__(self) -> None:
        if not self.file_path.endswith("pom.xml"):
            raise ValueError(f"not a pom path: {self.file_path}")
        if self.timestamp <= 0:
            raise ValueError("timestamp must be positive")
        if self.commit == self.parent:
            raise ValueError("commit and parent must differ")

    @classmethod
    def from_change(cls, change: BuildChange, *, commit: str, parent: str, timestamp: int,
                    file_path: str, initial: bool = False) -> ChangeRecord:
        return cls(commit, parent, timestamp, file_path, change.name, change.category,
                   change.node_path, change.old_value, change.new_value, initial)

    def to_dict(self) -> dict:
        # all fields are scalars, so no deep copy is needed
        return {name: getattr(self, name) for name in FIELDS}


def dumps_record(record: ChangeRecord) -> str:
    return json.dumps(record.to_dict(), ensure_ascii=False)


def write_changedb(records: Iterable[ChangeRecord], out: Union[str, Path, IO[str]]) -> int:
    if isinstance(out, (str, Path)):
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            return write_changedb(records, fh)
    n = 0
    for rec in records:
        out.write(dumps_record(rec) + "\n")
        n += 1
    return n


def iter_changedb(path: Union[str, Path]) -> Iterator[ChangeRecord]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
                yield ChangeRecord(**{k: data[k] for k in FIELDS if k in data})
            except (ValueError, TypeError, KeyError) as exc:
                raise ValueError(f"{path}:{lineno}: bad record: {exc}") from exc


def read_changedb(path: Union[str, Path]) -> list[ChangeRecord]:
    return list(iter_changedb(path))
