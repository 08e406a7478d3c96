"""Map edit scripts onto taxonomy change types and score extractions."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from .differ import (
    EditKind,
    EditOperation,
    MatcherConfig,
    edit_script,
    match_trees,
)
from .pom import BuildNode, BuildTree, normalize, parse_pom
from .taxonomy import (
    IDENTIFIER_TAGS,
    ChangeType,
    PathRule,
    canonical_path,
    is_transparent,
    rule_for,
    taxonomy_index,
    type_for,
    unknown_type,
)

__all__ = [
    "BuildChange",
    "UnsortedScript",
    "classify",
    "diff_trees",
    "diff_documents",
    "EvaluationReport",
    "evaluate",
]


class UnsortedScript(ValueError):
    """The edit script is not in top-down (depth ascending) order."""


@dataclass(frozen=True)
class BuildChange:
    change_type: ChangeType
    node_path: str
    old_value: Optional[str] = None
    new_value: Optional[str] = None

    @property
    def name(self) -> str:
        return self.change_type.name

    @property
    def category(self) -> str:
        return self.change_type.category.value

    def key(self) -> tuple:
        return self.change_type.name, self.node_path, self.old_value, self.new_value

    def to_dict(self) -> dict:
        return {
            "change_type": self.change_type.name,
            "category": self.category,
            "node_path": self.node_path,
            "old_value": self.old_value,
            "new_value": self.new_value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> BuildChange:
        return cls(taxonomy_index()[data["change_type"]], data["node_path"],
                   data.get("old_value"), data.get("new_value"))

    def __str__(self) -> str:
        return f"{self.name} {self.node_path} {self.old_value} -> {self.new_value}"


def _render(node: Optional[BuildNode]) -> Optional[str]:
    if node is None:
        return None
    if node.children:
        return node.canonical()
    return node.value


def _resolve(node: BuildNode, kind: EditKind) -> Union[ChangeType, None]:
    """Type for an edit on ``node``; None when the node is a bare wrapper."""
    path = canonical_path(node.path)
    rule = rule_for(path)
    if is_transparent(path) and kind is not EditKind.UPDATE:
        return None
    if rule is not None:
        return type_for(rule, kind)
    for anc in node.ancestors():
        anc_rule = rule_for(canonical_path(anc.path))
        if anc_rule is not None:
            if anc_rule.absorbs:
                return type_for(anc_rule, EditKind.UPDATE)
            break
    return unknown_type(kind)


def _identified_parent(node: BuildNode) -> Optional[PathRule]:
    if node.tag not in IDENTIFIER_TAGS or node.parent is None:
        return None
    rule = rule_for(canonical_path(node.parent.path))
    return rule if rule is not None and rule.identified else None


def classify(script: list[EditOperation],
             cfg: Optional[MatcherConfig] = None) -> list[BuildChange]:
    """Turn a top-down edit script into build changes.

    Edits under an inserted (deleted) element are part of that insertion
    (deletion) and are skipped.  Each operation yields at most one change.
    ``cfg`` is accepted for interface symmetry; classification itself does
    not depend on the threshold.
    """
    last_depth = -1
    for op in script:
        if op.depth < last_depth:
            raise UnsortedScript(f"{op.kind.value} at depth {op.depth} after depth {last_depth}")
        last_depth = op.depth

    updated_old = {op.old_node for op in script if op.kind is EditKind.UPDATE}
    covered: set[BuildNode] = set()
    renamed: set[BuildNode] = set()
    changes: list[BuildChange] = []

    for op in script:
        node = op.node
        if op.kind is not EditKind.UPDATE:
            if node.parent is not None and node.parent in covered:
                covered.add(node)
                continue
        else:
            owner_rule = _identified_parent(node)
            if owner_rule is not None:
                owner = node.parent
                if owner in renamed:
                    continue
                siblings = [owner.child(t) for t in IDENTIFIER_TAGS]
                if all(s is not None and s in updated_old for s in siblings):
                    renamed.add(owner)
                    new_owner = op.new_node.parent
                    changes.append(BuildChange(type_for(owner_rule, EditKind.UPDATE), owner.path,
                                               _render(owner), _render(new_owner)))
                    continue

        ctype = _resolve(node, op.kind)
        if ctype is None:
            continue
        if op.kind is not EditKind.UPDATE:
            covered.add(node)
        old_value = _render(op.old_node)
        new_value = _render(op.new_node)
        if ctype.kind is EditKind.UPDATE:
            if op.kind is not EditKind.UPDATE and node.is_leaf and node.value is None:
                # an absorbed empty element still has to show up as a difference
                old_value, new_value = ((None, node.canonical()) if op.kind is EditKind.INSERT
                                        else (node.canonical(), None))
            old_value = old_value if old_value is not None else ""
            new_value = new_value if new_value is not None else ""
        changes.append(BuildChange(ctype, node.path, old_value, new_value))
    return changes


def diff_trees(old: Optional[BuildTree], new: Optional[BuildTree],
               cfg: MatcherConfig = MatcherConfig()) -> list[BuildChange]:
    """Full pipeline on parsed trees; ``None`` stands for a missing file."""
    old_n = normalize(old) if old is not None else None
    new_n = normalize(new) if new is not None else None
    mapping = match_trees(old_n, new_n, cfg)
    return classify(edit_script(old_n, new_n, mapping), cfg)


def diff_documents(old_text: Union[str, bytes, None], new_text: Union[str, bytes, None],
                   cfg: MatcherConfig = MatcherConfig()) -> list[BuildChange]:
    old = parse_pom(old_text, "old") if old_text is not None else None
    new = parse_pom(new_text, "new") if new_text is not None else None
    return diff_trees(old, new, cfg)


@dataclass
class EvaluationReport:
    precision: float
    recall: float
    found: int
    expected: int
    relevant: int
    per_type: dict[str, dict] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "found": self.found,
            "expected": self.expected,
            "relevant": self.relevant,
            "per_type": self.per_type,
        }


def _ratio(num: int, den: int, empty: float) -> float:
    return num / den if den else empty


def _scores(found: Counter, expected: Counter) -> tuple[float, float, int]:
    relevant = sum((found & expected).values())
    n_found = sum(found.values())
    n_expected = sum(expected.values())
    precision = _ratio(relevant, n_found, 1.0)
    recall = _ratio(relevant, n_expected, 1.0)
    return precision, recall, relevant


def _as_key(change) -> tuple:
    if isinstance(change, BuildChange):
        return change.key()
    if isinstance(change, dict):
        return (change["change_type"], change["node_path"],
                change.get("old_value"), change.get("new_value"))
    return tuple(change)


def evaluate(extracted: Iterable, expected: Iterable) -> EvaluationReport:
    """Multiset precision/recall keyed by (type, path, old value, new value).

    An empty denominator scores 1: nothing extracted means precision 1,
    nothing expected means recall 1.
    """
    found = Counter(_as_key(c) for c in extracted)
    wanted = Counter(_as_key(c) for c in expected)
    precision, recall, relevant = _scores(found, wanted)
    per_type = {}
    for name in sorted({k[0] for k in found} | {k[0] for k in wanted}):
        f = Counter({k: v for k, v in found.items() if k[0] == name})
        w = Counter({k: v for k, v in wanted.items() if k[0] == name})
        p, r, rel = _scores(f, w)
        per_type[name] = {"precision": p, "recall": r, "found": sum(f.values()),
                          "expected": sum(w.values()), "relevant": rel}
    return EvaluationReport(precision, recall, sum(found.values()), sum(wanted.values()),
                            relevant, per_type)
