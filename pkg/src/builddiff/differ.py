"""Node matching and edit-script generation between two normalized POM trees.

Matching runs top-down.  Under every pair of matched parents the children
are paired in three passes:

1. identical subtrees (greedy, document order),
2. keyed composites -- elements with an ``id`` child, or with
   ``groupId``/``artifactId`` children -- paired by Levenshtein similarity
   above the configured threshold,
3. remaining unkeyed siblings with the same tag, pairwise in document order.

Only same-tag nodes are ever paired.  Moves are not detected.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from .kernels import levenshtein
from .pom import BuildNode, BuildTree

__all__ = [
    "DEFAULT_THRESHOLD",
    "MatcherConfig",
    "EditKind",
    "EditOperation",
    "NodeMapping",
    "levenshtein_similarity",
    "match_trees",
    "edit_script",
    "script_to_json",
]

DEFAULT_THRESHOLD = 0.65

# Maven fills in this groupId for build plugins that omit it.
_DEFAULT_PLUGIN_GROUP = "org.apache.maven.plugins"


@dataclass(frozen=True)
class MatcherConfig:
    threshold: float = DEFAULT_THRESHOLD

    def __post_init__(self) -> None:
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold must lie in [0, 1], got {self.threshold}")


class EditKind(enum.Enum):
    INSERT = "Insert"
    DELETE = "Delete"
    UPDATE = "Update"

    @property
    def suffix(self) -> str:
        return self.name


@dataclass(frozen=True, eq=False)
class EditOperation:
    kind: EditKind
    old_node: Optional[BuildNode]
    new_node: Optional[BuildNode]
    depth: int

    def __post_init__(self) -> None:
        if self.kind is EditKind.INSERT:
            ok = self.old_node is None and self.new_node is not None
        elif self.kind is EditKind.DELETE:
            ok = self.old_node is not None and self.new_node is None
        else:
            ok = (self.old_node is not None and self.new_node is not None
                  and self.old_node.tag == self.new_node.tag
                  and self.old_node.value != self.new_node.value)
        if not ok:
            raise ValueError(f"inconsistent {self.kind.value} operation")

    @property
    def node(self) -> BuildNode:
        """The affected node: the new node for inserts, the old one otherwise."""
        return self.new_node if self.kind is EditKind.INSERT else self.old_node  # type: ignore[return-value]

    @property
    def path(self) -> str:
        return self.node.path


def levenshtein_similarity(a: str, b: str) -> float:
    """``1 - distance / max(len)``; two empty strings are fully similar."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


class NodeMapping:
    """Bijective partial map between old and new nodes."""

    def __init__(self) -> None:
        self._fwd: dict[BuildNode, BuildNode] = {}
        self._bwd: dict[BuildNode, BuildNode] = {}

    def add(self, old: BuildNode, new: BuildNode) -> None:
        if old in self._fwd or new in self._bwd:
            raise ValueError("node already mapped")
        if old.tag != new.tag:
            raise ValueError(f"cannot map <{old.tag}> to <{new.tag}>")
        self._fwd[old] = new
        self._bwd[new] = old

    def new_for(self, old: BuildNode) -> Optional[BuildNode]:
        return self._fwd.get(old)

    def old_for(self, new: BuildNode) -> Optional[BuildNode]:
        return self._bwd.get(new)

    def has_old(self, node: BuildNode) -> bool:
        return node in self._fwd

    def has_new(self, node: BuildNode) -> bool:
        return node in self._bwd

    @property
    def pairs(self) -> list[tuple[BuildNode, BuildNode]]:
        return list(self._fwd.items())

    def inverse(self) -> NodeMapping:
        inv = NodeMapping()
        inv._fwd = dict(self._bwd)
        inv._bwd = dict(self._fwd)
        return inv

    def __len__(self) -> int:
        return len(self._fwd)

    def __iter__(self) -> Iterator[tuple[BuildNode, BuildNode]]:
        return iter(self._fwd.items())


def _gav_key(node: BuildNode) -> Optional[tuple[str, str]]:
    artifact = node.child("artifactId")
    if artifact is None or not artifact.is_leaf:
        return None
    group = node.child_value("groupId")
    if group is None:
        group = _DEFAULT_PLUGIN_GROUP if node.tag == "plugin" else ""
    return group, artifact.value or ""


def _match_key(node: BuildNode):
    """``('id', value)``, ``('gav', (group, artifact))`` or None for unkeyed nodes."""
    if not node.children:
        return None
    ident = node.child("id")
    if ident is not None and ident.is_leaf:
        return "id", ident.value or ""
    gav = _gav_key(node)
    if gav is not None:
        return "gav", gav
    return None


def _key_similarity(a, b) -> Optional[float]:
    if a[0] != b[0]:
        return None
    if a[0] == "id":
        return levenshtein_similarity(a[1], b[1])
    return (levenshtein_similarity(a[1][0], b[1][0])
            + levenshtein_similarity(a[1][1], b[1][1])) / 2.0


def _map_identical(old: BuildNode, new: BuildNode, mapping: NodeMapping) -> None:
    mapping.add(old, new)
    for o, n in zip(old.children, new.children):
        _map_identical(o, n, mapping)


def _shape_compatible(a: BuildNode, b: BuildNode) -> bool:
    # a valued leaf never pairs with an element that has children
    return not ((a.value is not None and b.children) or (b.value is not None and a.children))


def _match_children(old: BuildNode, new: BuildNode, cfg: MatcherConfig,
                    mapping: NodeMapping, recurse: list) -> None:
    olds = list(old.children)
    news = list(new.children)
    taken_old: set[int] = set()
    taken_new: set[int] = set()

    # exact pass
    by_canon: dict[str, list[int]] = {}
    for j, n in enumerate(news):
        by_canon.setdefault(n.canonical(), []).append(j)
    for i, o in enumerate(olds):
        bucket = by_canon.get(o.canonical())
        if bucket:
            j = bucket.pop(0)
            _map_identical(o, news[j], mapping)
            taken_old.add(i)
            taken_new.add(j)

    # keyed pass
    old_keys = {i: _match_key(o) for i, o in enumerate(olds) if i not in taken_old}
    new_keys = {j: _match_key(n) for j, n in enumerate(news) if j not in taken_new}
    candidates = []
    for i, ok in old_keys.items():
        if ok is None:
            continue
        for j, nk in new_keys.items():
            if nk is None or olds[i].tag != news[j].tag:
                continue
            sim = _key_similarity(ok, nk)
            if sim is not None and sim > cfg.threshold:
                candidates.append((-sim, i + j, min(i, j), i, j))
    candidates.sort()
    for _, _, _, i, j in candidates:
        if i in taken_old or j in taken_new:
            continue
        mapping.add(olds[i], news[j])
        taken_old.add(i)
        taken_new.add(j)
        recurse.append((olds[i], news[j]))

    # positional pass over unkeyed leftovers
    free_new: dict[str, list[int]] = {}
    for j, n in enumerate(news):
        if j not in taken_new and new_keys.get(j) is None:
            free_new.setdefault(n.tag, []).append(j)
    for i, o in enumerate(olds):
        if i in taken_old or old_keys.get(i) is not None:
            continue
        bucket = free_new.get(o.tag)
        if not bucket:
            continue
        for pos, j in enumerate(bucket):
            if _shape_compatible(o, news[j]):
                del bucket[pos]
                mapping.add(o, news[j])
                taken_old.add(i)
                taken_new.add(j)
                recurse.append((o, news[j]))
                break


def match_trees(old: Optional[BuildTree], new: Optional[BuildTree],
                cfg: MatcherConfig = MatcherConfig()) -> NodeMapping:
    """Pair nodes of two normalized trees.  A missing tree maps nothing."""
    mapping = NodeMapping()
    if old is None or new is None:
        return mapping
    if old.root.canonical() == new.root.canonical():
        _map_identical(old.root, new.root, mapping)
        return mapping
    mapping.add(old.root, new.root)
    pending = [(old.root, new.root)]
    while pending:
        o, n = pending.pop()
        found: list = []
        _match_children(o, n, cfg, mapping, found)
        pending.extend(reversed(found))
    return mapping


def _preorder_index(tree: Optional[BuildTree]) -> dict[BuildNode, int]:
    if tree is None:
        return {}
    return {node: i for i, node in enumerate(tree.root.iter())}


def edit_script(old: Optional[BuildTree], new: Optional[BuildTree],
                mapping: NodeMapping) -> list[EditOperation]:
    """Inserts, deletes and value updates sorted top-down.

    Ties at equal depth are broken by document order: operations located in
    the old tree (deletes, updates) before inserts.
    """
    old_index = _preorder_index(old)
    new_index = _preorder_index(new)
    keyed = []
    for node, idx in old_index.items():
        partner = mapping.new_for(node)
        if partner is None:
            op = EditOperation(EditKind.DELETE, node, None, node.depth)
        elif node.value != partner.value and not node.children and not partner.children:
            op = EditOperation(EditKind.UPDATE, node, partner, node.depth)
        else:
            continue
        keyed.append(((op.depth, 0, idx), op))
    for node, idx in new_index.items():
        if not mapping.has_new(node):
            op = EditOperation(EditKind.INSERT, None, node, node.depth)
            keyed.append(((op.depth, 1, idx), op))
    keyed.sort(key=lambda pair: pair[0])
    return [op for _, op in keyed]


def _render(node: Optional[BuildNode]) -> Optional[str]:
    if node is None:
        return None
    if node.children:
        return node.canonical()
    return node.value


def script_to_json(script: Iterable[EditOperation]) -> list[dict]:
    """Debug dump of an edit script."""
    return [
        {
            "kind": op.kind.value,
            "path": op.path,
            "old_value": _render(op.old_node),
            "new_value": _render(op.new_node),
        }
        for op in script
    ]
