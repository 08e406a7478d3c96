"""Parsing and canonical ordering of Maven ``pom.xml`` documents.

A POM is read into a tree of :class:`BuildNode` objects that keep only
element names and trimmed text.  Comments, processing instructions,
attributes and namespaces are dropped.  :func:`normalize` sorts siblings so
that two documents differing only in element order produce the same tree.
"""
from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union
from xml.sax.saxutils import escape

__all__ = [
    "BuildNode",
    "BuildTree",
    "PomError",
    "MalformedXml",
    "UnexpectedRoot",
    "MixedContent",
    "parse_pom",
    "normalize",
    "serialize",
    "empty_tree",
]


class PomError(ValueError):
    """Base class for documents that cannot be turned into a BuildTree."""


class MalformedXml(PomError):
    pass


class UnexpectedRoot(PomError):
    pass


class MixedContent(PomError):
    pass


@dataclass(eq=False)
class BuildNode:
    """One XML element.  Nodes compare by identity."""

    tag: str
    value: Optional[str] = None
    children: list[BuildNode] = field(default_factory=list)
    position: int = 0
    parent: Optional[BuildNode] = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if not self.tag:
            raise ValueError("tag must not be empty")
        if self.value is not None and self.children:
            raise MixedContent(f"<{self.tag}> has both a value and children")
        for i, child in enumerate(self.children):
            child.parent = self
            child.position = i
        self._canon: Optional[str] = None

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def depth(self) -> int:
        d = 0
        node = self.parent
        while node is not None:
            d += 1
            node = node.parent
        return d

    @property
    def path(self) -> str:
        parts = []
        node: Optional[BuildNode] = self
        while node is not None:
            parts.append(node.tag)
            node = node.parent
        return "/".join(reversed(parts))

    def child(self, tag: str) -> Optional[BuildNode]:
        for c in self.children:
            if c.tag == tag:
                return c
        return None

    def child_value(self, tag: str) -> Optional[str]:
        c = self.child(tag)
        return None if c is None else c.value

    def iter(self) -> Iterator[BuildNode]:
        """Pre-order traversal (document order)."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def ancestors(self) -> Iterator[BuildNode]:
        node = self.parent
        while node is not None:
            yield node
            node = node.parent

    def content(self) -> str:
        """Sort content: the value of a leaf, the joined child keys otherwise."""
        if self.children:
            return "".join(c.canonical() for c in self.children)
        return escape(self.value) if self.value is not None else ""

    def canonical(self) -> str:
        """Compact canonical XML of the subtree; equal iff subtrees are identical."""
        if self._canon is None:
            self._canon = f"<{self.tag}>{self.content()}</{self.tag}>"
        return self._canon


@dataclass(eq=False)
class BuildTree:
    root: BuildNode
    source_id: Optional[str] = None

    def __post_init__(self) -> None:
        if self.root.tag != "project":
            raise UnexpectedRoot(f"root element is <{self.root.tag}>, expected <project>")

    def nodes(self) -> list[BuildNode]:
        return list(self.root.iter())

    def __len__(self) -> int:
        return sum(1 for _ in self.root.iter())


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _convert(elem: ET.Element) -> BuildNode:
    kids = [c for c in elem if isinstance(c.tag, str)]
    text = (elem.text or "").strip()
    if kids:
        if text or any((c.tail or "").strip() for c in kids):
            raise MixedContent(f"<{_local(elem.tag)}> mixes text and child elements")
        return BuildNode(_local(elem.tag), None, [_convert(c) for c in kids])
    return BuildNode(_local(elem.tag), text or None)


def parse_pom(document: Union[str, bytes], source_id: Optional[str] = None) -> BuildTree:
    """Parse POM text (or raw bytes, honouring the XML declaration's encoding)."""
    try:
        root = ET.fromstring(document)
    except ET.ParseError as exc:
        raise MalformedXml(f"{source_id or 'document'}: {exc}") from exc
    if _local(root.tag) != "project":
        raise UnexpectedRoot(f"root element is <{_local(root.tag)}>, expected <project>")
    return BuildTree(_convert(root), source_id)


def empty_tree(source_id: Optional[str] = None) -> BuildTree:
    return BuildTree(BuildNode("project"), source_id)


def _sort_key(node: BuildNode) -> tuple[str, str]:
    return node.tag, node.content()


def _normalized(node: BuildNode) -> BuildNode:
    if not node.children:
        return BuildNode(node.tag, node.value)
    kids = sorted((_normalized(c) for c in node.children), key=_sort_key)
    return BuildNode(node.tag, None, kids)


def normalize(tree: BuildTree) -> BuildTree:
    """Return a copy whose siblings are sorted by (tag, content) at every level.

    Strings compare by code point; numeric-looking values get no special
    treatment.  The function is idempotent.
    """
    return BuildTree(_normalized(tree.root), tree.source_id)


def serialize(tree: Union[BuildTree, BuildNode], indent: str = "  ") -> str:
    """Debug XML rendering: no attributes, no declaration, fixed indentation."""
    node = tree.root if isinstance(tree, BuildTree) else tree
    lines: list[str] = []

    def emit(n: BuildNode, level: int) -> None:
        pad = indent * level
        if n.children:
            lines.append(f"{pad}<{n.tag}>")
            for c in n.children:
                emit(c, level + 1)
            lines.append(f"{pad}</{n.tag}>")
        elif n.value is None:
            lines.append(f"{pad}<{n.tag}/>")
        else:
            lines.append(f"{pad}<{n.tag}>{escape(n.value)}</{n.tag}>")

    emit(node, 0)
    return "\n".join(lines) + "\n"
