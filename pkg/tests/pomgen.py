"""Synthetic POM construction and random mutation helpers for the tests."""
from __future__ import annotations

import random
from pathlib import Path
from typing import Optional, Union
from xml.sax.saxutils import escape

from builddiff.differ import EditKind
from builddiff.pom import BuildNode, parse_pom, serialize
from builddiff.taxonomy import ChangeType, rule_for

FIXTURES = Path(__file__).parent / "fixtures"
CORPUS_DIR = FIXTURES / "poms"

Spec = tuple  # (tag, str | None | list[Spec])

GAV_KEYED = {"dependency", "plugin", "extension", "parent", "exclusion"}
ID_KEYED = {"profile", "repository", "pluginRepository", "execution", "developer",
            "snapshotRepository", "site"}


def corpus_files() -> list[Path]:
    return sorted(CORPUS_DIR.glob("*.xml"))


def to_xml(spec: Spec, level: int = 0) -> str:
    tag, body = spec
    pad = "  " * level
    if body is None:
        return f"{pad}<{tag}/>\n"
    if isinstance(body, str):
        return f"{pad}<{tag}>{escape(body)}</{tag}>\n"
    inner = "".join(to_xml(c, level + 1) for c in body)
    return f"{pad}<{tag}>\n{inner}{pad}</{tag}>\n"


def _identity(tag: str, salt: str, skip: str = "") -> list[Spec]:
    if tag in GAV_KEYED:
        kids = [("groupId", f"org.example.{salt}"), ("artifactId", f"{salt}-lib")]
        return [k for k in kids if k[0] != skip]
    if tag in ID_KEYED:
        return [("id", f"{salt}-id")]
    return []


def _extra(stem: str, value: str) -> Spec:
    if stem == "PROFILE":
        return ("activation", [("activeByDefault", value)])
    if stem.endswith("CONFIGURATION"):
        return ("skip", value)
    if stem == "BUILD":
        return ("directory", value)
    if stem == "DIST_MANAGEMENT":
        return ("downloadUrl", value)
    return ("note", value)


def _wrap(ancestors: list[str], target: Optional[Spec], skip: str, base: bool = True) -> Spec:
    body: list[Spec] = [target] if target is not None else []
    for depth in range(len(ancestors) - 1, -1, -1):
        tag = ancestors[depth]
        own = _identity(tag, "anc", skip if depth == len(ancestors) - 1 else "")
        kids = own + body
        body = [(tag, kids or None)]
    return ("project", ([("modelVersion", "4.0.0")] if base else []) + body)


_RENAMES = {"groupId": ("org.example.alpha", "org.example.alphb"),
            "artifactId": ("alpha-lib", "alpha-lic")}


def pair_for(ctype: ChangeType) -> tuple[Optional[str], Optional[str]]:
    """Two POM documents differing by exactly one change of ``ctype``."""
    comps = ctype.element_path.split("/")[1:]
    if not comps:
        minimal = to_xml(("project", [("modelVersion", "4.0.0")]))
        return (None, minimal) if ctype.kind is EditKind.INSERT else (minimal, None)
    comps = ["my.prop" if c == "*" else c for c in comps]
    ancestors, tag = comps[:-1], comps[-1]
    rule = rule_for(ctype.element_path)
    assert rule is not None
    stem = rule.stem
    skip = tag if tag in _RENAMES else ""

    if not rule.absorbs:
        old_v, new_v = _RENAMES.get(tag, ("v1", "v2"))
        old_t: Optional[Spec] = (tag, old_v)
        new_t: Optional[Spec] = (tag, new_v)
    elif ctype.kind is EditKind.UPDATE and rule.identified:
        old_t = (tag, [("groupId", "org.example.alpha"), ("artifactId", "alpha-lib")])
        new_t = (tag, [("groupId", "org.example.alphb"), ("artifactId", "alpha-lic")])
    else:
        old_t = (tag, _identity(tag, "tgt") + [_extra(stem, "v1")])
        new_t = (tag, _identity(tag, "tgt") + [_extra(stem, "v2")])

    if ctype.kind is EditKind.INSERT:
        old_t = None
    elif ctype.kind is EditKind.DELETE:
        new_t = None
    base = tag != "modelVersion"
    return (to_xml(_wrap(ancestors, old_t, skip, base)),
            to_xml(_wrap(ancestors, new_t, skip, base)))


# --- random mutation -------------------------------------------------------

def load_tree_root(path: Union[str, Path]) -> BuildNode:
    return parse_pom(Path(path).read_bytes(), str(path)).root


def clone(node: BuildNode) -> BuildNode:
    return BuildNode(node.tag, node.value, [clone(c) for c in node.children])


def render(root: BuildNode) -> str:
    return serialize(root)


def shuffled(node: BuildNode, rng: random.Random) -> BuildNode:
    kids = [shuffled(c, rng) for c in node.children]
    rng.shuffle(kids)
    return BuildNode(node.tag, node.value, kids)


def _token(rng: random.Random, n: int = 8) -> str:
    return "".join(rng.choice("abcdefghijklmnopqrstuvwxyz") for _ in range(n))


def _ensure_path(root: BuildNode, tags: list[str]) -> BuildNode:
    node = root
    for tag in tags:
        nxt = node.child(tag)
        if nxt is None or nxt.value is not None:
            nxt = BuildNode(tag)
            node.children.append(nxt)
            nxt.parent = node
        node = nxt
    return node


def _attach(parent: BuildNode, child: BuildNode) -> None:
    parent.children.append(child)
    child.parent = parent


COMPOSITE_KINDS = ("dependency", "plugin", "profile")


def insert_composite(root: BuildNode, kind: str, rng: random.Random) -> BuildNode:
    """Add a fresh composite with a unique key; returns the new node."""
    salt = _token(rng, 10)
    if kind == "dependency":
        host = _ensure_path(root, ["dependencies"])
        node = BuildNode("dependency", None, [
            BuildNode("groupId", f"zz.random.{salt}"),
            BuildNode("artifactId", f"{salt}-artifact"),
            BuildNode("version", f"{rng.randint(0, 9)}.{rng.randint(0, 99)}"),
        ])
    elif kind == "plugin":
        host = _ensure_path(root, ["build", "plugins"])
        node = BuildNode("plugin", None, [
            BuildNode("groupId", f"zz.plugins.{salt}"),
            BuildNode("artifactId", f"{salt}-maven-plugin"),
            BuildNode("configuration", None, [BuildNode("flag", "true"),
                                              BuildNode("level", str(rng.randint(1, 5)))]),
        ])
    elif kind == "profile":
        host = _ensure_path(root, ["profiles"])
        node = BuildNode("profile", None, [
            BuildNode("id", f"zz-{salt}"),
            BuildNode("properties", None, [BuildNode(f"p.{salt}", "1")]),
        ])
    else:
        raise ValueError(kind)
    _attach(host, node)
    return node


def _all_nodes(root: BuildNode) -> list[BuildNode]:
    return [n for n in root.iter() if n is not root]


def mutate(root: BuildNode, rng: random.Random, steps: int = 3) -> BuildNode:
    """Apply random deletions, value edits and insertions to a copy."""
    root = clone(root)
    for _ in range(steps):
        op = rng.random()
        nodes = _all_nodes(root)
        if op < 0.3 and nodes:
            victim = rng.choice(nodes)
            victim.parent.children.remove(victim)
        elif op < 0.65:
            leaves = [n for n in nodes if n.value is not None]
            if leaves:
                target = rng.choice(leaves)
                if rng.random() < 0.5 and len(target.value) > 2:
                    i = rng.randrange(len(target.value))
                    target.value = target.value[:i] + rng.choice("xyz") + target.value[i + 1:]
                else:
                    target.value = _token(rng, 6)
        elif op < 0.85:
            insert_composite(root, rng.choice(COMPOSITE_KINDS), rng)
        else:
            host = _ensure_path(root, ["properties"])
            _attach(host, BuildNode(f"gen.{_token(rng, 5)}", _token(rng, 4)))
    return clone(root)
