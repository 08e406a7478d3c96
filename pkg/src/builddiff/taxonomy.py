"""The build-change taxonomy.

Change types are generated from a table of Maven schema paths.  Each row
yields ``<STEM>_INSERT``, ``<STEM>_DELETE`` and ``<STEM>_UPDATE``, except
that identifying children such as ``groupId`` only get an update type:
they come and go together with their parent element.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .differ import EditKind

__all__ = [
    "ChangeCategory",
    "ChangeType",
    "PathRule",
    "build_taxonomy",
    "taxonomy_index",
    "unknown_type",
    "rule_for",
    "is_transparent",
    "canonical_path",
    "IDENTIFIER_TAGS",
]


class ChangeCategory(enum.Enum):
    DEPENDENCY = "Dependency Changes"
    BUILD = "Build Changes"
    TEAM = "Team Changes"
    REPOSITORY = "Repository Changes"
    GENERAL = "General Changes"

    @classmethod
    def from_label(cls, label: str) -> ChangeCategory:
        for member in cls:
            if member.value == label:
                return member
        raise ValueError(f"unknown category {label!r}")


@dataclass(frozen=True)
class ChangeType:
    name: str
    element_path: str
    kind: EditKind
    category: ChangeCategory

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class PathRule:
    """One schema row.

    ``kinds`` lists the operations that get a type of their own (``I``,
    ``D``, ``U``); an element with only ``U`` reports every edit as an
    update.  ``absorbs``: edits below this element with no rule of their own
    are reported as this element's update.  ``identified``: a simultaneous
    change of ``groupId`` and ``artifactId`` is reported as this element's
    update.
    """

    path: str
    stem: str
    category: ChangeCategory
    kinds: str = "IDU"
    absorbs: bool = False
    identified: bool = False


D, B, T, R, G = (ChangeCategory.DEPENDENCY, ChangeCategory.BUILD, ChangeCategory.TEAM,
                 ChangeCategory.REPOSITORY, ChangeCategory.GENERAL)

IDENTIFIER_TAGS = ("groupId", "artifactId")

_P = "project"
_DEP = f"{_P}/dependencies/dependency"
_MDEP = f"{_P}/dependencyManagement/dependencies/dependency"
_PLUGIN = f"{_P}/build/plugins/plugin"
_MPLUGIN = f"{_P}/build/pluginManagement/plugins/plugin"
_DIST = f"{_P}/distributionManagement"

_RULES: tuple[PathRule, ...] = (
    # general project metadata
    PathRule(_P, "PROJECT", G, kinds="ID"),
    PathRule(f"{_P}/modelVersion", "MODEL_VERSION", G, kinds="U"),
    PathRule(f"{_P}/groupId", "PROJECT_GROUP_ID", G, kinds="U"),
    PathRule(f"{_P}/artifactId", "PROJECT_ARTIFACT_ID", G, kinds="U"),
    PathRule(f"{_P}/version", "PROJECT_VERSION", G),
    PathRule(f"{_P}/packaging", "PACKAGING", G),
    PathRule(f"{_P}/name", "PROJECT_NAME", G),
    PathRule(f"{_P}/description", "PROJECT_DESCRIPTION", G),
    PathRule(f"{_P}/url", "PROJECT_URL", G),
    PathRule(f"{_P}/inceptionYear", "INCEPTION_YEAR", G),
    PathRule(f"{_P}/parent", "PARENT", G, absorbs=True, identified=True),
    PathRule(f"{_P}/parent/groupId", "PARENT_GROUP_ID", G, kinds="U"),
    PathRule(f"{_P}/parent/artifactId", "PARENT_ARTIFACT_ID", G, kinds="U"),
    PathRule(f"{_P}/parent/version", "PARENT_VERSION", G, kinds="U"),
    PathRule(f"{_P}/parent/relativePath", "PARENT_RELATIVE_PATH", G),
    PathRule(f"{_P}/modules/module", "MODULE", G),
    PathRule(f"{_P}/properties/*", "GENERAL_PROPERTY", G),
    PathRule(f"{_P}/licenses/license", "LICENSE", G, absorbs=True),
    PathRule(f"{_P}/scm", "SCM", G, absorbs=True),
    PathRule(f"{_P}/issueManagement", "ISSUE_MANAGEMENT", G, absorbs=True),
    PathRule(f"{_P}/ciManagement", "CI_MANAGEMENT", G, absorbs=True),
    PathRule(f"{_P}/organization", "ORGANIZATION", G, absorbs=True),
    PathRule(f"{_P}/mailingLists/mailingList", "MAILING_LIST", G, absorbs=True),
    PathRule(f"{_P}/prerequisites", "PREREQUISITES", G, absorbs=True),
    PathRule(f"{_P}/reporting", "REPORTING", G, absorbs=True),
    PathRule(f"{_P}/profiles/profile", "PROFILE", G, absorbs=True),
    # dependencies
    PathRule(_DEP, "DEPENDENCY", D, absorbs=True, identified=True),
    PathRule(f"{_DEP}/groupId", "DEPENDENCY_GROUP_ID", D, kinds="U"),
    PathRule(f"{_DEP}/artifactId", "DEPENDENCY_ARTIFACT_ID", D, kinds="U"),
    PathRule(f"{_DEP}/version", "DEPENDENCY_VERSION", D),
    PathRule(f"{_DEP}/scope", "DEPENDENCY_SCOPE", D),
    PathRule(f"{_DEP}/type", "DEPENDENCY_TYPE", D),
    PathRule(f"{_DEP}/classifier", "DEPENDENCY_CLASSIFIER", D),
    PathRule(f"{_DEP}/exclusions/exclusion", "DEPENDENCY_EXCLUSION", D, absorbs=True),
    PathRule(_MDEP, "MANAGED_DEPENDENCY", D, absorbs=True, identified=True),
    PathRule(f"{_MDEP}/groupId", "MANAGED_DEPENDENCY_GROUP_ID", D, kinds="U"),
    PathRule(f"{_MDEP}/artifactId", "MANAGED_DEPENDENCY_ARTIFACT_ID", D, kinds="U"),
    PathRule(f"{_MDEP}/version", "MANAGED_DEPENDENCY_VERSION", D),
    PathRule(f"{_MDEP}/scope", "MANAGED_DEPENDENCY_SCOPE", D),
    # build section
    PathRule(f"{_P}/build", "BUILD", B, kinds="U", absorbs=True),
    PathRule(_PLUGIN, "PLUGIN", B, absorbs=True, identified=True),
    PathRule(f"{_PLUGIN}/groupId", "PLUGIN_GROUP_ID", B, kinds="U"),
    PathRule(f"{_PLUGIN}/artifactId", "PLUGIN_ARTIFACT_ID", B, kinds="U"),
    PathRule(f"{_PLUGIN}/version", "PLUGIN_VERSION", B),
    PathRule(f"{_PLUGIN}/configuration", "PLUGIN_CONFIGURATION", B,
             kinds="U", absorbs=True),
    PathRule(f"{_PLUGIN}/executions/execution", "PLUGIN_EXECUTION", B, absorbs=True),
    PathRule(_MPLUGIN, "MANAGED_PLUGIN", B, absorbs=True, identified=True),
    PathRule(f"{_MPLUGIN}/version", "MANAGED_PLUGIN_VERSION", B),
    PathRule(f"{_MPLUGIN}/configuration", "MANAGED_PLUGIN_CONFIGURATION", B,
             kinds="U", absorbs=True),
    PathRule(f"{_P}/build/resources/resource", "RESOURCE", B, absorbs=True),
    PathRule(f"{_P}/build/testResources/testResource", "TEST_RESOURCE", B, absorbs=True),
    PathRule(f"{_P}/build/sourceDirectory", "SOURCE_DIRECTORY", B),
    PathRule(f"{_P}/build/testSourceDirectory", "TEST_SOURCE_DIRECTORY", B),
    PathRule(f"{_P}/build/finalName", "FINAL_NAME", B),
    PathRule(f"{_P}/build/extensions/extension", "EXTENSION", B, absorbs=True, identified=True),
    # team
    PathRule(f"{_P}/developers/developer", "DEVELOPER", T, absorbs=True),
    PathRule(f"{_P}/contributors/contributor", "CONTRIBUTOR", T, absorbs=True),
    # repositories and distribution
    PathRule(f"{_P}/repositories/repository", "REPOSITORY", R, absorbs=True),
    PathRule(f"{_P}/pluginRepositories/pluginRepository", "PLUGIN_REPOSITORY", R, absorbs=True),
    PathRule(_DIST, "DIST_MANAGEMENT", R, kinds="U", absorbs=True),
    PathRule(f"{_DIST}/repository", "DIST_REPOSITORY", R, absorbs=True),
    PathRule(f"{_DIST}/snapshotRepository", "DIST_SNAPSHOT_REPOSITORY", R, absorbs=True),
    PathRule(f"{_DIST}/site", "DIST_SITE", R, absorbs=True),
)

# Grouping wrappers.  Inserting or deleting one is not a change in itself;
# its children are classified individually.
_TRANSPARENT = frozenset({
    f"{_P}/modules", f"{_P}/properties", f"{_P}/dependencies",
    f"{_P}/dependencyManagement", f"{_P}/dependencyManagement/dependencies",
    f"{_DEP}/exclusions", f"{_MDEP}/exclusions",
    f"{_P}/build", f"{_P}/build/plugins", f"{_P}/build/pluginManagement",
    f"{_P}/build/pluginManagement/plugins", f"{_PLUGIN}/executions",
    f"{_P}/build/resources", f"{_P}/build/testResources", f"{_P}/build/extensions",
    f"{_P}/developers", f"{_P}/contributors", f"{_P}/licenses", f"{_P}/mailingLists",
    f"{_P}/profiles", f"{_P}/repositories", f"{_P}/pluginRepositories", _DIST,
})

# Children of <profile> that belong to the profile itself; everything else
# mirrors the top-level project layout.
_PROFILE_OWN = frozenset({"id", "activation"})
_PROFILE_PREFIX = f"{_P}/profiles/profile/"

_KINDS = (EditKind.INSERT, EditKind.DELETE, EditKind.UPDATE)
_KIND_CODES = {"I": EditKind.INSERT, "D": EditKind.DELETE, "U": EditKind.UPDATE}


def _kinds(rule: PathRule) -> tuple[EditKind, ...]:
    return tuple(_KIND_CODES[c] for c in rule.kinds)


def canonical_path(path: str) -> str:
    """Map profile-nested paths onto their top-level counterparts."""
    while path.startswith(_PROFILE_PREFIX):
        rest = path[len(_PROFILE_PREFIX):]
        if rest.split("/", 1)[0] in _PROFILE_OWN:
            break
        path = f"{_P}/{rest}"
    return path


@lru_cache(maxsize=None)
def _rules_by_path() -> dict[str, PathRule]:
    return {rule.path: rule for rule in _RULES}


def rule_for(path: str) -> Optional[PathRule]:
    """The rule governing exactly this (canonical) path, if any."""
    rules = _rules_by_path()
    rule = rules.get(path)
    if rule is None and "/" in path:
        rule = rules.get(path.rsplit("/", 1)[0] + "/*")
    return rule


def is_transparent(path: str) -> bool:
    return path in _TRANSPARENT


@lru_cache(maxsize=None)
def build_taxonomy() -> tuple[ChangeType, ...]:
    """All change types, in table order."""
    types: list[ChangeType] = []
    for rule in _RULES:
        for kind in _kinds(rule):
            types.append(ChangeType(f"{rule.stem}_{kind.suffix}", rule.path, kind, rule.category))
    return tuple(types)


@lru_cache(maxsize=None)
def taxonomy_index() -> dict[str, ChangeType]:
    index = {t.name: t for t in build_taxonomy()}
    for kind in _KINDS:
        t = unknown_type(kind)
        index[t.name] = t
    return index


@lru_cache(maxsize=None)
def unknown_type(kind: EditKind) -> ChangeType:
    """Catch-all for edits on elements outside the schema table."""
    return ChangeType(f"UNKNOWN_{kind.suffix}", "*", kind, ChangeCategory.GENERAL)


def type_for(rule: PathRule, kind: EditKind) -> ChangeType:
    if kind not in _kinds(rule):
        kind = EditKind.UPDATE
    return taxonomy_index()[f"{rule.stem}_{kind.suffix}"]
