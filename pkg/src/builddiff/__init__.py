"""Fine-grained build change extraction for Maven ``pom.xml`` files."""

__version__ = "0.1.0"

from .classifier import BuildChange, classify, diff_documents, diff_trees, evaluate
from .differ import MatcherConfig, edit_script, levenshtein_similarity, match_trees
from .pom import BuildNode, BuildTree, normalize, parse_pom, serialize
from .taxonomy import ChangeCategory, ChangeType, build_taxonomy

__all__ = [
    "BuildChange", "BuildNode", "BuildTree", "ChangeCategory", "ChangeType", "MatcherConfig",
    "build_taxonomy", "classify", "diff_documents", "diff_trees", "edit_script", "evaluate",
    "levenshtein_similarity", "match_trees", "normalize", "parse_pom", "serialize",
]
