"""Kernel selection: compiled extension when available, Python otherwise.

Set ``BUILDDIFF_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pykernels

BACKEND = "python"

if not os.environ.get("BUILDDIFF_PURE_PYTHON"):
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels
    else:
        BACKEND = "cython"
else:
    _impl = _pykernels

levenshtein = _impl.levenshtein
dominance_counts = _impl.dominance_counts
rank_sum_distribution = _impl.rank_sum_distribution

__all__ = ["BACKEND", "levenshtein", "dominance_counts", "rank_sum_distribution"]
