"""Pure-Python implementations of the numeric kernels.

These are the reference versions; ``_ckernels.pyx`` mirrors them and must
return identical results (up to float rounding for the distribution).
"""
from bisect import bisect_left, bisect_right


def levenshtein(a, b):
    """Unit-cost edit distance between two strings."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        current = [i]
        for j, cb in enumerate(b, 1):
            current.append(min(previous[j] + 1,
                               current[j - 1] + 1,
                               previous[j - 1] + (ca != cb)))
        previous = current
    return previous[-1]


def dominance_counts(x, y):
    """Return ``(#{x_i > y_j}, #{x_i < y_j})`` over all pairs."""
    ys = sorted(y)
    greater = less = 0
    m = len(ys)
    for v in x:
        greater += bisect_left(ys, v)
        less += m - bisect_right(ys, v)
    return greater, less


def rank_sum_distribution(scores, k):
    """Count the k-subsets of ``scores`` (non-negative ints) by their sum.

    Returns a list ``counts`` where ``counts[s]`` is the number of subsets of
    size ``k`` whose scores add up to ``s``.
    """
    total = sum(scores)
    # rows[j][s]: ways to pick j items summing to s
    rows = [[0] * (total + 1) for _ in range(k + 1)]
    rows[0][0] = 1
    seen = 0
    for idx, score in enumerate(scores):
        seen += score
        for j in range(min(idx + 1, k), 0, -1):
            src = rows[j - 1]
            dst = rows[j]
            for s in range(seen, score - 1, -1):
                c = src[s - score]
                if c:
                    dst[s] += c
    return rows[k]
