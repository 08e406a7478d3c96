# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_pykernels``."""
from libc.stdlib cimport malloc, free, qsort


def levenshtein(str a, str b):
    cdef Py_ssize_t n, m, i, j
    cdef Py_ssize_t *prev
    cdef Py_ssize_t *cur
    cdef Py_ssize_t *tmp
    cdef Py_ssize_t best, cand
    cdef Py_UCS4 ca
    if len(a) < len(b):
        a, b = b, a
    n = len(a)
    m = len(b)
    if m == 0:
        return n
    prev = <Py_ssize_t *> malloc((m + 1) * sizeof(Py_ssize_t))
    cur = <Py_ssize_t *> malloc((m + 1) * sizeof(Py_ssize_t))
    if prev == NULL or cur == NULL:
        free(prev)
        free(cur)
        raise MemoryError()
    try:
        for j in range(m + 1):
            prev[j] = j
        for i in range(1, n + 1):
            ca = a[i - 1]
            cur[0] = i
            for j in range(1, m + 1):
                best = prev[j] + 1
                cand = cur[j - 1] + 1
                if cand < best:
                    best = cand
                cand = prev[j - 1] + (0 if ca == b[j - 1] else 1)
                if cand < best:
                    best = cand
                cur[j] = best
            tmp = prev
            prev = cur
            cur = tmp
        return prev[m]
    finally:
        free(prev)
        free(cur)


cdef int _cmp(const void *a, const void *b) noexcept nogil:
    cdef double u = (<const double *> a)[0], w = (<const double *> b)[0]
    return (u > w) - (u < w)


def dominance_counts(x, y):
    cdef Py_ssize_t n = len(x), m = len(y), i, j = 0, k = 0
    cdef double *xs = <double *> malloc((n + 1) * sizeof(double))
    cdef double *ys = <double *> malloc((m + 1) * sizeof(double))
    cdef long long greater = 0, less = 0
    cdef double v
    if xs == NULL or ys == NULL:
        free(xs)
        free(ys)
        raise MemoryError()
    try:
        for i in range(n):
            xs[i] = x[i]
        for i in range(m):
            ys[i] = y[i]
        qsort(xs, n, sizeof(double), _cmp)
        qsort(ys, m, sizeof(double), _cmp)
        # j: ys below v, k: ys at or below v
        for i in range(n):
            v = xs[i]
            while j < m and ys[j] < v:
                j += 1
            if k < j:
                k = j
            while k < m and ys[k] <= v:
                k += 1
            greater += j
            less += m - k
        return greater, less
    finally:
        free(xs)
        free(ys)


def rank_sum_distribution(scores, Py_ssize_t k):
    cdef Py_ssize_t n = len(scores), total = 0, idx, j, s, score, seen = 0
    cdef Py_ssize_t width
    cdef double *rows
    cdef long *sc = <long *> malloc((n + 1) * sizeof(long))
    if sc == NULL:
        raise MemoryError()
    for idx in range(n):
        sc[idx] = scores[idx]
        total += sc[idx]
    width = total + 1
    rows = <double *> malloc((k + 1) * width * sizeof(double))
    if rows == NULL:
        free(sc)
        raise MemoryError()
    try:
        for s in range((k + 1) * width):
            rows[s] = 0.0
        rows[0] = 1.0
        for idx in range(n):
            score = sc[idx]
            seen += score
            j = idx + 1 if idx + 1 < k else k
            while j > 0:
                s = seen
                while s >= score:
                    rows[j * width + s] += rows[(j - 1) * width + s - score]
                    s -= 1
                j -= 1
        return [rows[k * width + s] for s in range(width)]
    finally:
        free(rows)
        free(sc)
