# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled hot-loop kernels: adjacent-pair counting and sorted-form Gini.

Must stay semantically identical to chatpulse._kernels._pure, including the
floating-point accumulation order in gini_sorted. The kernels work directly
on Python sequences; window slices are short and frequent, so avoiding any
array conversion is what actually makes the compiled path fast.
"""


def pair_counts(users):
    """Count unordered adjacent pairs in a sender sequence, skipping repeats."""
    cdef list seq = users if type(users) is list else list(users)
    cdef Py_ssize_t n = len(seq)
    cdef dict counts = {}
    cdef long long prev, cur
    cdef Py_ssize_t i
    cdef tuple key
    if n == 0:
        return counts
    prev = seq[0]
    for i in range(1, n):
        cur = seq[i]
        if cur != prev:
            key = (prev, cur) if prev < cur else (cur, prev)
            counts[key] = counts.get(key, 0) + 1
        prev = cur
    return counts


def gini_sorted(values):
    """Gini coefficient of positive values via the O(k log k) sorted form."""
    cdef list xs = sorted(values)
    cdef Py_ssize_t k = len(xs)
    cdef double total = 0.0
    cdef double weighted = 0.0
    cdef double x
    cdef Py_ssize_t i
    for i in range(k):
        x = xs[i]
        weighted += (2.0 * (i + 1) - k - 1) * x
        total += x
    return weighted / (k * total)
