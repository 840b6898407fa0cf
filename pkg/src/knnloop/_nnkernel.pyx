# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled exact top-k scan under Euclidean distance.

Single pass over the key matrix with an insertion-sorted candidate buffer.
Ordering is (squared distance ascending, row index ascending); rows are
visited in insertion order, so equal distances keep the earlier row first.
"""

from libc.math cimport sqrt

import numpy as np


def topk_l2(const double[:, ::1] keys, const double[::1] query, Py_ssize_t k):
    """Return (row ids, Euclidean distances) of the k nearest rows to query."""
    cdef Py_ssize_t n = keys.shape[0]
    cdef Py_ssize_t d = keys.shape[1]
    if n > 0 and query.shape[0] != d:
        raise ValueError("query dimension does not match key dimension")
    if k > n:
        k = n
    ids = np.empty(k, dtype=np.int64)
    dists = np.empty(k, dtype=np.float64)
    if k <= 0:
        return ids, dists

    cdef long long[::1] bid = ids
    cdef double[::1] bsq = dists
    cdef Py_ssize_t filled = 0
    cdef Py_ssize_t i, j, pos
    cdef double sq, diff

    for i in range(n):
        sq = 0.0
        for j in range(d):
            diff = keys[i, j] - query[j]
            sq += diff * diff
        if filled < k:
            pos = filled
            while pos > 0 and bsq[pos - 1] > sq:
                bsq[pos] = bsq[pos - 1]
                bid[pos] = bid[pos - 1]
                pos -= 1
            bsq[pos] = sq
            bid[pos] = i
            filled += 1
        elif sq < bsq[k - 1]:
            pos = k - 1
            while pos > 0 and bsq[pos - 1] > sq:
                bsq[pos] = bsq[pos - 1]
                bid[pos] = bid[pos - 1]
                pos -= 1
            bsq[pos] = sq
            bid[pos] = i

    for i in range(k):
        bsq[i] = sqrt(bsq[i])
    return ids, dists
