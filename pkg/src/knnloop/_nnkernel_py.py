"""Numpy fallback for the top-k scan; same contract as the compiled kernel."""

from __future__ import annotations

import numpy as np


def topk_l2(keys: np.ndarray, query: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Return (row ids, Euclidean distances) of the k nearest rows to query.

    Ordering is (squared distance ascending, row index ascending). The
    candidate set is widened to every row tied with the k-th smallest
    distance before sorting, so ties resolve exactly as a full sort would.
    """
    n = keys.shape[0]
    k = min(int(k), n)
    if k <= 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float64)
    if n > 0 and query.shape[0] != keys.shape[1]:
        raise ValueError("query dimension does not match key dimension")

    diff = keys - query
    sq = np.einsum("ij,ij->i", diff, diff)
    if k == n:
        cand = np.arange(n)
    else:
        kth = np.partition(sq, k - 1)[k - 1]
        cand = np.nonzero(sq <= kth)[0]
    order = cand[np.lexsort((cand, sq[cand]))][:k]
    return order.astype(np.int64), np.sqrt(sq[order])
