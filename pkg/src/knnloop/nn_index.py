"""Incremental exact k-nearest-neighbor index over fixed-dimension vectors.

This is the shared substrate for both datastores: append-only, exact
(linear scan, no approximation), Euclidean distance, deterministic
tie-breaking by insertion order. Entries are visible to queries
immediately after :meth:`ExactNNIndex.add`.

The scan itself is the hot kernel of the decoding loop. A compiled
extension is used when available; otherwise a numpy implementation with
identical semantics is selected at import time. Set ``KNNLOOP_PURE=1``
to force the fallback (used by the benchmark).
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import _nnkernel_py
from .errors import ContractViolation

try:
    from . import _nnkernel as _native
except ImportError:  # extension not built; fall back to numpy
    _native = None

_FORCE_PURE = os.environ.get("KNNLOOP_PURE", "") not in ("", "0")
if _native is not None and not _FORCE_PURE:
    _topk = _native.topk_l2
    KERNEL_NAME = "native"
else:
    _topk = _nnkernel_py.topk_l2
    KERNEL_NAME = "numpy"

_INITIAL_CAPACITY = 256


def kernel_name() -> str:
    """Which scan implementation this process selected at import."""
    return KERNEL_NAME


@dataclass(frozen=True, eq=False)
class Neighbor:
    """One retrieval hit: entry identity, stored payload, true Euclidean distance."""

    entry_id: int
    payload: int
    distance: float
    key: np.ndarray


class ExactNNIndex:
    """Append-only flat index; single writer, safe concurrent reads between writes."""

    def __init__(self, dim: int):
        if dim < 1:
            raise ContractViolation("index dimension must be positive")
        self._dim = dim
        self._keys = np.empty((_INITIAL_CAPACITY, dim), dtype=np.float64)
        self._payloads = np.empty(_INITIAL_CAPACITY, dtype=np.int64)
        self._count = 0

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def count(self) -> int:
        return self._count

    def __len__(self) -> int:
        return self._count

    def _grow(self) -> None:
        capacity = self._keys.shape[0] * 2
        keys = np.empty((capacity, self._dim), dtype=np.float64)
        payloads = np.empty(capacity, dtype=np.int64)
        keys[: self._count] = self._keys[: self._count]
        payloads[: self._count] = self._payloads[: self._count]
        self._keys = keys
        self._payloads = payloads

    def add(self, key: np.ndarray, payload: int) -> int:
        """Insert one entry; returns its id (the insertion counter)."""
        arr = np.asarray(key, dtype=np.float64).reshape(-1)
        if arr.size != self._dim:
            raise ContractViolation(
                f"key dimension {arr.size} does not match index dimension {self._dim}"
            )
        if self._count == self._keys.shape[0]:
            self._grow()
        entry_id = self._count
        self._keys[entry_id] = arr
        self._payloads[entry_id] = int(payload)
        self._count += 1
        return entry_id

    def query(self, q: np.ndarray, k: int) -> list[Neighbor]:
        """The ``min(k, count)`` nearest entries, ascending distance.

        Exact: every stored entry is scanned. Equal distances order by
        insertion. An empty index yields an empty list.
        """
        arr = np.asarray(q, dtype=np.float64).reshape(-1)
        if arr.size != self._dim:
            raise ContractViolation(
                f"query dimension {arr.size} does not match index dimension {self._dim}"
            )
        if k < 1:
            raise ContractViolation("k must be a positive integer")
        if self._count == 0:
            return []
        ids, dists = _topk(self._keys[: self._count], arr, min(k, self._count))
        return [
            Neighbor(
                entry_id=int(i),
                payload=int(self._payloads[i]),
                distance=float(dist),
                key=self._keys[i].copy(),
            )
            for i, dist in zip(ids, dists)
        ]

    def clear(self) -> None:
        self._count = 0

    def export_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Copies of (keys, payloads) in insertion order, for persistence."""
        return self._keys[: self._count].copy(), self._payloads[: self._count].copy()

    @classmethod
    def from_arrays(cls, keys: np.ndarray, payloads: np.ndarray, dim: int) -> "ExactNNIndex":
        keys = np.ascontiguousarray(keys, dtype=np.float64)
        payloads = np.asarray(payloads, dtype=np.int64)
        if keys.ndim != 2 or keys.shape[1] != dim:
            raise ContractViolation("key matrix shape does not match dimension")
        if keys.shape[0] != payloads.shape[0]:
            raise ContractViolation("keys and payloads disagree on entry count")
        index = cls(dim)
        n = keys.shape[0]
        while index._keys.shape[0] < n:
            index._grow()
        index._keys[:n] = keys
        index._payloads[:n] = payloads
        index._count = n
        return index
