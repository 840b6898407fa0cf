"""Policy datastore: learns when to trust token retrieval.

Keys are fixed-length features summarizing a token retrieval result
(distances and running distinct-value counts, exponentially re-weighted
so the nearest neighbor dominates). Values are binary flags induced from
corrections: 1 when the retrieval distribution beat the base model on
the reference token. At inference the stored flags are softmax-averaged
into a per-token interpolation weight.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, NoRetrievalSupport
from .nn_index import ExactNNIndex
from .token_knn import TokenNeighborSet

DEFAULT_FALLBACK_LAMBDA = 0.0


def feature_weights(k: int) -> np.ndarray:
    """Re-weighting vector of length ``2k``.

    Distance half: [1/4, 1/8, ..., 1/2^k, 1/2^k] (the last weight repeats).
    Count half: the mirror image, so the full-window count lands on 1/4.
    """
    if k < 1:
        raise ContractViolation("k must be >= 1")
    distance_part = np.array([2.0 ** -(i + 1) for i in range(1, k)] + [2.0**-k])
    return np.concatenate([distance_part, distance_part[::-1]])


@dataclass(frozen=True, eq=False)
class PolicyFeature:
    """Re-weighted retrieval summary of fixed length ``2k``."""

    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0 or arr.size % 2 != 0:
            raise ContractViolation("policy feature must be a non-empty even-length vector")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise ContractViolation("policy feature entries must be finite and >= 0")
        arr = arr.copy() if arr is self.values else arr
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def dim(self) -> int:
        return int(self.values.size)


def build_features(neighbors: TokenNeighborSet, k: int) -> PolicyFeature:
    """Feature vector for a retrieval result.

    Distances in retrieval order (ascending) and running counts of distinct
    retrieved tokens, padded out to ``k`` slots when retrieval returned
    fewer: missing distances get twice the largest observed distance so
    sparse retrieval reads as unreliable, missing counts repeat the last
    running count. Both halves are then re-weighted.
    """
    if not neighbors:
        raise NoRetrievalSupport("no retrieval support: neighbor set is empty")
    if k < 1:
        raise ContractViolation("k must be >= 1")
    dists = neighbors.distances()[:k]
    values = neighbors.token_ids()[:k]

    counts: list[float] = []
    seen: set[int] = set()
    for value in values:
        seen.add(value)
        counts.append(float(len(seen)))

    if len(dists) < k:
        pad_distance = 2.0 * (max(dists) if dists else 1.0)
        dists = dists + [pad_distance] * (k - len(dists))
        counts = counts + [counts[-1]] * (k - len(counts))

    raw = np.array(dists + counts, dtype=np.float64)
    return PolicyFeature(raw * feature_weights(k))


def induce_value(p_knn_at_ref: float, p_nmt_at_ref: float) -> int:
    """Binary trust label: 1 iff retrieval beat the base model on the reference."""
    for name, value in (("p_knn_at_ref", p_knn_at_ref), ("p_nmt_at_ref", p_nmt_at_ref)):
        if not 0.0 <= value <= 1.0:
            raise ContractViolation(f"{name}={value!r} outside [0, 1]")
    return 1 if p_knn_at_ref > p_nmt_at_ref else 0


class PolicyDatastore:
    """Incremental store of (feature, trust flag) pairs."""

    def __init__(
        self,
        k: int,
        temperature: float,
        fallback_lambda: float = DEFAULT_FALLBACK_LAMBDA,
    ):
        if k < 1:
            raise ContractViolation("k must be >= 1")
        if temperature <= 0:
            raise ContractViolation("temperature must be positive")
        if not 0.0 <= fallback_lambda <= 1.0:
            raise ContractViolation("fallback lambda must lie in [0, 1]")
        self.k = k
        self.temperature = temperature
        self.fallback_lambda = fallback_lambda
        self._index = ExactNNIndex(2 * k)

    @property
    def dim(self) -> int:
        return self._index.dim

    @property
    def count(self) -> int:
        return self._index.count

    @property
    def index(self) -> ExactNNIndex:
        return self._index

    def clear(self) -> None:
        self._index.clear()

    def add_entry(self, feature: PolicyFeature, value: int) -> int:
        if value not in (0, 1):
            raise ContractViolation("policy value must be 0 or 1")
        if feature.dim != self._index.dim:
            raise ContractViolation(
                f"feature dimension {feature.dim} does not match policy dimension {self._index.dim}"
            )
        return self._index.add(feature.values, value)

    def predict_lambda(self, feature: PolicyFeature) -> float:
        """Softmax mass of trust-flag-1 neighbors; fallback when the store is empty."""
        if self._index.count == 0:
            return self.fallback_lambda
        hits = self._index.query(feature.values, self.k)
        dists = np.array([h.distance for h in hits], dtype=np.float64)
        logits = -dists / self.temperature
        logits -= logits.max()
        masses = np.exp(logits)
        masses /= masses.sum()
        positive = sum(float(m) for h, m in zip(hits, masses) if h.payload == 1)
        return min(1.0, max(0.0, positive))
