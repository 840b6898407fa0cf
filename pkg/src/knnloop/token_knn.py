"""Token datastore: caches (context vector, target token) pairs from corrected
sentences and turns retrieval results into a token distribution.

Retrieved neighbors are softmax-weighted by negative distance over
temperature; each neighbor votes its stored token. The datastore is
append-only within a session and stores one entry per target position
plus one end-of-sentence entry per corrected sentence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base_model import ModelOutput
from .core import EOS_ID, ContextVector, Distribution, Sentence, require_sentence
from .errors import ContractViolation, NoRetrievalSupport
from .nn_index import ExactNNIndex

DEFAULT_K = 8
DEFAULT_TEMPERATURE = 10.0


@dataclass(frozen=True, eq=False)
class TokenNeighbor:
    """One retrieved (key, token, distance) triple."""

    key: np.ndarray
    token_id: int
    distance: float


@dataclass(frozen=True, eq=False)
class TokenNeighborSet:
    """Retrieval result for one query, ascending by distance."""

    query: np.ndarray
    neighbors: tuple[TokenNeighbor, ...]

    def __len__(self) -> int:
        return len(self.neighbors)

    def __bool__(self) -> bool:
        return bool(self.neighbors)

    def distances(self) -> list[float]:
        return [n.distance for n in self.neighbors]

    def token_ids(self) -> list[int]:
        return [n.token_id for n in self.neighbors]


def knn_distribution(
    neighbors: TokenNeighborSet,
    temperature: float,
    vocab_size: int,
) -> Distribution:
    """Distribution over the vocabulary induced by a retrieval result.

    Softmax of ``-distance / temperature`` across the neighbors, with each
    neighbor's mass credited to its stored token. Support is exactly the
    set of retrieved tokens.
    """
    if not neighbors:
        raise NoRetrievalSupport("no retrieval support: neighbor set is empty")
    if temperature <= 0:
        raise ContractViolation("temperature must be positive")
    dists = np.array(neighbors.distances(), dtype=np.float64)
    logits = -dists / temperature
    logits -= logits.max()
    masses = np.exp(logits)
    masses /= masses.sum()
    probs = np.zeros(vocab_size, dtype=np.float64)
    for neighbor, mass in zip(neighbors.neighbors, masses):
        if not 0 <= neighbor.token_id < vocab_size:
            raise ContractViolation(
                f"stored token id {neighbor.token_id} outside vocabulary of size {vocab_size}"
            )
        probs[neighbor.token_id] += mass
    # renormalize so accumulated rounding can never push an entry above 1
    probs /= probs.sum()
    return Distribution(probs)


class TokenDatastore:
    """Incremental store of (hidden state, target token) pairs."""

    def __init__(
        self,
        dim: int,
        k: int = DEFAULT_K,
        temperature: float = DEFAULT_TEMPERATURE,
    ):
        if k < 1:
            raise ContractViolation("k must be >= 1")
        if temperature <= 0:
            raise ContractViolation("temperature must be positive")
        self.k = k
        self.temperature = temperature
        self._index = ExactNNIndex(dim)

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

    def retrieve(self, h: ContextVector, k: int | None = None) -> TokenNeighborSet:
        """Up to ``k`` nearest stored pairs; may be empty early in a session."""
        hits = self._index.query(h.values, k if k is not None else self.k)
        return TokenNeighborSet(
            query=h.values,
            neighbors=tuple(
                TokenNeighbor(key=hit.key, token_id=hit.payload, distance=hit.distance)
                for hit in hits
            ),
        )

    def add_sentence(self, x: Sentence, y: Sentence, states: list[ModelOutput]) -> int:
        """Store one entry per target token plus the end-of-sentence state.

        ``states`` must be the teacher-forced states for ``(x, y)``:
        ``len(y) + 1`` outputs whose position ``t`` conditions on ``y[:t]``.
        Duplicates are allowed; the store is append-only.
        """
        require_sentence(x, "source")
        y_tokens = require_sentence(y, "target")
        if len(states) != len(y_tokens) + 1:
            raise ContractViolation(
                f"expected {len(y_tokens) + 1} teacher-forced states, got {len(states)}"
            )
        target_ids = [t.id for t in y_tokens] + [EOS_ID]
        for state, target_id in zip(states, target_ids):
            self._index.add(state.hidden.values, target_id)
        return len(target_ids)
