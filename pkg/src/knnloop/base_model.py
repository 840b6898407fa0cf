"""Base sequence model contract plus a deterministic lexicon stub.

The contract models one decoding step: given a source sentence and the
target prefix, produce the hidden context vector and the next-token
distribution. The stub realizes it without any neural network so the
rest of the engine can run and be tested at desk scale; an adapter to a
real model only has to implement :class:`BaseModel`.
"""

from __future__ import annotations

import hashlib
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .core import (
    BOS_ID,
    EOS_ID,
    ContextVector,
    Distribution,
    Sentence,
    Token,
    Vocabulary,
    require_sentence,
)
from .errors import ContractViolation, InputError

DEFAULT_DIM = 64
DEFAULT_SMOOTHING = 1e-2

# Lexicon: source token id -> [(target token id, weight >= 0), ...]
Lexicon = dict[int, list[tuple[int, float]]]


@dataclass(frozen=True)
class ModelOutput:
    """One decoding step: hidden context vector plus next-token distribution."""

    hidden: ContextVector
    dist: Distribution


class BaseModel(ABC):
    """Pure-function decoding contract. Implementations hold no mutable state."""

    @property
    @abstractmethod
    def vocabulary(self) -> Vocabulary: ...

    @property
    @abstractmethod
    def dimension(self) -> int: ...

    @abstractmethod
    def forward(self, x: Sentence, y_prefix: Sequence[Token] = ()) -> ModelOutput:
        """Next-step output for source ``x`` after emitting ``y_prefix``."""

    def teacher_forced_states(self, x: Sentence, y: Sentence) -> list[ModelOutput]:
        """States for every position of ``y`` plus the final end-of-sentence step.

        Element ``t`` equals ``forward(x, y[:t])`` exactly, so the list has
        ``len(y) + 1`` entries.
        """
        require_sentence(x, "source")
        y_tokens = require_sentence(y, "target")
        return [self.forward(x, y_tokens[:t]) for t in range(len(y_tokens) + 1)]


def _hash_embedding(surface: str, seed: int, dim: int) -> np.ndarray:
    """Deterministic dense vector for a surface form, components in [-1, 1]."""
    key = (seed % 2**64).to_bytes(8, "little")
    digest = hashlib.blake2b(surface.encode("utf-8"), key=key, digest_size=16).digest()
    rng = np.random.Generator(np.random.PCG64(int.from_bytes(digest, "little")))
    return rng.uniform(-1.0, 1.0, dim)


def load_lexicon(path: str | Path, vocabulary: Vocabulary) -> Lexicon:
    """Parse a TSV lexicon (``source<TAB>target<TAB>weight`` per line).

    Surfaces not in the vocabulary are added to it. Weights must be
    non-negative and each source must end up with positive total weight.
    """
    lexicon: Lexicon = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.rstrip("\n").split("\t")
        if len(parts) != 3:
            raise InputError(f"{path}:{lineno}: expected 3 tab-separated columns")
        src, tgt, raw_weight = parts
        try:
            weight = float(raw_weight)
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: bad weight {raw_weight!r}") from exc
        if weight < 0:
            raise InputError(f"{path}:{lineno}: negative weight")
        src_id = vocabulary.add(src)
        tgt_id = vocabulary.add(tgt)
        lexicon.setdefault(src_id, []).append((tgt_id, weight))
    for src_id, entries in lexicon.items():
        if sum(w for _, w in entries) <= 0:
            raise InputError(
                f"lexicon source {vocabulary.surface_of(src_id)!r} has no positive weight"
            )
    return lexicon


class LexiconStubModel(BaseModel):
    """Deterministic stand-in for a pretrained sequence model.

    The hidden vector depends only on the last emitted token and the bag of
    source tokens, so identical local contexts produce identical keys and
    exact-match retrieval becomes observable after a single correction.
    The output distribution mixes lexicon weights with uniform smoothing
    ``smoothing`` and raises the end-of-sentence weight once the prefix is
    at least as long as the source, which bounds greedy decoding.
    """

    def __init__(
        self,
        vocabulary: Vocabulary,
        lexicon: Lexicon | None = None,
        dim: int = DEFAULT_DIM,
        smoothing: float = DEFAULT_SMOOTHING,
        seed: int = 0,
    ):
        if dim < 1:
            raise ContractViolation("dimension must be positive")
        if smoothing <= 0:
            raise ContractViolation("smoothing mass must be positive")
        self._vocab = vocabulary
        self._lexicon = {k: list(v) for k, v in (lexicon or {}).items()}
        self._dim = dim
        self._smoothing = smoothing
        self._seed = seed
        # Embeddings are fixed at construction; the vocabulary must be fully
        # loaded (lexicon and corpus) before the model is built.
        self._emb = np.stack(
            [_hash_embedding(vocabulary.surface_of(i), seed, dim) for i in range(len(vocabulary))]
        )

    @property
    def vocabulary(self) -> Vocabulary:
        return self._vocab

    @property
    def dimension(self) -> int:
        return self._dim

    @property
    def seed(self) -> int:
        return self._seed

    def forward(self, x: Sentence, y_prefix: Sequence[Token] = ()) -> ModelOutput:
        src_tokens = require_sentence(x, "source")
        prefix = y_prefix.tokens if isinstance(y_prefix, Sentence) else tuple(y_prefix)
        src_ids = [t.id for t in src_tokens]
        for tid in src_ids + [t.id for t in prefix]:
            if not 0 <= tid < len(self._vocab):
                raise ContractViolation(f"token id {tid} outside vocabulary")

        last_id = prefix[-1].id if prefix else BOS_ID
        ctx = 0.7 * self._emb[last_id] + 0.3 * self._emb[src_ids].mean(axis=0)
        norm = float(np.linalg.norm(ctx))
        if norm > 0.0:
            ctx = ctx / norm

        weights = np.full(len(self._vocab), self._smoothing)
        for sid in src_ids:
            for tid, w in self._lexicon.get(sid, ()):
                weights[tid] += w
        eos_bonus = len(prefix) - len(src_ids) + 1
        if eos_bonus > 0:
            weights[EOS_ID] += float(eos_bonus)

        return ModelOutput(
            hidden=ContextVector(ctx),
            dist=Distribution(weights / weights.sum()),
        )
