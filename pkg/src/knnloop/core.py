"""Shared domain types: tokens, vocabulary, probability vectors, context vectors.

Everything here is immutable after construction and safe to share between
threads. Probabilities are 64-bit reals; a vector counts as a distribution
when it is non-negative and sums to one within ``PROB_SUM_TOL``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import ContractViolation, InputError

BOS_ID = 0
EOS_ID = 1
UNK_ID = 2
BOS_SURFACE = "<bos>"
EOS_SURFACE = "<eos>"
UNK_SURFACE = "<unk>"
RESERVED_SURFACES = (BOS_SURFACE, EOS_SURFACE, UNK_SURFACE)

PROB_SUM_TOL = 1e-9


@dataclass(frozen=True)
class Token:
    """A vocabulary item: integer id plus its surface form."""

    id: int
    surface: str


@dataclass(frozen=True)
class Sentence:
    """An ordered sequence of tokens. Inputs to the engine never contain BOS/EOS."""

    tokens: tuple[Token, ...]

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[Token]:
        return iter(self.tokens)

    def __bool__(self) -> bool:
        return bool(self.tokens)

    def ids(self) -> list[int]:
        return [t.id for t in self.tokens]

    def surfaces(self) -> list[str]:
        return [t.surface for t in self.tokens]

    def text(self) -> str:
        return " ".join(t.surface for t in self.tokens)


class Vocabulary:
    """Bidirectional surface/id map with three fixed reserved entries.

    Ids are assigned in insertion order, which gives deterministic
    tie-breaking everywhere a lowest-id rule applies.
    """

    def __init__(self, words: Iterable[str] = ()):
        self._surfaces: list[str] = list(RESERVED_SURFACES)
        self._ids: dict[str, int] = {s: i for i, s in enumerate(self._surfaces)}
        for word in words:
            self.add(word)

    def __len__(self) -> int:
        return len(self._surfaces)

    def __contains__(self, surface: str) -> bool:
        return surface in self._ids

    def add(self, surface: str) -> int:
        """Add a surface form if absent; returns its id either way."""
        if not surface or surface.isspace():
            raise InputError("vocabulary entries must be non-empty surfaces")
        existing = self._ids.get(surface)
        if existing is not None:
            return existing
        idx = len(self._surfaces)
        self._surfaces.append(surface)
        self._ids[surface] = idx
        return idx

    def id_of(self, surface: str) -> int:
        """Id for a surface; unknown surfaces map to UNK."""
        return self._ids.get(surface, UNK_ID)

    def surface_of(self, idx: int) -> str:
        if not 0 <= idx < len(self._surfaces):
            raise ContractViolation(f"token id {idx} outside vocabulary of size {len(self)}")
        return self._surfaces[idx]

    def token(self, surface: str) -> Token:
        """Token for a surface form; unknown or reserved text degrades to UNK."""
        idx = self._ids.get(surface, UNK_ID)
        if idx in (BOS_ID, EOS_ID):
            idx = UNK_ID
        return Token(idx, self._surfaces[idx])

    def token_of_id(self, idx: int) -> Token:
        return Token(idx, self.surface_of(idx))

    def encode(self, text: str) -> Sentence:
        """Whitespace-tokenize ``text``; out-of-vocabulary words become UNK."""
        return self.encode_with_oov(text)[0]

    def encode_with_oov(self, text: str) -> tuple[Sentence, list[str]]:
        """Like :meth:`encode` but also reports the surfaces that mapped to UNK."""
        tokens: list[Token] = []
        oov: list[str] = []
        for word in text.split():
            tok = self.token(word)
            if tok.id == UNK_ID and word != UNK_SURFACE:
                oov.append(word)
            tokens.append(tok)
        return Sentence(tuple(tokens)), oov

    def words(self) -> list[str]:
        """Non-reserved surfaces in id order."""
        return self._surfaces[len(RESERVED_SURFACES):]

    @classmethod
    def from_file(cls, path: str | Path) -> "Vocabulary":
        """Load one surface per line; line order (after reserved ids) defines ids."""
        vocab = cls()
        text = Path(path).read_text(encoding="utf-8")
        for line in text.splitlines():
            word = line.strip()
            if word:
                vocab.add(word)
        return vocab

    def to_file(self, path: str | Path) -> None:
        Path(path).write_text("\n".join(self.words()) + "\n", encoding="utf-8")


@dataclass(frozen=True, eq=False)
class Distribution:
    """A probability vector over the vocabulary."""

    probs: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.probs, dtype=np.float64)
        if arr.ndim != 1:
            raise ContractViolation("distribution must be a 1-D vector")
        if arr.size == 0:
            raise ContractViolation("distribution must be non-empty")
        if np.any(arr < 0.0) or not np.all(np.isfinite(arr)):
            raise ContractViolation("distribution entries must be finite and >= 0")
        total = float(arr.sum())
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise ContractViolation(f"distribution sums to {total!r}, not 1")
        arr = arr.copy() if arr is self.probs else arr
        arr.flags.writeable = False
        object.__setattr__(self, "probs", arr)

    def __len__(self) -> int:
        return int(self.probs.size)

    def prob(self, token: Token | int) -> float:
        idx = token.id if isinstance(token, Token) else int(token)
        if not 0 <= idx < self.probs.size:
            raise ContractViolation(f"token id {idx} outside distribution of size {len(self)}")
        return float(self.probs[idx])

    def top(self, n: int) -> list[tuple[int, float]]:
        """The ``n`` most probable ids, highest first, ties by lowest id."""
        n = min(n, self.probs.size)
        order = np.lexsort((np.arange(self.probs.size), -self.probs))[:n]
        return [(int(i), float(self.probs[i])) for i in order]


@dataclass(frozen=True, eq=False)
class ContextVector:
    """A fixed-dimension real vector representing the decoder context."""

    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 1:
            raise ContractViolation("context vector must be 1-D")
        if not np.all(np.isfinite(arr)):
            raise ContractViolation("context vector entries must be finite")
        arr = arr.copy() if arr is self.values else arr
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def dim(self) -> int:
        return int(self.values.size)


def interpolate(p_knn: Distribution, p_nmt: Distribution, lam: float) -> Distribution:
    """Convex combination ``lam * p_knn + (1 - lam) * p_nmt``."""
    if len(p_knn) != len(p_nmt):
        raise ContractViolation(
            f"distribution lengths differ: {len(p_knn)} vs {len(p_nmt)}"
        )
    if not 0.0 <= lam <= 1.0:
        raise ContractViolation(f"interpolation weight {lam!r} outside [0, 1]")
    return Distribution(lam * p_knn.probs + (1.0 - lam) * p_nmt.probs)


def argmax_token(p: Distribution, vocabulary: Vocabulary) -> Token:
    """Most probable token; ties break toward the lowest id."""
    idx = int(np.argmax(p.probs))
    return vocabulary.token_of_id(idx)


def require_sentence(s: Sentence | Sequence[Token], what: str) -> tuple[Token, ...]:
    """Validate a non-empty sentence argument and return its tokens."""
    tokens = s.tokens if isinstance(s, Sentence) else tuple(s)
    if not tokens:
        raise InputError(f"{what} must be a non-empty sentence")
    return tokens
