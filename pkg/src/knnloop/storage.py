"""Corpus ingestion and datastore persistence.

Corpus files are UTF-8 TSV with ``doc_id<TAB>source<TAB>reference`` per
line; consecutive lines sharing a doc_id form one document.

Snapshots are little-endian binary with a magic string, a version byte
and a self-describing header, and store keys as raw 64-bit reals so a
round trip is bit-exact.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import Sentence, Vocabulary
from .errors import (
    CorpusFormatError,
    SnapshotDimensionError,
    SnapshotFormatError,
    SnapshotKindError,
    SnapshotTruncatedError,
    SnapshotVersionError,
)
from .nn_index import ExactNNIndex
from .policy_knn import PolicyDatastore
from .token_knn import TokenDatastore

SNAPSHOT_MAGIC = b"KNNLOOPS"
SNAPSHOT_VERSION = 1
_KIND_CODES = {"token": 0, "policy": 1}
_KIND_NAMES = {code: name for name, code in _KIND_CODES.items()}
# magic, version, kind, dim, count, k, temperature
_HEADER = struct.Struct("<8sBBIQId")


@dataclass
class Document:
    """An ordered run of (source, reference) pairs sharing one id."""

    id: str
    pairs: list[tuple[Sentence, Sentence]] = field(default_factory=list)
    oov_counts: dict[str, int] = field(default_factory=dict)


def load_corpus(path: str | Path, vocabulary: Vocabulary) -> list[Document]:
    """Parse a corpus file; out-of-vocabulary words map to UNK and are counted."""
    path = Path(path)
    documents: list[Document] = []
    current: Document | None = None
    text = path.read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise CorpusFormatError(
                f"{path}:{lineno}: expected 3 tab-separated columns, got {len(parts)}"
            )
        doc_id, source_text, ref_text = parts
        source, source_oov = vocabulary.encode_with_oov(source_text)
        reference, ref_oov = vocabulary.encode_with_oov(ref_text)
        if not source or not reference:
            raise CorpusFormatError(f"{path}:{lineno}: empty source or reference")
        if current is None or current.id != doc_id:
            current = Document(id=doc_id)
            documents.append(current)
        current.pairs.append((source, reference))
        for word in source_oov + ref_oov:
            current.oov_counts[word] = current.oov_counts.get(word, 0) + 1
    if not documents:
        raise CorpusFormatError(f"{path}: no sentence pairs found")
    return documents


def corpus_surfaces(path: str | Path) -> list[str]:
    """Every surface form in file order (sources then references per line).

    Used to build a default vocabulary when none is supplied.
    """
    path = Path(path)
    words: list[str] = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise CorpusFormatError(
                f"{path}:{lineno}: expected 3 tab-separated columns, got {len(parts)}"
            )
        words.extend(parts[1].split())
        words.extend(parts[2].split())
    return words


def _snapshot_kind(store: TokenDatastore | PolicyDatastore) -> str:
    if isinstance(store, TokenDatastore):
        return "token"
    if isinstance(store, PolicyDatastore):
        return "policy"
    raise SnapshotFormatError(f"cannot snapshot object of type {type(store).__name__}")


def save_snapshot(store: TokenDatastore | PolicyDatastore, path: str | Path) -> None:
    """Write a self-describing snapshot; loading it restores identical queries."""
    kind = _snapshot_kind(store)
    keys, payloads = store.index.export_arrays()
    header = _HEADER.pack(
        SNAPSHOT_MAGIC,
        SNAPSHOT_VERSION,
        _KIND_CODES[kind],
        store.index.dim,
        keys.shape[0],
        store.k,
        store.temperature,
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(keys, dtype=np.float64).tobytes())
        fh.write(np.ascontiguousarray(payloads, dtype=np.int64).tobytes())


def snapshot_info(path: str | Path) -> dict:
    """Parse just the header of a snapshot file."""
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise SnapshotTruncatedError(f"{path}: shorter than the snapshot header")
    magic, version, kind_code, dim, count, k, temperature = _HEADER.unpack_from(raw)
    if magic != SNAPSHOT_MAGIC:
        raise SnapshotFormatError(f"{path}: not a datastore snapshot")
    return {
        "path": str(path),
        "version": version,
        "kind": _KIND_NAMES.get(kind_code, f"unknown({kind_code})"),
        "dim": dim,
        "entries": count,
        "k": k,
        "temperature": temperature,
    }


def load_snapshot(
    path: str | Path,
    expect_kind: str | None = None,
    expect_dim: int | None = None,
) -> TokenDatastore | PolicyDatastore:
    """Load a snapshot back into a datastore object.

    ``expect_kind`` ("token" or "policy") and ``expect_dim`` make mismatches
    fail eagerly with distinct error kinds.
    """
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise SnapshotTruncatedError(f"{path}: shorter than the snapshot header")
    magic, version, kind_code, dim, count, k, temperature = _HEADER.unpack_from(raw)
    if magic != SNAPSHOT_MAGIC:
        raise SnapshotFormatError(f"{path}: not a datastore snapshot")
    if version != SNAPSHOT_VERSION:
        raise SnapshotVersionError(
            f"{path}: snapshot version {version}, expected {SNAPSHOT_VERSION}"
        )
    if kind_code not in _KIND_NAMES:
        raise SnapshotFormatError(f"{path}: unknown datastore kind {kind_code}")
    kind = _KIND_NAMES[kind_code]
    if expect_kind is not None and kind != expect_kind:
        raise SnapshotKindError(f"{path}: holds a {kind} datastore, expected {expect_kind}")
    if expect_dim is not None and dim != expect_dim:
        raise SnapshotDimensionError(f"{path}: dimension {dim}, expected {expect_dim}")

    body = raw[_HEADER.size :]
    expected_size = count * (dim * 8 + 8)
    if len(body) < expected_size:
        raise SnapshotTruncatedError(
            f"{path}: body holds {len(body)} bytes, header promises {expected_size}"
        )
    key_bytes = count * dim * 8
    keys = np.frombuffer(body[:key_bytes], dtype="<f8").reshape(count, dim)
    payloads = np.frombuffer(body[key_bytes:expected_size], dtype="<i8")

    if kind == "token":
        store: TokenDatastore | PolicyDatastore = TokenDatastore(
            dim=dim, k=k, temperature=temperature
        )
    else:
        if dim != 2 * k:
            raise SnapshotFormatError(
                f"{path}: policy snapshot dimension {dim} inconsistent with k={k}"
            )
        store = PolicyDatastore(k=k, temperature=temperature)
    store._index = ExactNNIndex.from_arrays(keys, payloads, dim)
    return store
