"""Corpus-level translation metrics.

- corpus BLEU-4: clipped n-gram precisions, geometric mean, exponential
  brevity penalty, no smoothing (a zero precision zeroes the score);
- ter_noshift: word-level edit distance over reference length, i.e. TER
  without the phrase-shift operation (hence the explicit name);
- occurrence recall: per-sentence recall of reference words bucketed by
  how many earlier sentences' references already contained them, which
  measures how fast corrections are picked up;
- lambda buckets: mean predicted interpolation weight grouped by the
  retrieval probability of the reference token.

All functions are pure; sentences may be given as ``Sentence`` objects or
as plain lists of word strings.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import Sentence
from .errors import InputError
from .session import AdaptLogEntry

Words = Sequence[str]

BLEU_MAX_ORDER = 4

# Occurrence buckets: (label, lowest index, highest index or None for open).
# Boundary indices 5 and 9 belong to both adjacent buckets by convention;
# per-index tallies are exposed for anyone needing disjoint counts.
DEFAULT_OCCURRENCE_BUCKETS: tuple[tuple[str, int, int | None], ...] = (
    ("R_0", 0, 0),
    ("R_1", 1, 1),
    ("R_2~5", 2, 5),
    ("R_5~9", 5, 9),
    ("R_9+", 9, None),
)

LAMBDA_BUCKET_EDGES = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)


def _words(sentence: Sentence | Words) -> list[str]:
    if isinstance(sentence, Sentence):
        return sentence.surfaces()
    return [str(w) for w in sentence]


def _paired(hyps: Sequence, refs: Sequence) -> list[tuple[list[str], list[str]]]:
    if len(hyps) != len(refs):
        raise InputError(
            f"hypothesis/reference counts differ: {len(hyps)} vs {len(refs)}"
        )
    return [(_words(h), _words(r)) for h, r in zip(hyps, refs)]


# -- BLEU ---------------------------------------------------------------------


@dataclass(frozen=True)
class BleuBreakdown:
    """Corpus BLEU-4 with its intermediate statistics."""

    matched: tuple[int, ...]
    totals: tuple[int, ...]
    precisions: tuple[float, ...]
    hyp_length: int
    ref_length: int
    brevity_penalty: float
    score: float


def _ngram_counts(words: list[str], order: int) -> Counter:
    return Counter(tuple(words[i : i + order]) for i in range(len(words) - order + 1))


def bleu_breakdown(hyps: Sequence, refs: Sequence) -> BleuBreakdown:
    pairs = _paired(hyps, refs)
    matched = [0] * BLEU_MAX_ORDER
    totals = [0] * BLEU_MAX_ORDER
    hyp_length = 0
    ref_length = 0
    for hyp, ref in pairs:
        if not ref:
            raise InputError("references must be non-empty sentences")
        hyp_length += len(hyp)
        ref_length += len(ref)
        for order in range(1, BLEU_MAX_ORDER + 1):
            hyp_counts = _ngram_counts(hyp, order)
            ref_counts = _ngram_counts(ref, order)
            totals[order - 1] += max(len(hyp) - order + 1, 0)
            matched[order - 1] += sum(
                min(count, ref_counts[gram]) for gram, count in hyp_counts.items()
            )

    precisions = tuple(
        (m / t) if t > 0 else 0.0 for m, t in zip(matched, totals)
    )
    if hyp_length == 0:
        brevity_penalty = 0.0
    elif hyp_length > ref_length:
        brevity_penalty = 1.0
    else:
        brevity_penalty = math.exp(1.0 - ref_length / hyp_length)

    if any(p == 0.0 for p in precisions):
        score = 0.0
    else:
        log_mean = sum(math.log(p) for p in precisions) / BLEU_MAX_ORDER
        score = 100.0 * brevity_penalty * math.exp(log_mean)
    return BleuBreakdown(
        matched=tuple(matched),
        totals=tuple(totals),
        precisions=precisions,
        hyp_length=hyp_length,
        ref_length=ref_length,
        brevity_penalty=brevity_penalty,
        score=score,
    )


def corpus_bleu(hyps: Sequence, refs: Sequence) -> float:
    """Corpus BLEU-4 in [0, 100]."""
    return bleu_breakdown(hyps, refs).score


# -- TER without shifts ------------------------------------------------------


def _levenshtein(a: list[str], b: list[str]) -> int:
    if not a:
        return len(b)
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, wa in enumerate(a, start=1):
        current = [i] + [0] * len(b)
        for j, wb in enumerate(b, start=1):
            cost = 0 if wa == wb else 1
            current[j] = min(
                previous[j] + 1,        # deletion from a
                current[j - 1] + 1,     # insertion into a
                previous[j - 1] + cost, # substitution / match
            )
        previous = current
    return previous[-1]


def ter_noshift(hyps: Sequence, refs: Sequence) -> float:
    """Total word-level edit distance divided by total reference length."""
    pairs = _paired(hyps, refs)
    total_ref = sum(len(r) for _, r in pairs)
    if total_ref == 0:
        raise InputError("total reference length must be positive")
    edits = sum(_levenshtein(h, r) for h, r in pairs)
    return edits / total_ref


# -- occurrence recall ---------------------------------------------------------


@dataclass(frozen=True)
class BucketRecall:
    label: str
    low: int
    high: int | None  # inclusive; None = unbounded
    numerator: int
    denominator: int

    @property
    def recall(self) -> float | None:
        if self.denominator == 0:
            return None
        return self.numerator / self.denominator


@dataclass(frozen=True)
class OccurrenceRecallReport:
    buckets: tuple[BucketRecall, ...]
    per_index: dict[int, tuple[int, int]]  # occurrence index -> (num, den)

    def recall(self, label: str) -> float | None:
        for bucket in self.buckets:
            if bucket.label == label:
                return bucket.recall
        raise KeyError(label)


def _bucketize(
    per_index: dict[int, tuple[int, int]],
    buckets: Iterable[tuple[str, int, int | None]],
) -> tuple[BucketRecall, ...]:
    def in_range(idx: int, low: int, high: int | None) -> bool:
        return idx >= low and (high is None or idx <= high)

    out = []
    for label, low, high in buckets:
        num = sum(v[0] for i, v in per_index.items() if in_range(i, low, high))
        den = sum(v[1] for i, v in per_index.items() if in_range(i, low, high))
        out.append(BucketRecall(label, low, high, num, den))
    return tuple(out)


def occurrence_recall(
    hyps: Sequence,
    refs: Sequence,
    buckets: Iterable[tuple[str, int, int | None]] = DEFAULT_OCCURRENCE_BUCKETS,
) -> OccurrenceRecallReport:
    """Recall of reference words grouped by prior occurrence count.

    A word's occurrence index in sentence ``j`` is the number of earlier
    sentences whose reference contained it (set semantics per sentence,
    cumulative over the document, independent of the hypotheses). The word
    counts as recalled when the unique words of hypothesis ``j`` contain it.
    Bucket values micro-average over their index range.
    """
    pairs = _paired(hyps, refs)
    seen_in: Counter = Counter()
    per_index: dict[int, list[int]] = {}
    for hyp, ref in pairs:
        hyp_words = set(hyp)
        ref_words = set(ref)
        for word in ref_words:
            idx = seen_in[word]
            num, den = per_index.get(idx, (0, 0))
            per_index[idx] = [num + (1 if word in hyp_words else 0), den + 1]
        for word in ref_words:
            seen_in[word] += 1

    frozen = {i: (v[0], v[1]) for i, v in sorted(per_index.items())}
    return OccurrenceRecallReport(buckets=_bucketize(frozen, buckets), per_index=frozen)


def merge_occurrence_recall(
    reports: Iterable[OccurrenceRecallReport],
    buckets: Iterable[tuple[str, int, int | None]] = DEFAULT_OCCURRENCE_BUCKETS,
) -> OccurrenceRecallReport:
    """Micro-average several per-document reports (occurrence counting stays
    per-document; numerators and denominators pool)."""
    merged: dict[int, tuple[int, int]] = {}
    for report in reports:
        for idx, (num, den) in report.per_index.items():
            old = merged.get(idx, (0, 0))
            merged[idx] = (old[0] + num, old[1] + den)
    merged = dict(sorted(merged.items()))
    return OccurrenceRecallReport(buckets=_bucketize(merged, buckets), per_index=merged)


# -- lambda buckets ------------------------------------------------------------


@dataclass(frozen=True)
class LambdaBucket:
    low: float
    high: float
    count: int
    mean_lambda: float | None

    @property
    def label(self) -> str:
        closing = "]" if self.high >= LAMBDA_BUCKET_EDGES[-1] else ")"
        return f"[{self.low:.1f},{self.high:.1f}{closing}"


@dataclass(frozen=True)
class LambdaBucketReport:
    buckets: tuple[LambdaBucket, ...]
    total: int


def lambda_bucket_report(log: Iterable[AdaptLogEntry]) -> LambdaBucketReport:
    """Mean predicted interpolation weight per retrieval-probability bucket.

    Only log entries with retrieval support participate; the probability of
    the reference token under retrieval selects the bucket.
    """
    edges = LAMBDA_BUCKET_EDGES
    sums = [0.0] * (len(edges) - 1)
    counts = [0] * (len(edges) - 1)
    for entry in log:
        if entry.p_knn_ref is None or entry.predicted_lambda is None:
            continue
        idx = min(int(entry.p_knn_ref * (len(edges) - 1)), len(edges) - 2)
        sums[idx] += entry.predicted_lambda
        counts[idx] += 1
    buckets = tuple(
        LambdaBucket(
            low=edges[i],
            high=edges[i + 1],
            count=counts[i],
            mean_lambda=(sums[i] / counts[i]) if counts[i] else None,
        )
        for i in range(len(edges) - 1)
    )
    return LambdaBucketReport(buckets=buckets, total=sum(counts))
