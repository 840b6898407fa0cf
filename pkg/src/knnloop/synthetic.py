"""Repeat-term corpus generator.

Produces a deterministic synthetic document in which ten designated
source terms are mistranslated by the shipped lexicon but corrected
consistently in the references, with each term recurring many times.
The schedule interleaves exact repeats (where retrieval should be
trusted), near-repeats (template variants) and novel filler sentences
(where retrieval is misleading), which is what gives an adaptive
interpolation policy an edge over any fixed weight.

Word-frequency bookkeeping keeps the risky sentence kinds out of the
low-occurrence recall buckets: novel filler combinations are only
emitted once every word they use has already appeared often.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from random import Random

# (source, wrong target from the lexicon, corrected target in references)
TERMS: tuple[tuple[str, str, str], ...] = (
    ("dosis", "amount", "dosage"),
    ("tablette", "table", "tablet"),
    ("wirkstoff", "workshop", "agent"),
    ("impfung", "implant", "vaccine"),
    ("salbe", "salad", "ointment"),
    ("kapsel", "castle", "capsule"),
    ("tropfen", "trophy", "drops"),
    ("spritze", "spray", "injection"),
    ("pille", "pillow", "pill"),
    ("saft", "soft", "juice"),
)

# (source, target); the first filler is the anchor present in every sentence
# and carries the highest filler weight, so the base model's degenerate
# greedy output is predictable.
FILLERS: tuple[tuple[str, str], ...] = (
    ("der", "the"),
    ("patient", "patient"),
    ("nimmt", "takes"),
    ("taeglich", "daily"),
    ("arzt", "doctor"),
    ("gibt", "gives"),
    ("abends", "evening"),
)

RARES: tuple[tuple[str, str], ...] = (
    ("notfall", "emergency"),
    ("selten", "rarely"),
)

# One-off dictionary words: each appears exactly once, as a single-word
# sentence the lexicon already translates correctly.
LOOKUPS: tuple[tuple[str, str], ...] = (
    ("morgens", "morning"),
    ("mittags", "noon"),
    ("woche", "week"),
    ("monat", "month"),
)

ANCHOR_WEIGHT = 1.3
FILLER_WEIGHT = 1.0
TERM_WEIGHT = 2.0

# Engine knobs that suit this corpus under the hash-embedding stub model.
# The stub's context vectors are unit length, so distances stay below 2 and
# the retrieval temperatures must sit well under the engine-wide default
# (which assumes transformer-scale key magnitudes).
RECOMMENDED_SETTINGS = {
    "k": 8,
    "temperature": 0.08,
    "policy_temperature": 0.05,
    "fallback_lambda": 0.0,
}

_FILLER_SENTENCES: tuple[tuple[str, ...], ...] = (
    ("der", "patient", "nimmt", "taeglich"),
    ("der", "arzt", "gibt", "abends"),
    ("der", "patient", "gibt", "abends"),
)

_RARE_SENTENCE: tuple[str, ...] = ("der", "notfall", "selten", "patient")

_NOISE_MIN_OCCURRENCES = 7


def _term_templates(term: str) -> list[tuple[str, ...]]:
    return [
        ("der", "patient", "nimmt", term),
        ("der", "arzt", "gibt", term),
        ("der", term, "taeglich", "abends"),
        ("der", "patient", term, "abends"),
    ]


@dataclass
class SyntheticCorpus:
    """Generated corpus plus the lexicon and vocabulary that go with it."""

    corpus_rows: list[tuple[str, str, str]]  # (doc_id, source, reference)
    lexicon_rows: list[tuple[str, str, float]]
    vocabulary_words: list[str]
    term_sources: list[str] = field(default_factory=list)

    def write(self, directory: str | Path) -> dict[str, Path]:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        corpus_path = directory / "corpus.tsv"
        lexicon_path = directory / "lexicon.tsv"
        vocab_path = directory / "vocab.txt"
        corpus_path.write_text(
            "".join(f"{d}\t{s}\t{r}\n" for d, s, r in self.corpus_rows),
            encoding="utf-8",
        )
        lexicon_path.write_text(
            "".join(f"{s}\t{t}\t{w}\n" for s, t, w in self.lexicon_rows),
            encoding="utf-8",
        )
        vocab_path.write_text("\n".join(self.vocabulary_words) + "\n", encoding="utf-8")
        return {"corpus": corpus_path, "lexicon": lexicon_path, "vocab": vocab_path}


def generate_repeat_term_corpus(
    seed: int = 0,
    rounds: int = 16,
    noise_per_round: int = 2,
    documents: int = 1,
) -> SyntheticCorpus:
    """Build the repeat-term corpus.

    ``rounds`` is how many times each designated term recurs; the default
    schedule yields a bit over 200 sentence pairs. ``documents`` splits the
    schedule into that many equally sized documents.
    """
    if rounds < 10:
        raise ValueError("each term must recur at least 10 times")
    rng = Random(seed)
    source_map = {src: right for src, _, right in TERMS}
    source_map.update({src: tgt for src, tgt in FILLERS})
    source_map.update({src: tgt for src, tgt in RARES})
    source_map.update({src: tgt for src, tgt in LOOKUPS})

    ref_counts: dict[str, int] = {}
    used_bags: set[frozenset] = set()
    sentences: list[tuple[str, ...]] = []

    def emit(words: tuple[str, ...]) -> None:
        sentences.append(words)
        used_bags.add(frozenset(words))
        for ref_word in {source_map[w] for w in words}:
            ref_counts[ref_word] = ref_counts.get(ref_word, 0) + 1

    # Intro: each filler pattern twice, novel first. The first value-laden
    # policy entries can only appear once content repeats, so the opening
    # sentences are decoded identically by every mode.
    for pattern in (
        _FILLER_SENTENCES[0],
        _FILLER_SENTENCES[1],
        _FILLER_SENTENCES[0],
        _FILLER_SENTENCES[1],
        _FILLER_SENTENCES[2],
        _FILLER_SENTENCES[2],
    ):
        emit(pattern)

    def noise_sentence() -> tuple[str, ...] | None:
        eligible = [
            src
            for src, tgt in FILLERS[1:]
            if ref_counts.get(tgt, 0) >= _NOISE_MIN_OCCURRENCES
        ]
        if len(eligible) < 4:
            return None
        for _ in range(20):
            picks = rng.sample(eligible, 4)
            words = ("der", *picks)
            if frozenset(words) not in used_bags or rng.random() < 0.25:
                return words
        return None

    # Single-word lookup sentences: the base model translates these
    # perfectly on its own, so blindly trusting retrieval is punished.
    # A word qualifies when its target is either brand new (both engines
    # translate it identically, so recall buckets are unaffected) or
    # already frequent enough to sit outside the low-occurrence buckets.
    single_queue = (
        [src for src, _ in FILLERS[1:]]
        + [src for src, _ in LOOKUPS]
        + [src for src, _, _ in TERMS]
    )
    single_cursor = 0

    def singleton_sentence(allow_new: bool) -> tuple[str, ...] | None:
        nonlocal single_cursor
        for _ in range(len(single_queue)):
            src = single_queue[single_cursor % len(single_queue)]
            single_cursor += 1
            count = ref_counts.get(source_map[src], 0)
            if count >= _NOISE_MIN_OCCURRENCES or (allow_new and count == 0):
                return (src,)
        return None

    for round_no in range(1, rounds + 1):
        # Filler repeats come first so their words stay recalled while the
        # datastore grows; template variants only start once every filler
        # word is past the low-occurrence buckets.
        emit(_FILLER_SENTENCES[0])
        emit(_FILLER_SENTENCES[1 + (round_no % 2)])
        for term_src, _, _ in TERMS:
            templates = _term_templates(term_src)
            if round_no <= 8:
                template = templates[0]
            else:
                template = rng.choice(templates)
            emit(template)
        if round_no in (9, 10, 11):
            emit(_RARE_SENTENCE)
        if round_no >= 3:
            for _ in range(2):
                words = singleton_sentence(allow_new=round_no >= 7)
                if words is not None:
                    emit(words)
        if round_no >= 8:
            for _ in range(noise_per_round):
                words = noise_sentence()
                if words is not None:
                    emit(words)

    corpus_rows: list[tuple[str, str, str]] = []
    per_doc = max(1, (len(sentences) + documents - 1) // documents)
    for i, words in enumerate(sentences):
        doc_id = f"doc{i // per_doc}"
        source = " ".join(words)
        reference = " ".join(source_map[w] for w in words)
        corpus_rows.append((doc_id, source, reference))

    lexicon_rows: list[tuple[str, str, float]] = []
    for src, wrong, _ in TERMS:
        lexicon_rows.append((src, wrong, TERM_WEIGHT))
    for idx, (src, tgt) in enumerate(FILLERS):
        lexicon_rows.append((src, tgt, ANCHOR_WEIGHT if idx == 0 else FILLER_WEIGHT))
    for src, tgt in RARES + LOOKUPS:
        lexicon_rows.append((src, tgt, FILLER_WEIGHT))

    vocabulary_words: list[str] = []
    for src, wrong, right in TERMS:
        vocabulary_words.extend((src, wrong, right))
    for src, tgt in FILLERS + RARES + LOOKUPS:
        vocabulary_words.extend((src, tgt))

    return SyntheticCorpus(
        corpus_rows=corpus_rows,
        lexicon_rows=lexicon_rows,
        vocabulary_words=vocabulary_words,
        term_sources=[src for src, _, _ in TERMS],
    )
