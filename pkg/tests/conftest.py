import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from knnloop.base_model import LexiconStubModel
from knnloop.core import Vocabulary


@pytest.fixture
def tiny_model() -> LexiconStubModel:
    """Three-entry lexicon where 'hund' is deliberately mistranslated."""
    vocab = Vocabulary(["hund", "haus", "katze", "cat", "dog", "house", "kitten"])
    lexicon = {
        vocab.id_of("hund"): [(vocab.id_of("cat"), 0.9)],
        vocab.id_of("haus"): [(vocab.id_of("house"), 0.9)],
        vocab.id_of("katze"): [(vocab.id_of("kitten"), 0.9)],
    }
    return LexiconStubModel(vocab, lexicon, dim=64, seed=7)
