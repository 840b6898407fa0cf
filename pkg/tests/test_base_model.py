"""Lexicon stub model: determinism, hidden-vector shape, teacher forcing."""

import numpy as np
import pytest

from knnloop.base_model import LexiconStubModel, load_lexicon
from knnloop.core import Vocabulary
from knnloop.errors import InputError


def test_forward_deterministic(tiny_model):
    v = tiny_model.vocabulary
    x = v.encode("hund haus")
    prefix = v.encode("cat").tokens
    a = tiny_model.forward(x, prefix)
    b = tiny_model.forward(x, prefix)
    assert np.array_equal(a.hidden.values, b.hidden.values)
    assert np.array_equal(a.dist.probs, b.dist.probs)


def test_hidden_is_unit_norm(tiny_model):
    v = tiny_model.vocabulary
    out = tiny_model.forward(v.encode("hund katze haus"))
    assert out.hidden.dim == 64
    assert np.linalg.norm(out.hidden.values) == pytest.approx(1.0, abs=1e-12)


def test_lexicon_argmax():
    vocab = Vocabulary(["hund", "dog", "cat"])
    lexicon = {vocab.id_of("hund"): [(vocab.id_of("dog"), 0.9)]}
    model = LexiconStubModel(vocab, lexicon, dim=16, smoothing=1e-2, seed=0)
    out = model.forward(vocab.encode("hund"))
    top_id = int(np.argmax(out.dist.probs))
    assert vocab.surface_of(top_id) == "dog"


def test_distribution_has_full_support(tiny_model):
    out = tiny_model.forward(tiny_model.vocabulary.encode("hund"))
    assert np.all(out.dist.probs > 0.0)


def test_eos_weight_rises_with_prefix_length(tiny_model):
    v = tiny_model.vocabulary
    x = v.encode("hund")
    eos_short = tiny_model.forward(x, ()).dist.prob(1)
    eos_long = tiny_model.forward(x, v.encode("cat cat").tokens).dist.prob(1)
    assert eos_long > eos_short


def test_empty_source_rejected(tiny_model):
    with pytest.raises(InputError):
        tiny_model.forward(tiny_model.vocabulary.encode(""))


class TestTeacherForcedStates:
    def test_length_is_target_plus_one(self, tiny_model):
        v = tiny_model.vocabulary
        states = tiny_model.teacher_forced_states(v.encode("hund haus"), v.encode("cat house dog"))
        assert len(states) == 4

    def test_first_state_matches_empty_prefix(self, tiny_model):
        v = tiny_model.vocabulary
        x, y = v.encode("hund"), v.encode("cat")
        states = tiny_model.teacher_forced_states(x, y)
        direct = tiny_model.forward(x, ())
        assert np.array_equal(states[0].hidden.values, direct.hidden.values)
        assert np.array_equal(states[0].dist.probs, direct.dist.probs)

    def test_every_state_matches_forward(self, tiny_model):
        rng = np.random.default_rng(11)
        v = tiny_model.vocabulary
        words = ["hund", "haus", "katze", "cat", "dog", "house", "kitten"]
        for _ in range(10):
            x = v.encode(" ".join(rng.choice(words, size=rng.integers(1, 4))))
            y = v.encode(" ".join(rng.choice(words, size=rng.integers(1, 5))))
            states = tiny_model.teacher_forced_states(x, y)
            t = int(rng.integers(0, len(y) + 1))
            direct = tiny_model.forward(x, y.tokens[:t])
            assert np.array_equal(states[t].hidden.values, direct.hidden.values)
            assert np.array_equal(states[t].dist.probs, direct.dist.probs)

    def test_empty_inputs_rejected(self, tiny_model):
        v = tiny_model.vocabulary
        with pytest.raises(InputError):
            tiny_model.teacher_forced_states(v.encode(""), v.encode("cat"))
        with pytest.raises(InputError):
            tiny_model.teacher_forced_states(v.encode("hund"), v.encode(""))


def test_load_lexicon_adds_unknown_surfaces(tmp_path):
    path = tmp_path / "lex.tsv"
    path.write_text("neu\tnew\t0.5\nneu\tnovel\t0.25\n", encoding="utf-8")
    vocab = Vocabulary()
    lexicon = load_lexicon(path, vocab)
    assert "neu" in vocab and "new" in vocab and "novel" in vocab
    entries = lexicon[vocab.id_of("neu")]
    assert sorted(w for _, w in entries) == [0.25, 0.5]


def test_load_lexicon_rejects_bad_rows(tmp_path):
    bad_cols = tmp_path / "a.tsv"
    bad_cols.write_text("nur zwei\tspalten\n", encoding="utf-8")
    with pytest.raises(InputError):
        load_lexicon(bad_cols, Vocabulary())
    bad_weight = tmp_path / "b.tsv"
    bad_weight.write_text("a\tb\tnichtzahl\n", encoding="utf-8")
    with pytest.raises(InputError):
        load_lexicon(bad_weight, Vocabulary())
    negative = tmp_path / "c.tsv"
    negative.write_text("a\tb\t-1\n", encoding="utf-8")
    with pytest.raises(InputError):
        load_lexicon(negative, Vocabulary())


def test_embeddings_depend_on_seed():
    vocab = Vocabulary(["wort"])
    a = LexiconStubModel(vocab, {}, dim=8, seed=1)
    b = LexiconStubModel(vocab, {}, dim=8, seed=2)
    same = LexiconStubModel(vocab, {}, dim=8, seed=1)
    x = vocab.encode("wort")
    assert not np.array_equal(a.forward(x).hidden.values, b.forward(x).hidden.values)
    assert np.array_equal(a.forward(x).hidden.values, same.forward(x).hidden.values)
