"""Core types: distributions, vocabulary, interpolation, argmax."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from knnloop.core import (
    BOS_ID,
    EOS_ID,
    UNK_ID,
    Distribution,
    Sentence,
    Token,
    Vocabulary,
    argmax_token,
    interpolate,
)
from knnloop.errors import ContractViolation, InputError


def dist(*values) -> Distribution:
    return Distribution(np.array(values, dtype=float))


class TestDistribution:
    def test_valid_construction(self):
        d = dist(0.25, 0.75)
        assert len(d) == 2
        assert d.prob(1) == 0.75

    def test_rejects_negative(self):
        with pytest.raises(ContractViolation):
            dist(1.2, -0.2)

    def test_rejects_bad_sum(self):
        with pytest.raises(ContractViolation):
            dist(0.5, 0.6)

    def test_rejects_non_finite(self):
        with pytest.raises(ContractViolation):
            dist(np.nan, 1.0)

    def test_immutable(self):
        d = dist(0.5, 0.5)
        with pytest.raises(ValueError):
            d.probs[0] = 1.0

    def test_top_orders_by_prob_then_id(self):
        d = dist(0.3, 0.3, 0.4)
        assert d.top(3) == [(2, 0.4), (0, 0.3), (1, 0.3)]


class TestVocabulary:
    def test_reserved_ids(self):
        v = Vocabulary()
        assert len(v) == 3
        assert v.surface_of(BOS_ID) == "<bos>"
        assert v.surface_of(EOS_ID) == "<eos>"
        assert v.surface_of(UNK_ID) == "<unk>"

    def test_add_is_idempotent(self):
        v = Vocabulary()
        a = v.add("wort")
        assert v.add("wort") == a
        assert len(v) == 4

    def test_unknown_maps_to_unk(self):
        v = Vocabulary(["wort"])
        assert v.id_of("fehlt") == UNK_ID
        sentence, oov = v.encode_with_oov("wort fehlt")
        assert sentence.ids() == [3, UNK_ID]
        assert oov == ["fehlt"]

    def test_reserved_surfaces_in_text_degrade_to_unk(self):
        v = Vocabulary(["wort"])
        sentence = v.encode("<bos> wort <eos>")
        assert sentence.ids() == [UNK_ID, 3, UNK_ID]

    def test_file_round_trip(self, tmp_path):
        v = Vocabulary(["alpha", "beta", "gamma"])
        path = tmp_path / "vocab.txt"
        v.to_file(path)
        loaded = Vocabulary.from_file(path)
        assert loaded.words() == v.words()
        assert loaded.id_of("beta") == v.id_of("beta")


class TestInterpolate:
    def test_lambda_zero_returns_base_exactly(self):
        p_knn = dist(1.0, 0.0)
        p_nmt = dist(0.25, 0.75)
        out = interpolate(p_knn, p_nmt, 0.0)
        assert np.array_equal(out.probs, p_nmt.probs)

    def test_lambda_one_returns_knn_exactly(self):
        p_knn = dist(1.0, 0.0)
        p_nmt = dist(0.0, 1.0)
        out = interpolate(p_knn, p_nmt, 1.0)
        assert np.array_equal(out.probs, p_knn.probs)

    def test_midpoint(self):
        out = interpolate(dist(1.0, 0.0), dist(0.0, 1.0), 0.5)
        assert out.probs.tolist() == [0.5, 0.5]

    def test_dimension_mismatch(self):
        with pytest.raises(ContractViolation):
            interpolate(dist(1.0), dist(0.5, 0.5), 0.5)

    def test_lambda_out_of_range(self):
        with pytest.raises(ContractViolation):
            interpolate(dist(1.0, 0.0), dist(0.0, 1.0), 1.5)

    @given(
        st.lists(st.floats(0.01, 10.0), min_size=2, max_size=12),
        st.lists(st.floats(0.01, 10.0), min_size=2, max_size=12),
        st.floats(0.0, 1.0),
    )
    @settings(max_examples=200)
    def test_closure_under_convex_combination(self, a, b, lam):
        n = min(len(a), len(b))
        pa = np.array(a[:n]) / sum(a[:n])
        pb = np.array(b[:n]) / sum(b[:n])
        out = interpolate(Distribution(pa), Distribution(pb), lam)
        assert abs(float(out.probs.sum()) - 1.0) <= 1e-9
        assert np.all(out.probs >= 0.0)
        assert np.all(out.probs <= 1.0)

    @given(st.lists(st.floats(0.01, 10.0), min_size=2, max_size=12), st.floats(0.0, 1.0))
    @settings(max_examples=100)
    def test_fixed_point(self, raw, lam):
        p = Distribution(np.array(raw) / sum(raw))
        out = interpolate(p, p, lam)
        assert np.allclose(out.probs, p.probs, atol=1e-15)


class TestArgmax:
    def test_picks_maximum(self):
        v = Vocabulary(["a", "b"])
        # ids: 0..2 reserved, 3 = a, 4 = b
        token = argmax_token(dist(0.0, 0.0, 0.0, 0.2, 0.8), v)
        assert token == Token(4, "b")

    def test_tie_breaks_to_lowest_id(self):
        v = Vocabulary(["a", "b"])
        token = argmax_token(dist(0.0, 0.0, 0.0, 0.5, 0.5), v)
        assert token.id == 3

    def test_uniform_returns_id_zero(self):
        v = Vocabulary(["a"])
        token = argmax_token(dist(0.25, 0.25, 0.25, 0.25), v)
        assert token.id == 0

    def test_deterministic(self):
        v = Vocabulary(["a", "b", "c"])
        d = dist(0.1, 0.1, 0.1, 0.3, 0.3, 0.1)
        assert all(argmax_token(d, v) == argmax_token(d, v) for _ in range(5))


class TestSentence:
    def test_text_and_ids(self):
        v = Vocabulary(["ein", "wort"])
        s = v.encode("ein wort")
        assert s.text() == "ein wort"
        assert len(s) == 2

    def test_empty_vocabulary_entry_rejected(self):
        v = Vocabulary()
        with pytest.raises(InputError):
            v.add("  ")
