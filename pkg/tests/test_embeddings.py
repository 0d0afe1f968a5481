import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tvcompanion import (
    OutOfVocabularyError,
    VectorFormatError,
    cosine_similarity,
    dump_vectors,
    load_vectors,
    synthetic_store,
)


def _store_from(text: str):
    return load_vectors(io.StringIO(text))


class TestLoadVectors:
    def test_basic_parse(self):
        store = _store_from("2 3\ncat 1 0 0\ndog 0 1 0\n")
        assert store.dimension == 3
        assert store.vocab_size == 2
        assert list(store.vector("cat")) == [1.0, 0.0, 0.0]

    def test_dimension_mismatch(self):
        with pytest.raises(VectorFormatError, match="expected 3 components"):
            _store_from("1 3\ncat 1 0\n")

    def test_duplicate_keeps_first_and_warns(self, caplog):
        with caplog.at_level("WARNING"):
            store = _store_from("2 2\ncat 1 0\ncat 0 1\n")
        assert store.vocab_size == 1
        assert list(store.vector("cat")) == [1.0, 0.0]
        warnings = [r for r in caplog.records if "duplicate" in r.message]
        assert len(warnings) == 1

    def test_malformed_header(self):
        with pytest.raises(VectorFormatError):
            _store_from("banana\ncat 1 0\n")
        with pytest.raises(VectorFormatError):
            _store_from("2\ncat 1 0\n")

    def test_non_finite_component(self):
        with pytest.raises(VectorFormatError, match="non-finite"):
            _store_from("1 2\ncat nan 0\n")

    def test_empty_vocabulary(self):
        with pytest.raises(VectorFormatError, match="empty vocabulary"):
            _store_from("0 4\n")

    def test_crlf_accepted(self):
        store = _store_from("1 2\r\ncat 1 2\r\n")
        assert list(store.vector("cat")) == [1.0, 2.0]

    def test_round_trip(self):
        store = _store_from("2 3\ncat 0.25 -1.5 3.125\ndog 0.1 0.2 0.3\n")
        buf = io.StringIO()
        dump_vectors(store, buf)
        reloaded = load_vectors(io.StringIO(buf.getvalue()))
        assert reloaded.dimension == store.dimension
        assert reloaded.vocab_size == store.vocab_size
        for word in store.words():
            assert np.array_equal(reloaded.vector(word), store.vector(word))


class TestCosine:
    def test_self_similarity_is_one(self):
        store = _store_from("2 3\ncat 1 2 3\ndog 0 1 0\n")
        assert cosine_similarity("cat", "cat", store) == 1.0

    def test_orthogonal(self):
        store = _store_from("2 3\ncat 1 0 0\ndog 0 1 0\n")
        assert cosine_similarity("cat", "dog", store) == 0.0

    def test_hand_oracle_value(self):
        # dot = 1, norms sqrt(2) and 1 -> 1/sqrt(2)
        store = _store_from("2 3\ncat 1 1 0\ncow 1 0 0\n")
        assert abs(cosine_similarity("cat", "cow", store) - 0.7071067811865475) < 1e-12

    def test_out_of_vocabulary(self):
        store = _store_from("1 2\ncat 1 0\n")
        with pytest.raises(OutOfVocabularyError):
            cosine_similarity("cat", "zebra", store)

    def test_zero_norm(self):
        store = _store_from("2 2\ncat 0 0\ndog 1 0\n")
        with pytest.raises(ValueError, match="zero-norm"):
            cosine_similarity("cat", "dog", store)

    def test_symmetry_and_bound(self, small_store):
        words = sorted(small_store.words())[:20]
        for a in words[:5]:
            for b in words:
                left = cosine_similarity(a, b, small_store)
                right = cosine_similarity(b, a, small_store)
                assert left == right
                assert abs(left) <= 1 + 1e-12


class TestSyntheticStore:
    def test_deterministic(self):
        first = synthetic_store(3, ["a", "b", "c"], 5)
        second = synthetic_store(3, ["a", "b", "c"], 5)
        for word in first.words():
            assert np.array_equal(first.vector(word), second.vector(word))

    def test_word_order_independent(self):
        first = synthetic_store(3, ["a", "b"], 5)
        second = synthetic_store(3, ["b", "a"], 5)
        assert np.array_equal(first.vector("a"), second.vector("a"))

    def test_unit_norm(self, small_store):
        for word in small_store.words():
            assert abs(np.linalg.norm(small_store.vector(word)) - 1.0) < 1e-9

    def test_seed_changes_vectors(self):
        first = synthetic_store(1, ["a", "b"], 4)
        second = synthetic_store(2, ["a", "b"], 4)
        assert any(
            not np.array_equal(first.vector(w), second.vector(w)) for w in ("a", "b")
        )

    def test_validation(self):
        with pytest.raises(ValueError):
            synthetic_store(1, [], 4)
        with pytest.raises(ValueError):
            synthetic_store(1, ["a"], 1)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.sampled_from("abcdefgh"), min_size=1, max_size=8, unique=True),
       st.integers(min_value=0, max_value=2**32))
def test_store_text_round_trip_property(words, seed):
    store = synthetic_store(seed, words, 4)
    buf = io.StringIO()
    dump_vectors(store, buf)
    reloaded = load_vectors(io.StringIO(buf.getvalue()))
    assert reloaded.vocab_size == store.vocab_size
    for word in words:
        assert np.array_equal(reloaded.vector(word), store.vector(word))


def test_self_cosine_requires_nonzero_norm():
    store = _store_from("1 2\ncat 0 0\n")
    with pytest.raises(ValueError, match="zero-norm"):
        cosine_similarity("cat", "cat", store)
